// Copyright 2026 The fairrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fairrec/bias.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "oracle.h"
#include "test_util.h"

namespace fairrec {
namespace {

constexpr auto kM = UserGroup::kMaleUsers;
constexpr auto kF = UserGroup::kFemaleUsers;
constexpr auto kMA = ArtistCategory::kMaleArtists;
constexpr auto kFA = ArtistCategory::kFemaleArtists;

using Rows = std::vector<std::vector<std::pair<ArtistIndex, double>>>;

// Random instance: group/category labels plus a dense 0/1 selection matrix.
struct Instance {
  GroupAssignment assignment;
  std::vector<int> groups, cats;
  oracle::Dense dense;
  Rows rows;
};

Instance RandomInstance(RandomStream& rng, int n_users, int n_artists, double density,
                        bool weighted) {
  Instance x;
  for (int a = 0; a < n_artists; ++a) {
    const int c = rng.UniformBelow(3) == 0 ? 1 : 0;
    x.cats.push_back(c);
    x.assignment.item_categories.push_back(c ? kFA : kMA);
  }
  x.dense.assign(static_cast<std::size_t>(n_users),
                 std::vector<double>(static_cast<std::size_t>(n_artists),
                                     std::numeric_limits<double>::quiet_NaN()));
  x.rows.resize(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    const int g = rng.UniformBelow(3) == 0 ? 1 : 0;
    x.groups.push_back(g);
    x.assignment.user_groups.push_back(g ? kF : kM);
    for (int a = 0; a < n_artists; ++a) {
      if (rng.Uniform01() < density) {
        const double w = weighted ? 1.0 + static_cast<double>(rng.UniformBelow(9)) : 1.0;
        x.dense[u][a] = w;
        x.rows[u].emplace_back(a, w);
      }
    }
  }
  return x;
}

TEST(Names, Spelling) {
  EXPECT_EQ(UserGroupName(kM), "MaleUsers");
  EXPECT_EQ(UserGroupName(kF), "FemaleUsers");
  EXPECT_EQ(ArtistCategoryName(kMA), "MaleArtists");
  EXPECT_EQ(ArtistCategoryName(kFA), "FemaleArtists");
}

TEST(PreferenceRatio, SingleCategoryGroup) {
  GroupAssignment as{{kF, kF}, {kMA, kFA, kFA}};
  const auto s = SelectionMatrix::FromRows({{{1, 1}, {2, 1}}, {{2, 1}}});
  const std::vector<UserIndex> users = {0, 1};
  EXPECT_DOUBLE_EQ(PreferenceRatio(s, users, kF, kFA, as), 1.0);
  EXPECT_DOUBLE_EQ(PreferenceRatio(s, users, kF, kMA, as), 0.0);
}

TEST(PreferenceRatio, FiveEighths) {
  // Artists 0-2 male, 3-5 female. u1: 3 male + 1 female; u2: 2 male + 2 female.
  GroupAssignment as{{kM, kM}, {kMA, kMA, kMA, kFA, kFA, kFA}};
  const auto s = SelectionMatrix::FromRows(
      {{{0, 1}, {1, 1}, {2, 1}, {3, 1}}, {{0, 1}, {1, 1}, {3, 1}, {4, 1}}});
  const std::vector<UserIndex> users = {0, 1};
  EXPECT_NEAR(PreferenceRatio(s, users, kM, kMA, as), 5.0 / 8.0, 1e-12);
  EXPECT_NEAR(PreferenceRatio(s, users, kM, kFA, as), 3.0 / 8.0, 1e-12);
  const auto terms = PreferenceRatioTerms(s, users, kM, kMA, as);
  EXPECT_EQ(terms.in_category, 5.0);
  EXPECT_EQ(terms.total, 8.0);
}

TEST(PreferenceRatio, EmptyGroupIsAnError) {
  GroupAssignment as{{kM}, {kMA}};
  const auto s = SelectionMatrix::FromRows({{{0, 1}}});
  const std::vector<UserIndex> users = {0};
  EXPECT_THROW(PreferenceRatio(s, users, kF, kMA, as), PipelineError);
}

TEST(BiasDisparity, Examples) {
  EXPECT_NEAR(*BiasDisparity(0.5, 0.5), 0.0, 1e-12);
  EXPECT_NEAR(*BiasDisparity(0.8, 0.9), 0.125, 1e-9);
  EXPECT_NEAR(*BiasDisparity(0.2, 0.0), -1.0, 1e-12);
  EXPECT_FALSE(BiasDisparity(0.0, 0.3));
}

TEST(PreferenceRatioProperty, MatchesOracleAndPartitionsToOne) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomStream rng(seed, {"pr"});
    const bool weighted = seed % 2 == 1;
    auto x = RandomInstance(rng, 1 + static_cast<int>(rng.UniformBelow(10)),
                            1 + static_cast<int>(rng.UniformBelow(15)), 0.4, weighted);
    const auto s = SelectionMatrix::FromRows(x.rows);
    std::vector<UserIndex> users;
    for (std::size_t u = 0; u < x.rows.size(); ++u) {
      if (rng.UniformBelow(4) != 0) users.push_back(static_cast<UserIndex>(u));
    }
    std::vector<int> plain(users.begin(), users.end());
    for (int g = 0; g < 2; ++g) {
      const auto group = g ? kF : kM;
      const auto ref_m = oracle::Pr(x.dense, plain, x.groups, x.cats, g, 0);
      const auto ref_f = oracle::Pr(x.dense, plain, x.groups, x.cats, g, 1);
      if (!ref_m) {
        ASSERT_THROW(PreferenceRatio(s, users, group, kMA, x.assignment), PipelineError);
        continue;
      }
      const double m = PreferenceRatio(s, users, group, kMA, x.assignment);
      const double f = PreferenceRatio(s, users, group, kFA, x.assignment);
      ASSERT_NEAR(m, *ref_m, 1e-9);
      ASSERT_NEAR(f, *ref_f, 1e-9);
      ASSERT_NEAR(m + f, 1.0, 1e-12);
    }
  }
}

TEST(PreferenceRatioProperty, RatioOfSumsOverMembers) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed, {"pr-sum"});
    auto x = RandomInstance(rng, 2 + static_cast<int>(rng.UniformBelow(9)),
                            2 + static_cast<int>(rng.UniformBelow(14)), 0.5, true);
    const auto s = SelectionMatrix::FromRows(x.rows);
    std::vector<UserIndex> all;
    for (std::size_t u = 0; u < x.rows.size(); ++u) all.push_back(static_cast<UserIndex>(u));
    for (UserGroup g : kUserGroups) {
      double num = 0, den = 0;
      for (UserIndex u : all) {
        if (x.assignment.user_groups[u] != g) continue;
        const std::vector<UserIndex> one = {u};
        const auto t = PreferenceRatioTerms(s, one, g, kMA, x.assignment);
        num += t.in_category;
        den += t.total;
      }
      if (den == 0) continue;
      ASSERT_NEAR(PreferenceRatio(s, all, g, kMA, x.assignment), num / den, 1e-12);
    }
  }
}

TEST(BiasDisparityProperty, BoundedBelowByMinusOne) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomStream rng(seed, {"bd"});
    const double in = 1e-6 + rng.Uniform01();
    const double out = rng.UniformBelow(5) == 0 ? 0.0 : rng.Uniform01();
    const double bd = *BiasDisparity(in, out);
    ASSERT_GE(bd, -1.0);
    ASSERT_EQ(bd == -1.0, out == 0.0);
  }
}

TEST(ComputeBiasCells, GridAndSkipReasons) {
  GroupAssignment as{{kM, kF}, {kMA, kFA}};
  const auto in = SelectionMatrix::FromRows({{{0, 1}}, {{0, 1}, {1, 1}}});
  const auto out = SelectionMatrix::FromRows({{{0, 1}}, {{1, 1}}});
  const std::vector<UserIndex> users = {0, 1};
  const auto cells = ComputeBiasCells(in, out, users, as);
  ASSERT_EQ(cells.size(), 4u);
  // MaleUsers x FemaleArtists has zero input PR.
  const auto& mf = cells[1];
  EXPECT_EQ(mf.group, kM);
  EXPECT_EQ(mf.category, kFA);
  EXPECT_EQ(*mf.pr_input, 0.0);
  EXPECT_FALSE(mf.bias_disparity);
  EXPECT_FALSE(mf.skip_reason.empty());
  const auto& ff = cells[3];
  EXPECT_NEAR(*ff.bias_disparity, (1.0 - 0.5) / 0.5, 1e-12);
  EXPECT_TRUE(ff.skip_reason.empty());
}

TEST(ComputeBiasCellsProperty, ProportionalListsGiveZeroDisparity) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    RandomStream rng(seed, {"proportional"});
    auto x = RandomInstance(rng, 2 + static_cast<int>(rng.UniformBelow(30)),
                            2 + static_cast<int>(rng.UniformBelow(40)), 0.3, false);
    const auto input = SelectionMatrix::FromRows(x.rows);
    std::vector<RecommendationList> lists;
    std::vector<UserIndex> users;
    for (std::size_t u = 0; u < x.rows.size(); ++u) {
      RecommendationList l;
      l.user = static_cast<UserIndex>(u);
      for (const auto& [a, w] : x.rows[u]) l.artists.push_back(a);
      std::shuffle(l.artists.begin(), l.artists.end(), rng);
      l.scores.assign(l.artists.size(), 1.0);
      lists.push_back(l);
      users.push_back(static_cast<UserIndex>(u));
    }
    const auto output = SelectionMatrix::FromLists(x.rows.size(), lists);
    for (const auto& cell : ComputeBiasCells(input, output, users, x.assignment)) {
      if (cell.bias_disparity) {
        ASSERT_NEAR(*cell.bias_disparity, 0.0, 1e-12);
      }
    }
  }
}

TEST(PerUserPreference, Examples) {
  GroupAssignment as{{kF, kM, kM}, {kMA, kMA, kMA, kMA, kFA}};
  const auto s = SelectionMatrix::FromRows(
      {{{4, 1}}, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}}, {}});
  const auto pref = PerUserPreferenceRatio(s, as);
  ASSERT_EQ(pref.users.size(), 2u);
  EXPECT_EQ(pref.excluded, 1u);
  EXPECT_DOUBLE_EQ(pref.users[0].pr_male, 0.0);
  EXPECT_DOUBLE_EQ(pref.users[0].pr_female, 1.0);
  EXPECT_NEAR(pref.users[1].pr_male, 0.8, 1e-12);
  EXPECT_NEAR(pref.users[1].pr_female, 0.2, 1e-12);
  EXPECT_FALSE(pref.by_user[2]);
}

TEST(PerUserPreferenceProperty, PartitionsToOne) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed, {"per-user"});
    auto x = RandomInstance(rng, 1 + static_cast<int>(rng.UniformBelow(20)),
                            1 + static_cast<int>(rng.UniformBelow(20)), 0.3, seed % 2 == 0);
    const auto pref = PerUserPreferenceRatio(SelectionMatrix::FromRows(x.rows), x.assignment);
    std::size_t empty = 0;
    for (const auto& r : x.rows) empty += r.empty() ? 1 : 0;
    ASSERT_EQ(pref.excluded, empty);
    for (const auto& p : pref.users) {
      ASSERT_NEAR(p.pr_male + p.pr_female, 1.0, 1e-12);
      const std::vector<int> one = {p.user};
      ASSERT_NEAR(p.pr_male, *oracle::Pr(x.dense, one, x.groups, x.cats, x.groups[p.user], 0), 1e-12);
    }
  }
}

TEST(EmpiricalCdf, DistinctSteps) {
  const auto cdf = EmpiricalCdf({0.5, 0.1, 0.5, 1.0});
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_EQ(cdf[0], std::make_pair(0.1, 0.25));
  EXPECT_EQ(cdf[1], std::make_pair(0.5, 0.75));
  EXPECT_EQ(cdf[2], std::make_pair(1.0, 1.0));
}

TEST(StratumSize, HalfUp) {
  EXPECT_EQ(StratumSize(0.3, 75), 23u);  // 22.5
  EXPECT_EQ(StratumSize(0.3, 25), 8u);   // 7.5
  EXPECT_EQ(StratumSize(1.0, 17), 17u);
  EXPECT_EQ(StratumSize(0.3, 0), 0u);
}

PerUserPreference UniformPreference(const GroupAssignment& as, double pr_male) {
  PerUserPreference p;
  p.by_user.resize(as.user_groups.size());
  for (std::size_t u = 0; u < as.user_groups.size(); ++u) {
    UserPreference up{static_cast<UserIndex>(u), pr_male, 1.0 - pr_male};
    p.users.push_back(up);
    p.by_user[u] = up;
  }
  return p;
}

TEST(SampleUsers, StratifiedCounts) {
  GroupAssignment as;
  for (int u = 0; u < 100; ++u) as.user_groups.push_back(u < 75 ? kM : kF);
  const auto pref = UniformPreference(as, 0.7);
  SamplingPlan plan;
  plan.seed = 5;
  const auto users = SampleUsers(pref, as, plan);
  const auto males = std::count_if(users.begin(), users.end(), [](UserIndex u) { return u < 75; });
  EXPECT_EQ(males, 23);
  EXPECT_EQ(users.size() - static_cast<std::size_t>(males), 8u);
  EXPECT_TRUE(std::is_sorted(users.begin(), users.end()));
  plan.sample_fraction = 1.0;
  EXPECT_EQ(SampleUsers(pref, as, plan).size(), 100u);
}

TEST(SampleUsers, ExtremeThresholdIsStrict) {
  GroupAssignment as{{kF, kF, kM}, {}};
  PerUserPreference pref;
  pref.users = {{0, 0.41, 0.59}, {1, 0.3, 0.7}, {2, 0.1, 0.9}};
  pref.by_user = {pref.users[0], pref.users[1], pref.users[2]};
  SamplingPlan plan;
  plan.design = SamplingDesign::kExtremePreference;
  plan.sample_fraction = 1.0;
  EXPECT_EQ(SampleUsers(pref, as, plan), (std::vector<UserIndex>{1, 2}));
  plan.sample_fraction = 0.5;
  // Per group: FemaleUsers {1} -> round(0.5) = 1; MaleUsers {2} -> 1.
  EXPECT_EQ(SampleUsers(pref, as, plan), (std::vector<UserIndex>{1, 2}));
  plan.extreme_threshold = 0.95;
  EXPECT_THROW(SampleUsers(pref, as, plan), PipelineError);
}

TEST(SampleUsers, ExtremeKeepsHighestMaxPreference) {
  GroupAssignment as;
  PerUserPreference pref;
  for (int u = 0; u < 10; ++u) {
    as.user_groups.push_back(kF);
    UserPreference p{u, 0.35 - 0.03 * u, 0.65 + 0.03 * u};
    pref.users.push_back(p);
    pref.by_user.push_back(p);
  }
  SamplingPlan plan;
  plan.design = SamplingDesign::kExtremePreference;
  plan.sample_fraction = 0.3;
  EXPECT_EQ(SampleUsers(pref, as, plan), (std::vector<UserIndex>{7, 8, 9}));
}

TEST(SampleUsersProperty, DeterministicAndStratified) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed, {"sampling"});
    GroupAssignment as;
    const int n = 1 + static_cast<int>(rng.UniformBelow(200));
    for (int u = 0; u < n; ++u) as.user_groups.push_back(rng.UniformBelow(4) == 0 ? kF : kM);
    const auto pref = UniformPreference(as, 0.6);
    SamplingPlan plan;
    plan.seed = seed;
    plan.sample_fraction = 0.05 + 0.95 * rng.Uniform01();
    const auto a = SampleUsers(pref, as, plan);
    ASSERT_EQ(a, SampleUsers(pref, as, plan));
    for (UserGroup g : kUserGroups) {
      const auto size = static_cast<std::size_t>(
          std::count(as.user_groups.begin(), as.user_groups.end(), g));
      const auto got = static_cast<std::size_t>(std::count_if(
          a.begin(), a.end(), [&](UserIndex u) { return as.user_groups[u] == g; }));
      ASSERT_EQ(got, StratumSize(plan.sample_fraction, size));
    }
    ASSERT_TRUE(std::adjacent_find(a.begin(), a.end()) == a.end());
  }
}

TEST(WritePrDistribution, HeaderAndRows) {
  std::vector<Triple> t = {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}};
  const auto m = InteractionMatrix::FromTriples({"u0", "u1"}, {"a0", "a1"}, t);
  GroupAssignment as{{kM, kF}, {kMA, kFA}};
  const auto pref = PerUserPreferenceRatio(SelectionMatrix::FromBinary(m), as);
  std::ostringstream out;
  WritePrDistribution(out, m, as, pref);
  EXPECT_EQ(out.str(), "user_id\tgender\tpr_male\tpr_female\nu0\tmale\t0.5\t0.5\nu1\tfemale\t0\t1\n");
}

}  // namespace
}  // namespace fairrec
