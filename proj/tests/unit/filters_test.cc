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

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fairrec/corpus.h"
#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "test_util.h"

namespace fairrec {
namespace {

using testing::Id;

struct RawCorpus {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
};

// Dense-ish random corpus: every user listens to `per_user` distinct artists.
RawCorpus MakeCorpus(RandomStream& rng, int n_users, int n_artists, int per_user,
                     double unknown_artist_share, double unknown_user_share) {
  RawCorpus c;
  for (int a = 0; a < n_artists; ++a) {
    const double x = rng.Uniform01();
    Gender g = x < unknown_artist_share ? Gender::kUndefined
               : rng.Uniform01() < 0.7  ? Gender::kMale
                                        : Gender::kFemale;
    c.genders.Set(Id("a", a), g);
  }
  for (int u = 0; u < n_users; ++u) {
    const std::string user = Id("u", u);
    Gender g = rng.Uniform01() < unknown_user_share ? Gender::kUndefined
               : rng.Uniform01() < 0.7              ? Gender::kMale
                                                    : Gender::kFemale;
    c.profiles[user] = {user, g, std::nullopt, std::nullopt};
    for (auto a : SampleWithoutReplacement(static_cast<std::size_t>(n_artists),
                                           static_cast<std::size_t>(per_user), rng)) {
      c.records.push_back({user, Id("a", static_cast<int>(a)),
                           1 + static_cast<std::int64_t>(rng.UniformBelow(100))});
    }
  }
  c.records = AggregateRecords(c.records);
  return c;
}

std::map<std::string, int> UserCounts(const std::vector<ListeningRecord>& records) {
  std::map<std::string, int> n;
  for (const auto& r : records) ++n[r.user_id];
  return n;
}

std::map<std::string, int> ArtistCounts(const std::vector<ListeningRecord>& records) {
  std::map<std::string, int> n;
  for (const auto& r : records) ++n[r.artist_id];
  return n;
}

FilterPolicy SmallPolicy() {
  FilterPolicy p;
  p.min_unique_artists_per_user = 4;
  p.min_users_per_artist = 3;
  return p;
}

TEST(ApplyFilters, UserWithNineArtistsRemovedAtStageOne) {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  for (int a = 0; a < 10; ++a) genders.Set(Id("a", a), Gender::kMale);
  for (int u = 0; u < 12; ++u) {
    const std::string user = Id("u", u);
    profiles[user] = {user, Gender::kFemale, std::nullopt, std::nullopt};
    const int n = u == 0 ? 9 : 10;
    for (int a = 0; a < n; ++a) records.push_back({user, Id("a", a), 1});
  }
  const auto result = ApplyFilters(records, profiles, genders, FilterPolicy{});
  const auto users = UserCounts(result.corpus.records);
  EXPECT_FALSE(users.contains("u00"));
  EXPECT_EQ(users.size(), 11u);
  ASSERT_GE(result.report.stages.size(), 2u);
  EXPECT_EQ(result.report.stages[1].users, 11u);
}

TEST(ApplyFilters, UserWithThirtyPercentUnknownRemovedAtStageTwo) {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  for (int a = 0; a < 10; ++a) genders.Set(Id("a", a), a < 3 ? Gender::kUndefined : Gender::kMale);
  for (int a = 10; a < 20; ++a) genders.Set(Id("a", a), Gender::kFemale);
  for (int u = 0; u < 12; ++u) {
    const std::string user = Id("u", u);
    profiles[user] = {user, Gender::kMale, std::nullopt, std::nullopt};
    // u00 hears a00..a09 (3 of 10 unknown); everyone else a10..a19 plus a00..a09.
    for (int a = 0; a < 10; ++a) records.push_back({user, Id("a", a), 1});
    if (u != 0) {
      for (int a = 10; a < 30 && a < 20; ++a) records.push_back({user, Id("a", a), 1});
    }
  }
  const auto result = ApplyFilters(records, profiles, genders, FilterPolicy{});
  const auto users = UserCounts(result.corpus.records);
  EXPECT_FALSE(users.contains("u00"));
  EXPECT_EQ(users.size(), 11u);
  for (const auto& r : result.corpus.records) {
    EXPECT_TRUE(IsBinary(result.corpus.artist_genders.at(r.artist_id)));
  }
}

TEST(ApplyFilters, CleanCorpusIsUnchanged) {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  for (int a = 0; a < 12; ++a) genders.Set(Id("a", a), a % 3 ? Gender::kMale : Gender::kFemale);
  for (int u = 0; u < 11; ++u) {
    const std::string user = Id("u", u);
    profiles[user] = {user, u % 2 ? Gender::kMale : Gender::kFemale, std::nullopt, std::nullopt};
    for (int a = 0; a < 12; ++a) records.push_back({user, Id("a", a), 1 + u + a});
  }
  const auto result = ApplyFilters(records, profiles, genders, FilterPolicy{});
  EXPECT_EQ(result.corpus.records, records);
  EXPECT_EQ(result.corpus.user_profiles, profiles);
  EXPECT_EQ(result.corpus.artist_genders.size(), 12u);
  std::int64_t total = 0;
  for (int u = 0; u < 11; ++u) total += 1 + u;
  EXPECT_EQ(result.corpus.popularity.at("a00"), total);
}

TEST(ApplyFilters, EmptyResultIsFatalWithStageCounts) {
  std::vector<ListeningRecord> records = {{"u1", "a1", 1}};
  std::map<std::string, UserProfile> profiles = {{"u1", {"u1", Gender::kMale, {}, {}}}};
  GenderMap genders;
  genders.Set("a1", Gender::kMale);
  try {
    ApplyFilters(records, profiles, genders, FilterPolicy{});
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "filter");
    EXPECT_NE(std::string(e.what()).find("users"), std::string::npos);
  }
}

TEST(ApplyFilters, PlaycountBasisWeighsMass) {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  genders.Set("a00", Gender::kUndefined);
  for (int a = 1; a < 5; ++a) genders.Set(Id("a", a), Gender::kMale);
  for (int u = 0; u < 3; ++u) {
    const std::string user = Id("u", u);
    profiles[user] = {user, Gender::kMale, {}, {}};
    // One unknown artist out of five (20% by artists) but 60% of the plays for u00.
    records.push_back({user, "a00", u == 0 ? 60 : 1});
    for (int a = 1; a < 5; ++a) records.push_back({user, Id("a", a), 10});
  }
  FilterPolicy p;
  p.min_unique_artists_per_user = 1;
  p.min_users_per_artist = 1;
  EXPECT_EQ(UserCounts(ApplyFilters(records, profiles, genders, p).corpus.records).size(), 3u);
  p.unknown_basis = UnknownGenderBasis::kPlaycountMass;
  const auto users = UserCounts(ApplyFilters(records, profiles, genders, p).corpus.records);
  EXPECT_EQ(users.size(), 2u);
  EXPECT_FALSE(users.contains("u00"));
}

TEST(FilterPolicy, RejectsOutOfRange) {
  FilterPolicy p;
  p.max_unknown_gender_fraction = 1.5;
  EXPECT_ANY_THROW(p.Validate());
  p = FilterPolicy{};
  p.min_users_per_artist = -1;
  EXPECT_ANY_THROW(p.Validate());
}

TEST(ApplyFiltersProperty, OutputInvariantsAndIdempotence) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 120 && seed < 400; ++seed) {
    RandomStream rng(seed, {"filters"});
    const auto raw = MakeCorpus(rng, 10 + static_cast<int>(rng.UniformBelow(30)),
                                8 + static_cast<int>(rng.UniformBelow(20)),
                                3 + static_cast<int>(rng.UniformBelow(6)), 0.1, 0.1);
    const FilterPolicy policy = SmallPolicy();
    FilterResult once;
    try {
      once = ApplyFilters(raw.records, raw.profiles, raw.genders, policy);
    } catch (const PipelineError&) {
      continue;
    }
    ++checked;
    const auto& c = once.corpus;
    // Thresholds hold after re-enforcement (exhaustive scan).
    for (const auto& [u, n] : UserCounts(c.records)) ASSERT_GE(n, policy.min_unique_artists_per_user);
    for (const auto& [a, n] : ArtistCounts(c.records)) ASSERT_GE(n, policy.min_users_per_artist);
    // Binary genders everywhere.
    for (const auto& r : c.records) {
      ASSERT_TRUE(c.user_profiles.contains(r.user_id));
      ASSERT_TRUE(IsBinary(c.user_profiles.at(r.user_id).gender));
      ASSERT_TRUE(IsBinary(c.artist_genders.at(r.artist_id)));
    }
    const auto twice = ApplyFilters(c, policy);
    ASSERT_EQ(twice.corpus, c) << "seed " << seed;
  }
  EXPECT_GE(checked, 100);
}

TEST(ApplyFiltersProperty, StageOneReachesFixedPoint) {
  // Without unknown genders, stages 2-4 are no-ops and the result is the
  // stage-1 fixed point.
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 100 && seed < 400; ++seed) {
    RandomStream rng(seed, {"fixed-point"});
    const auto raw = MakeCorpus(rng, 10 + static_cast<int>(rng.UniformBelow(30)),
                                8 + static_cast<int>(rng.UniformBelow(20)),
                                2 + static_cast<int>(rng.UniformBelow(6)), 0.0, 0.0);
    FilterPolicy policy = SmallPolicy();
    policy.reenforce_thresholds = false;
    FilterResult result;
    try {
      result = ApplyFilters(raw.records, raw.profiles, raw.genders, policy);
    } catch (const PipelineError&) {
      continue;
    }
    ++checked;
    EXPECT_EQ(result.report.users_below_threshold, 0u);
    EXPECT_EQ(result.report.artists_below_threshold, 0u);
    for (const auto& [u, n] : UserCounts(result.corpus.records)) {
      ASSERT_GE(n, policy.min_unique_artists_per_user);
    }
    for (const auto& [a, n] : ArtistCounts(result.corpus.records)) {
      ASSERT_GE(n, policy.min_users_per_artist);
    }
    // Maximality: every dropped user had too few surviving-artist records.
    std::set<std::string> kept_artists;
    for (const auto& r : result.corpus.records) kept_artists.insert(r.artist_id);
    const auto kept_users = UserCounts(result.corpus.records);
    std::map<std::string, int> reachable;
    for (const auto& r : raw.records) {
      if (kept_artists.contains(r.artist_id)) ++reachable[r.user_id];
    }
    for (const auto& [u, n] : reachable) {
      if (!kept_users.contains(u)) {
        ASSERT_LT(n, policy.min_unique_artists_per_user);
      }
    }
  }
  EXPECT_GE(checked, 100);
}

TEST(ApplyFilters, ReportsViolationsWithoutReenforcement) {
  // Dropping the undefined artist leaves u00 with 3 artists < 4.
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  genders.Set("a00", Gender::kUndefined);
  for (int a = 1; a < 6; ++a) genders.Set(Id("a", a), Gender::kMale);
  for (int u = 0; u < 4; ++u) {
    const std::string user = Id("u", u);
    profiles[user] = {user, Gender::kMale, {}, {}};
    records.push_back({user, "a00", 1});
    for (int a = 1; a < (u == 0 ? 4 : 6); ++a) records.push_back({user, Id("a", a), 1});
  }
  FilterPolicy p = SmallPolicy();
  p.max_unknown_gender_fraction = 0.3;
  p.reenforce_thresholds = false;
  const auto kept = ApplyFilters(records, profiles, genders, p);
  EXPECT_EQ(kept.report.users_below_threshold, 1u);
  EXPECT_TRUE(UserCounts(kept.corpus.records).contains("u00"));
  p.reenforce_thresholds = true;
  const auto fixed = ApplyFilters(records, profiles, genders, p);
  EXPECT_EQ(fixed.report.users_below_threshold, 1u);
  EXPECT_FALSE(UserCounts(fixed.corpus.records).contains("u00"));
}

}  // namespace
}  // namespace fairrec
