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

#include "fairrec/interactions.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrec/rng.h"
#include "test_util.h"

namespace fairrec {
namespace {

using testing::Id;

FilteredCorpus SmallCorpus() {
  FilteredCorpus c;
  c.records = {{"u1", "a1", 1}, {"u1", "a2", 3}, {"u1", "a4", 250}, {"u2", "a1", 7},
               {"u2", "a3", 2}, {"u3", "a2", 1}, {"u3", "a3", 15}};
  for (const char* u : {"u1", "u2", "u3"}) c.user_profiles[u] = {u, Gender::kMale, {}, {}};
  for (const char* a : {"a1", "a2", "a3", "a4"}) c.artist_genders[a] = Gender::kFemale;
  for (const auto& r : c.records) c.popularity[r.artist_id] += r.playcount;
  return c;
}

TEST(LogScale, Examples) {
  EXPECT_NEAR(LogScale(1), 1.0, 1e-12);
  EXPECT_NEAR(LogScale(3), 2.0, 1e-12);
  // log2(251) = ln(251) / ln(2) evaluated independently.
  EXPECT_NEAR(LogScale(250), 7.971543553950772, 1e-9);
  EXPECT_THROW(LogScale(0), std::invalid_argument);
  EXPECT_THROW(LogScale(-4), std::invalid_argument);
}

TEST(LogScale, StrictlyIncreasingProperty) {
  RandomStream rng(1, {"logscale"});
  for (int i = 0; i < 1000; ++i) {
    const auto a = 1 + static_cast<std::int64_t>(rng.UniformBelow(1u << 30));
    const auto b = a + 1 + static_cast<std::int64_t>(rng.UniformBelow(1000));
    ASSERT_LT(LogScale(a), LogScale(b));
  }
}

TEST(InteractionMatrix, BuildPreservesEntries) {
  const auto c = SmallCorpus();
  const auto m = InteractionMatrix::Build(c);
  EXPECT_EQ(m.n_users(), 3u);
  EXPECT_EQ(m.n_artists(), 4u);
  EXPECT_EQ(m.nnz(), 7u);
  const auto u1 = *m.FindUser("u1");
  const auto a1 = *m.FindArtist("a1");
  EXPECT_DOUBLE_EQ(*m.Rating(u1, a1), 1.0);
  EXPECT_FALSE(m.Rating(*m.FindUser("u3"), a1));
  EXPECT_FALSE(m.FindUser("nobody"));
  EXPECT_EQ(m, InteractionMatrix::Build(c));
}

TEST(InteractionMatrix, RowsAndColumnsAgree) {
  RandomStream rng(2);
  const auto m = testing::RandomMatrix(rng, 12, 9, 0.4);
  std::size_t from_cols = 0;
  for (std::size_t a = 0; a < m.n_artists(); ++a) {
    const auto col = m.Column(static_cast<ArtistIndex>(a));
    from_cols += col.size();
    for (std::size_t k = 0; k < col.size(); ++k) {
      if (k > 0) {
        EXPECT_LT(col[k - 1].user, col[k].user);
      }
      EXPECT_DOUBLE_EQ(*m.Rating(col[k].user, static_cast<ArtistIndex>(a)), col[k].rating);
    }
  }
  EXPECT_EQ(from_cols, m.nnz());
}

TEST(InteractionMatrix, OutOfRangeThrows) {
  const auto m = InteractionMatrix::Build(SmallCorpus());
  EXPECT_THROW(m.Row(3), std::out_of_range);
  EXPECT_THROW(m.Column(-1), std::out_of_range);
}

TEST(InteractionMatrix, WithoutEntriesKeepsIndexSpace) {
  const auto m = InteractionMatrix::Build(SmallCorpus());
  std::vector<std::vector<ArtistIndex>> removed(1);
  removed[0] = {0, 3};
  const auto t = m.WithoutEntries(removed);
  EXPECT_EQ(t.n_users(), m.n_users());
  EXPECT_EQ(t.artist_ids(), m.artist_ids());
  EXPECT_EQ(t.nnz(), 5u);
  EXPECT_FALSE(t.Rating(0, 0));
  EXPECT_TRUE(t.Rating(0, 1));
  EXPECT_TRUE(t.Column(3).empty());
}

TEST(BinaryView, Definition) {
  const auto c = SmallCorpus();
  const auto m = InteractionMatrix::Build(c);
  const auto s = m.Binarize();
  EXPECT_EQ(s(*m.FindUser("u1"), *m.FindArtist("a4")), 1);
  EXPECT_EQ(s(*m.FindUser("u3"), *m.FindArtist("a1")), 0);
  EXPECT_EQ(s.Sum(), m.nnz());
  std::map<std::string, std::size_t> unique;
  for (const auto& r : c.records) ++unique[r.user_id];
  for (std::size_t u = 0; u < m.n_users(); ++u) {
    EXPECT_EQ(s.RowSum(static_cast<UserIndex>(u)), unique[m.user_id(static_cast<UserIndex>(u))]);
  }
}

TEST(Popularity, CountsAndHead) {
  const auto m = InteractionMatrix::Build(SmallCorpus());
  const auto pop = BuildPopularity(m);
  // plays: a1 8, a2 4, a3 17, a4 250; ceil(0.2 * 4) = 1.
  EXPECT_EQ(pop.total_plays, (std::vector<std::int64_t>{8, 4, 17, 250}));
  EXPECT_EQ(pop.listener_count, (std::vector<std::int64_t>{2, 2, 2, 1}));
  EXPECT_EQ(pop.top_head_size, 1u);
  EXPECT_TRUE(pop.top_head[3]);
  EXPECT_TRUE(pop.IsLongTail(0));
}

TEST(Popularity, TiesBrokenByArtistId) {
  std::vector<Triple> t;
  for (int a = 0; a < 10; ++a) t.push_back({0, a, 5});
  const auto m = InteractionMatrix::FromTriples({"u"}, {"a0", "a1", "a2", "a3", "a4", "a5", "a6",
                                                        "a7", "a8", "a9"},
                                                t);
  const auto pop = BuildPopularity(m);
  EXPECT_EQ(pop.top_head_size, 2u);
  EXPECT_TRUE(pop.top_head[0]);
  EXPECT_TRUE(pop.top_head[1]);
  EXPECT_FALSE(pop.top_head[2]);
}

TEST(PopularityProperty, HeadTailPartition) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    RandomStream rng(seed, {"popularity"});
    const int n_artists = 1 + static_cast<int>(rng.UniformBelow(40));
    const auto m = testing::RandomMatrix(rng, 1 + static_cast<int>(rng.UniformBelow(15)), n_artists,
                                         0.3, 1 + rng.UniformBelow(20));
    const auto pop = BuildPopularity(m);
    ASSERT_EQ(pop.top_head.size(), m.n_artists());
    std::size_t head = 0;
    for (bool h : pop.top_head) head += h ? 1 : 0;
    ASSERT_EQ(head, pop.top_head_size);
    ASSERT_EQ(head, static_cast<std::size_t>(std::ceil(0.2 * n_artists)));
    for (int a = 0; a < n_artists; ++a) {
      for (int b = 0; b < n_artists; ++b) {
        if (pop.top_head[a] && !pop.top_head[b]) {
          ASSERT_TRUE(pop.total_plays[a] > pop.total_plays[b] ||
                      (pop.total_plays[a] == pop.total_plays[b] && a < b));
        }
      }
      std::int64_t plays = 0;
      for (const auto& t : m.Triples()) plays += t.artist == a ? t.playcount : 0;
      ASSERT_EQ(pop.total_plays[a], plays);
      ASSERT_EQ(pop.listener_count[a], static_cast<std::int64_t>(m.Column(a).size()));
    }
  }
}

TEST(Snapshot, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomStream rng(seed, {"snapshot"});
    const auto m = testing::RandomMatrix(rng, 1 + static_cast<int>(rng.UniformBelow(20)),
                                         1 + static_cast<int>(rng.UniformBelow(20)), 0.3);
    std::stringstream buf;
    WriteSnapshot(buf, m);
    ASSERT_EQ(ReadSnapshot(buf), m) << "seed " << seed;
  }
}

TEST(Snapshot, DocumentedHeaderLayout) {
  const auto m = InteractionMatrix::Build(SmallCorpus());
  std::stringstream buf;
  WriteSnapshot(buf, m);
  const std::string bytes = buf.str();
  ASSERT_GE(bytes.size(), 32u);
  EXPECT_EQ(bytes.substr(0, 4), "FRIM");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);   // n_users
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 4);  // n_artists
  EXPECT_EQ(static_cast<unsigned char>(bytes[24]), 7);  // nnz
}

TEST(Snapshot, RejectsGarbage) {
  std::stringstream buf("not a snapshot at all");
  EXPECT_ANY_THROW(ReadSnapshot(buf));
}

}  // namespace
}  // namespace fairrec
