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

#include <benchmark/benchmark.h>

#include <vector>

#include "bench_util.h"
#include "fairrec/bias.h"
#include "fairrec/eval.h"

namespace fairrec {
namespace {

struct Workload {
  InteractionMatrix matrix;
  GroupAssignment assignment;
  std::vector<UserIndex> users;
  std::vector<RecommendationList> lists;
  std::vector<TestSet> tests;
  std::vector<double> thresholds;
  PopularityIndex popularity;
};

Workload MakeWorkload(int n_users) {
  Workload w;
  w.matrix = bench::ZipfMatrix(n_users, 1000, 50, 5);
  RandomStream rng(6);
  for (int u = 0; u < n_users; ++u) {
    w.users.push_back(u);
    w.assignment.user_groups.push_back(rng.Uniform01() < 0.72 ? UserGroup::kMaleUsers
                                                               : UserGroup::kFemaleUsers);
  }
  for (std::size_t a = 0; a < w.matrix.n_artists(); ++a) {
    w.assignment.item_categories.push_back(rng.Uniform01() < 0.82 ? ArtistCategory::kMaleArtists
                                                                  : ArtistCategory::kFemaleArtists);
  }
  w.tests.resize(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    RecommendationList l;
    l.user = u;
    std::vector<double> ratings;
    for (const auto& e : w.matrix.Row(u)) {
      if (l.artists.size() < 5) {
        l.artists.push_back(e.artist);
        l.scores.push_back(e.rating);
      }
      if (w.tests[u].size() < 10) w.tests[u].emplace_back(e.artist, e.rating);
      ratings.push_back(e.rating);
    }
    w.thresholds.push_back(ratings.empty() ? 0.0 : RelevanceThreshold(ratings));
    w.lists.push_back(std::move(l));
  }
  w.popularity = BuildPopularity(w.matrix);
  return w;
}

void BM_BiasCells(benchmark::State& state) {
  const auto w = MakeWorkload(static_cast<int>(state.range(0)));
  const auto input = SelectionMatrix::FromBinary(w.matrix);
  const auto output = SelectionMatrix::FromLists(w.matrix.n_users(), w.lists);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ComputeBiasCells(input, output, w.users, w.assignment));
  }
}
BENCHMARK(BM_BiasCells)->Arg(1000)->Arg(10000);

void BM_PerUserPreference(benchmark::State& state) {
  const auto w = MakeWorkload(static_cast<int>(state.range(0)));
  const auto input = SelectionMatrix::FromBinary(w.matrix);
  for (auto _ : state) benchmark::DoNotOptimize(PerUserPreferenceRatio(input, w.assignment));
}
BENCHMARK(BM_PerUserPreference)->Arg(1000)->Arg(10000);

void BM_EvaluateLists(benchmark::State& state) {
  const auto w = MakeWorkload(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        EvaluateLists(w.lists, w.tests, w.thresholds, w.popularity, w.matrix.n_artists(), 5));
  }
}
BENCHMARK(BM_EvaluateLists)->Arg(1000)->Arg(10000);

void BM_MakeFolds(benchmark::State& state) {
  const auto w = MakeWorkload(static_cast<int>(state.range(0)));
  FoldSpec spec;
  for (auto _ : state) benchmark::DoNotOptimize(MakeFolds(w.matrix, spec));
}
BENCHMARK(BM_MakeFolds)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace fairrec
