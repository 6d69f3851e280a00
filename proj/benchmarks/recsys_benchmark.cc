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

#include <numeric>
#include <vector>

#include "bench_util.h"
#include "fairrec/recsys.h"

namespace fairrec {
namespace {

void BM_KnnFit(benchmark::State& state) {
  const auto m = bench::ZipfMatrix(static_cast<int>(state.range(0)), 1000, 50, 1);
  for (auto _ : state) {
    UserKnnModel model(m, 40, Similarity::kMeanSquaredDifference, 5);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_KnnFit)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_KnnScoreCatalog(benchmark::State& state) {
  const auto m = bench::ZipfMatrix(1000, static_cast<int>(state.range(0)), 50, 2);
  const UserKnnModel model(m, 40, Similarity::kCosine, 1);
  std::vector<ArtistIndex> all(m.n_artists());
  std::iota(all.begin(), all.end(), 0);
  UserIndex u = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(RecommendTopN(model, u, all, 5));
    u = (u + 1) % static_cast<UserIndex>(m.n_users());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_KnnScoreCatalog)->Arg(500)->Arg(1000)->Arg(2000);

void BM_NmfFit(benchmark::State& state) {
  const auto m = bench::ZipfMatrix(1000, 1000, 50, 3);
  ModelConfig config;
  config.nmf_factors = static_cast<int>(state.range(0));
  config.nmf_epochs = 20;
  for (auto _ : state) {
    NmfModel model(m, config);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * config.nmf_epochs * static_cast<std::int64_t>(m.nnz()));
}
BENCHMARK(BM_NmfFit)->Arg(5)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_RankTopN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomStream rng(4);
  std::vector<ArtistIndex> cand(n);
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    cand[i] = static_cast<ArtistIndex>(i);
    scores[i] = rng.Uniform01();
  }
  for (auto _ : state) benchmark::DoNotOptimize(RankTopN(0, cand, scores, 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankTopN)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
}  // namespace fairrec
