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

#ifndef FAIRREC_BENCHMARKS_BENCH_UTIL_H_
#define FAIRREC_BENCHMARKS_BENCH_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "fairrec/interactions.h"
#include "fairrec/rng.h"

namespace fairrec::bench {

inline std::vector<std::string> Ids(char prefix, int n) {
  std::vector<std::string> ids;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%c%06d", prefix, i);
    ids.emplace_back(buf);
  }
  return ids;
}

// Sparse matrix with Zipf-like artist popularity.
inline InteractionMatrix ZipfMatrix(int n_users, int n_artists, int per_user, std::uint64_t seed) {
  RandomStream rng(seed, {"bench"});
  std::vector<Triple> triples;
  std::vector<bool> seen(static_cast<std::size_t>(n_artists));
  for (int u = 0; u < n_users; ++u) {
    std::fill(seen.begin(), seen.end(), false);
    for (int k = 0; k < per_user; ++k) {
      const double x = rng.Uniform01();
      const auto a = static_cast<int>(static_cast<double>(n_artists) * x * x);
      if (seen[a]) continue;
      seen[a] = true;
      triples.push_back({u, a, 1 + static_cast<std::int64_t>(rng.UniformBelow(300))});
    }
  }
  return InteractionMatrix::FromTriples(Ids('u', n_users), Ids('a', n_artists), triples);
}

}  // namespace fairrec::bench

#endif  // FAIRREC_BENCHMARKS_BENCH_UTIL_H_
