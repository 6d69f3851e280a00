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

#ifndef FAIRREC_EVAL_H_
#define FAIRREC_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fairrec/interactions.h"
#include "fairrec/recsys.h"

namespace fairrec {

// Leave-N-out protocol parameters: n < N < M.
struct FoldSpec {
  int n_folds = 3;
  int held_out_per_user = 10;   // N
  int min_unique_artists = 20;  // M
  int list_size = 5;            // n
  std::uint64_t seed = 0;

  void Validate() const;
};

// Held-out (artist, rating) pairs for one user, sorted by artist.
using TestSet = std::vector<std::pair<ArtistIndex, double>>;

struct EvalFold {
  int index = 0;
  // Users with >= M artists, ascending.
  std::vector<UserIndex> eval_users;
  // Indexed by user; empty for users that are not evaluated.
  std::vector<TestSet> test;
  // Full matrix minus every test entry (same index space).
  InteractionMatrix train;
};

// Per fold and eligible user, draws N rated artists uniformly without
// replacement from stream (seed, "fold", fold index, user id). Users below M
// keep all their ratings in train. When `restrict_to` is non-empty only those
// users are considered for evaluation; the draws of a user do not depend on
// which other users are present. Throws PipelineError("folds") when no user
// is eligible.
std::vector<EvalFold> MakeFolds(const InteractionMatrix& matrix, const FoldSpec& spec,
                                std::span<const UserIndex> restrict_to = {});

// Linear-interpolation quantile (type 7) of sorted values, p in [0, 1].
double Quantile(std::span<const double> sorted, double p);

// Mean of the ratings inside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]. Throws
// std::invalid_argument on an empty list.
double RelevanceThreshold(std::span<const double> ratings);

// |relevant recommended| / |list|; nullopt for an empty list. An item is
// relevant iff it is in the test set with rating >= threshold.
std::optional<double> PrecisionAtN(const RecommendationList& list, const TestSet& test,
                                   double threshold);

// Binary-relevance nDCG at depth `depth`; ideal DCG is taken over the test
// set. nullopt for an empty list or a test set without relevant items.
std::optional<double> NdcgAtN(const RecommendationList& list, const TestSet& test,
                              double threshold, int depth);

struct BeyondAccuracy {
  double coverage = 0.0;
  double spread = 0.0;  // bits
  double longtail_pct = 0.0;
};

// coverage = distinct recommended / n_artists; spread = entropy (base 2) of
// the slot distribution; longtail_pct = long-tail slots / all slots.
BeyondAccuracy ComputeBeyondAccuracy(std::span<const RecommendationList> lists,
                                     const PopularityIndex& popularity, std::size_t n_artists);

struct MetricReport {
  double precision = 0.0;
  double ndcg = 0.0;
  double coverage = 0.0;
  double spread = 0.0;
  double longtail_pct = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t precision_skipped = 0;
  std::size_t ndcg_skipped = 0;
};

// Precision/nDCG averaged over non-skipped users plus beyond-accuracy
// metrics of the fold's lists. `tests` is indexed by user.
MetricReport EvaluateLists(std::span<const RecommendationList> lists,
                           const std::vector<TestSet>& tests,
                           const std::vector<double>& thresholds,
                           const PopularityIndex& popularity, std::size_t n_artists, int depth);

// Field-wise mean over folds; skip counts are summed.
MetricReport MeanReport(std::span<const MetricReport> folds);

}  // namespace fairrec

#endif  // FAIRREC_EVAL_H_
