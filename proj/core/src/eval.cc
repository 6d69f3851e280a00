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

#include "fairrec/eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fairrec/error.h"
#include "fairrec/rng.h"

namespace fairrec {

void FoldSpec::Validate() const {
  if (n_folds < 1) throw std::invalid_argument("FoldSpec: n_folds must be >= 1");
  if (list_size < 1) throw std::invalid_argument("FoldSpec: list_size must be >= 1");
  if (!(held_out_per_user > list_size)) {
    throw std::invalid_argument("FoldSpec: held_out_per_user must exceed list_size");
  }
  if (!(min_unique_artists > held_out_per_user)) {
    throw std::invalid_argument("FoldSpec: min_unique_artists must exceed held_out_per_user");
  }
}

std::vector<EvalFold> MakeFolds(const InteractionMatrix& matrix, const FoldSpec& spec,
                                std::span<const UserIndex> restrict_to) {
  spec.Validate();
  std::vector<UserIndex> population(restrict_to.begin(), restrict_to.end());
  if (population.empty()) {
    population.resize(matrix.n_users());
    std::iota(population.begin(), population.end(), UserIndex{0});
  }
  std::sort(population.begin(), population.end());
  population.erase(std::unique(population.begin(), population.end()), population.end());
  std::vector<UserIndex> eligible;
  for (UserIndex u : population) {
    if (matrix.Row(u).size() >= static_cast<std::size_t>(spec.min_unique_artists)) {
      eligible.push_back(u);
    }
  }
  if (eligible.empty()) {
    throw PipelineError("folds", "no user has at least " + std::to_string(spec.min_unique_artists) +
                                     " unique artists");
  }
  std::vector<EvalFold> folds;
  for (int f = 0; f < spec.n_folds; ++f) {
    EvalFold fold;
    fold.index = f;
    fold.eval_users = eligible;
    fold.test.resize(matrix.n_users());
    std::vector<std::vector<ArtistIndex>> removed(matrix.n_users());
    const std::string fold_label = std::to_string(f);
    for (UserIndex u : eligible) {
      const auto row = matrix.Row(u);
      RandomStream rng(spec.seed, {"fold", fold_label, matrix.user_id(u)});
      const auto picks =
          SampleWithoutReplacement(row.size(), static_cast<std::size_t>(spec.held_out_per_user), rng);
      auto& test = fold.test[static_cast<std::size_t>(u)];
      for (std::size_t k : picks) {
        test.emplace_back(row[k].artist, row[k].rating);
        removed[static_cast<std::size_t>(u)].push_back(row[k].artist);
      }
      std::sort(test.begin(), test.end());
    }
    fold.train = matrix.WithoutEntries(removed);
    folds.push_back(std::move(fold));
  }
  return folds;
}

double Quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("Quantile: empty input");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double RelevanceThreshold(std::span<const double> ratings) {
  if (ratings.empty()) throw std::invalid_argument("RelevanceThreshold: empty rating list");
  std::vector<double> sorted(ratings.begin(), ratings.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = Quantile(sorted, 0.25);
  const double q3 = Quantile(sorted, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  double sum = 0.0;
  std::size_t kept = 0;
  for (double r : sorted) {
    if (r >= lo && r <= hi) {
      sum += r;
      ++kept;
    }
  }
  if (kept == 0) {
    return std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  }
  return sum / static_cast<double>(kept);
}

namespace {

bool IsRelevant(ArtistIndex a, const TestSet& test, double threshold) {
  const auto it = std::lower_bound(test.begin(), test.end(), a,
                                   [](const auto& e, ArtistIndex x) { return e.first < x; });
  return it != test.end() && it->first == a && it->second >= threshold;
}

}  // namespace

std::optional<double> PrecisionAtN(const RecommendationList& list, const TestSet& test,
                                   double threshold) {
  if (list.artists.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (ArtistIndex a : list.artists) hits += IsRelevant(a, test, threshold) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(list.artists.size());
}

std::optional<double> NdcgAtN(const RecommendationList& list, const TestSet& test,
                              double threshold, int depth) {
  if (list.artists.empty()) return std::nullopt;
  std::size_t relevant_in_test = 0;
  for (const auto& [a, r] : test) relevant_in_test += r >= threshold ? 1 : 0;
  if (relevant_in_test == 0) return std::nullopt;
  const std::size_t d = static_cast<std::size_t>(std::max(depth, 0));
  double dcg = 0.0;
  for (std::size_t p = 0; p < std::min(d, list.artists.size()); ++p) {
    if (IsRelevant(list.artists[p], test, threshold)) dcg += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  double ideal = 0.0;
  for (std::size_t p = 0; p < std::min(d, relevant_in_test); ++p) {
    ideal += 1.0 / std::log2(static_cast<double>(p) + 2.0);
  }
  return dcg / ideal;
}

BeyondAccuracy ComputeBeyondAccuracy(std::span<const RecommendationList> lists,
                                     const PopularityIndex& popularity, std::size_t n_artists) {
  BeyondAccuracy out;
  std::map<ArtistIndex, std::size_t> counts;
  std::size_t slots = 0, tail_slots = 0;
  for (const auto& list : lists) {
    for (ArtistIndex a : list.artists) {
      ++counts[a];
      ++slots;
      tail_slots += popularity.IsLongTail(a) ? 1 : 0;
    }
  }
  if (slots == 0 || n_artists == 0) return out;
  out.coverage = static_cast<double>(counts.size()) / static_cast<double>(n_artists);
  double entropy = 0.0;
  for (const auto& [a, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(slots);
    entropy -= p * std::log2(p);
  }
  out.spread = entropy == 0.0 ? 0.0 : entropy;  // avoid -0
  out.longtail_pct = static_cast<double>(tail_slots) / static_cast<double>(slots);
  return out;
}

MetricReport EvaluateLists(std::span<const RecommendationList> lists,
                           const std::vector<TestSet>& tests,
                           const std::vector<double>& thresholds,
                           const PopularityIndex& popularity, std::size_t n_artists, int depth) {
  MetricReport report;
  double precision_sum = 0.0, ndcg_sum = 0.0;
  std::size_t precision_n = 0, ndcg_n = 0;
  for (const auto& list : lists) {
    const auto u = static_cast<std::size_t>(list.user);
    ++report.users_evaluated;
    const auto p = PrecisionAtN(list, tests.at(u), thresholds.at(u));
    if (p) {
      precision_sum += *p;
      ++precision_n;
    } else {
      ++report.precision_skipped;
    }
    const auto g = NdcgAtN(list, tests.at(u), thresholds.at(u), depth);
    if (g) {
      ndcg_sum += *g;
      ++ndcg_n;
    } else {
      ++report.ndcg_skipped;
    }
  }
  report.precision = precision_n > 0 ? precision_sum / static_cast<double>(precision_n) : 0.0;
  report.ndcg = ndcg_n > 0 ? ndcg_sum / static_cast<double>(ndcg_n) : 0.0;
  const auto beyond = ComputeBeyondAccuracy(lists, popularity, n_artists);
  report.coverage = beyond.coverage;
  report.spread = beyond.spread;
  report.longtail_pct = beyond.longtail_pct;
  return report;
}

MetricReport MeanReport(std::span<const MetricReport> folds) {
  MetricReport mean;
  if (folds.empty()) return mean;
  for (const auto& f : folds) {
    mean.precision += f.precision;
    mean.ndcg += f.ndcg;
    mean.coverage += f.coverage;
    mean.spread += f.spread;
    mean.longtail_pct += f.longtail_pct;
    mean.users_evaluated += f.users_evaluated;
    mean.precision_skipped += f.precision_skipped;
    mean.ndcg_skipped += f.ndcg_skipped;
  }
  const auto n = static_cast<double>(folds.size());
  mean.precision /= n;
  mean.ndcg /= n;
  mean.coverage /= n;
  mean.spread /= n;
  mean.longtail_pct /= n;
  return mean;
}

}  // namespace fairrec
