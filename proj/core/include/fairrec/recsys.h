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

#ifndef FAIRREC_RECSYS_H_
#define FAIRREC_RECSYS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "fairrec/interactions.h"

namespace fairrec {

enum class Algorithm { kMostPopular, kUserItemAvg, kUserKnnAvg, kNmf };
enum class Similarity { kCosine, kMeanSquaredDifference };
enum class PopularityScore { kListenerCount, kPlaycountMass };

// "MostPopular", "UserItemAvg", "UserKNNAvg", "NMF".
std::string_view AlgorithmName(Algorithm algorithm);
// Case-insensitive; also accepts "knn" and "pop".
std::optional<Algorithm> ParseAlgorithm(std::string_view text);

struct ModelConfig {
  Algorithm algorithm = Algorithm::kNmf;
  int k_neighbors = 40;
  Similarity similarity = Similarity::kCosine;
  int min_support = 1;
  int nmf_factors = 15;
  int nmf_epochs = 50;
  double nmf_reg = 0.06;
  double nmf_init_low = 0.0;
  double nmf_init_high = 1.0;
  PopularityScore popularity = PopularityScore::kListenerCount;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when a field is out of range.
  void Validate() const;
};

// A fitted rating predictor. Immutable after Fit; Predict and ScoreCandidates
// are safe to call concurrently.
class Model {
 public:
  virtual ~Model() = default;

  virtual Algorithm algorithm() const = 0;
  // Throws std::out_of_range for indices outside the training matrix.
  virtual double Predict(UserIndex u, ArtistIndex a) const = 0;
  // Scores a batch for one user. The default calls Predict per candidate.
  virtual std::vector<double> ScoreCandidates(UserIndex u,
                                              std::span<const ArtistIndex> candidates) const;
  // Tab-separated dump of the learned state.
  virtual void Export(std::ostream& out) const = 0;

  std::size_t n_users() const { return n_users_; }
  std::size_t n_artists() const { return n_artists_; }

 protected:
  Model(std::size_t n_users, std::size_t n_artists) : n_users_(n_users), n_artists_(n_artists) {}
  void CheckIndices(UserIndex u, ArtistIndex a) const;

 private:
  std::size_t n_users_;
  std::size_t n_artists_;
};

// Throws std::invalid_argument for an empty training matrix or invalid config.
std::unique_ptr<Model> Fit(const InteractionMatrix& train, const ModelConfig& config);

// Re-creates a model from an Export dump.
std::unique_ptr<Model> ImportModel(std::istream& in);

struct RecommendationList {
  UserIndex user = 0;
  std::vector<ArtistIndex> artists;
  std::vector<double> scores;
};

// Ranks candidates by score descending, then artist index ascending (which is
// artist id order). Returns min(n, |candidates|) items; duplicate candidates
// are collapsed. Throws std::invalid_argument for an empty candidate set or
// n < 1.
RecommendationList RecommendTopN(const Model& model, UserIndex user,
                                 std::span<const ArtistIndex> candidates, int n);

// Same ranking rule applied to precomputed scores.
RecommendationList RankTopN(UserIndex user, std::span<const ArtistIndex> candidates,
                            std::span<const double> scores, int n);

// ---------------------------------------------------------------------------
// Concrete models. Exposed so tests can inspect learned state.

class MostPopularModel final : public Model {
 public:
  MostPopularModel(const InteractionMatrix& train, PopularityScore score);
  MostPopularModel(std::size_t n_users, std::vector<double> scores);

  Algorithm algorithm() const override { return Algorithm::kMostPopular; }
  double Predict(UserIndex u, ArtistIndex a) const override;
  void Export(std::ostream& out) const override;

  const std::vector<double>& scores() const { return scores_; }

 private:
  std::vector<double> scores_;
};

class UserItemAvgModel final : public Model {
 public:
  explicit UserItemAvgModel(const InteractionMatrix& train);
  UserItemAvgModel(double global_mean, std::vector<std::optional<double>> user_means,
                   std::vector<std::optional<double>> item_means);

  Algorithm algorithm() const override { return Algorithm::kUserItemAvg; }
  double Predict(UserIndex u, ArtistIndex a) const override;
  void Export(std::ostream& out) const override;

  double global_mean() const { return global_mean_; }
  // nullopt when the user/item has no training ratings.
  const std::vector<std::optional<double>>& user_means() const { return user_means_; }
  const std::vector<std::optional<double>>& item_means() const { return item_means_; }

 private:
  double global_mean_ = 0.0;
  std::vector<std::optional<double>> user_means_;
  std::vector<std::optional<double>> item_means_;
};

// User-based k-nearest-neighbours with mean offsets:
//   r(u, i) = mu_u + sum_v sim(u, v) (r(v, i) - mu_v) / sum_v sim(u, v)
// over the k most similar users v that rated i with sim(u, v) > 0 (ties by
// ascending user index). Similarities use co-rated items only and are zero
// below min_support co-rated items. Keeps a copy of the training matrix and
// computes similarity rows on demand.
class UserKnnModel final : public Model {
 public:
  UserKnnModel(const InteractionMatrix& train, int k, Similarity similarity, int min_support);

  Algorithm algorithm() const override { return Algorithm::kUserKnnAvg; }
  double Predict(UserIndex u, ArtistIndex a) const override;
  std::vector<double> ScoreCandidates(UserIndex u,
                                      std::span<const ArtistIndex> candidates) const override;
  void Export(std::ostream& out) const override;

  double UserSimilarity(UserIndex u, UserIndex v) const;
  // Similarities of u to every user (index-aligned).
  std::vector<double> SimilarityRow(UserIndex u) const;
  double user_mean(UserIndex u) const;
  double global_mean() const { return global_mean_; }
  const InteractionMatrix& train() const { return train_; }

 private:
  double PredictWithRow(UserIndex u, ArtistIndex a, std::span<const double> sim_row) const;

  InteractionMatrix train_;
  int k_;
  Similarity similarity_;
  int min_support_;
  double global_mean_ = 0.0;
  std::vector<std::optional<double>> user_means_;
};

// Regularized non-negative matrix factorization fitted with multiplicative
// updates over observed entries only. Each epoch is two half-steps: all user
// factors are updated from the current item factors, then all item factors
// from the new user factors:
//
//   p_uf <- p_uf * sum_i q_if r_ui / (sum_i q_if rhat_ui + reg |I_u| p_uf)
//   q_if <- q_if * sum_u p_uf r_ui / (sum_u p_uf rhat_ui + reg |U_i| q_if)
//
// which does not increase
//   0.5 * sum_obs (r_ui - p_u.q_i)^2
//     + 0.5 * reg * (sum_u |I_u| |p_u|^2 + sum_i |U_i| |q_i|^2).
// Users/items without training entries keep their initial factors.
class NmfModel final : public Model {
 public:
  struct Factors {
    std::size_t n_rows = 0;
    std::size_t n_factors = 0;
    std::vector<double> values;  // row-major

    std::span<const double> row(std::size_t r) const {
      return {values.data() + r * n_factors, n_factors};
    }
    std::span<double> row(std::size_t r) { return {values.data() + r * n_factors, n_factors}; }
  };

  // `epoch_objectives`, when non-null, receives the objective after init and
  // after every epoch (nmf_epochs + 1 values).
  NmfModel(const InteractionMatrix& train, const ModelConfig& config,
           std::vector<double>* epoch_objectives = nullptr);
  NmfModel(Factors user_factors, Factors item_factors);

  Algorithm algorithm() const override { return Algorithm::kNmf; }
  double Predict(UserIndex u, ArtistIndex a) const override;
  void Export(std::ostream& out) const override;

  const Factors& user_factors() const { return p_; }
  const Factors& item_factors() const { return q_; }

  double Objective(const InteractionMatrix& train, double reg) const;

 private:
  Factors p_;
  Factors q_;
};

}  // namespace fairrec

#endif  // FAIRREC_RECSYS_H_
