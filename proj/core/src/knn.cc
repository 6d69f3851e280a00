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

#include <algorithm>
#include <cmath>

#include "fairrec/recsys.h"
#include "fairrec/tsv.h"

namespace fairrec {

UserKnnModel::UserKnnModel(const InteractionMatrix& train, int k, enum Similarity similarity,
                           int min_support)
    : Model(train.n_users(), train.n_artists()),
      train_(train),
      k_(k),
      similarity_(similarity),
      min_support_(min_support),
      user_means_(train.n_users()) {
  double total = 0.0;
  for (std::size_t u = 0; u < train_.n_users(); ++u) {
    const auto row = train_.Row(static_cast<UserIndex>(u));
    if (row.empty()) continue;
    double s = 0.0;
    for (const auto& e : row) s += e.rating;
    total += s;
    user_means_[u] = s / static_cast<double>(row.size());
  }
  global_mean_ = train_.nnz() > 0 ? total / static_cast<double>(train_.nnz()) : 0.0;
}

double UserKnnModel::user_mean(UserIndex u) const {
  train_.CheckUser(u);
  return user_means_[static_cast<std::size_t>(u)].value_or(global_mean_);
}

std::vector<double> UserKnnModel::SimilarityRow(UserIndex u) const {
  const std::size_t nu = train_.n_users();
  std::vector<double> cross(nu, 0.0), self_sq(nu, 0.0), other_sq(nu, 0.0), diff_sq(nu, 0.0);
  std::vector<int> support(nu, 0);
  for (const auto& e : train_.Row(u)) {
    for (const auto& c : train_.Column(e.artist)) {
      const auto v = static_cast<std::size_t>(c.user);
      cross[v] += e.rating * c.rating;
      self_sq[v] += e.rating * e.rating;
      other_sq[v] += c.rating * c.rating;
      const double d = e.rating - c.rating;
      diff_sq[v] += d * d;
      ++support[v];
    }
  }
  std::vector<double> sim(nu, 0.0);
  for (std::size_t v = 0; v < nu; ++v) {
    if (support[v] == 0 || support[v] < min_support_) continue;
    if (similarity_ == Similarity::kCosine) {
      const double denom = std::sqrt(self_sq[v]) * std::sqrt(other_sq[v]);
      sim[v] = denom > 0.0 ? cross[v] / denom : 0.0;
    } else {
      sim[v] = 1.0 / (diff_sq[v] / support[v] + 1.0);
    }
  }
  return sim;
}

double UserKnnModel::UserSimilarity(UserIndex u, UserIndex v) const {
  train_.CheckUser(v);
  return SimilarityRow(u)[static_cast<std::size_t>(v)];
}

double UserKnnModel::PredictWithRow(UserIndex u, ArtistIndex a,
                                    std::span<const double> sim_row) const {
  std::vector<std::pair<double, ColumnEntry>> neighbours;
  for (const auto& c : train_.Column(a)) {
    if (c.user == u) continue;
    const double s = sim_row[static_cast<std::size_t>(c.user)];
    if (s > 0.0) neighbours.emplace_back(s, c);
  }
  const double mu_u = user_mean(u);
  if (neighbours.empty()) return mu_u;
  const auto by_similarity = [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second.user < y.second.user;
  };
  const std::size_t k = std::min(neighbours.size(), static_cast<std::size_t>(k_));
  std::partial_sort(neighbours.begin(), neighbours.begin() + static_cast<std::ptrdiff_t>(k),
                    neighbours.end(), by_similarity);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& [s, c] = neighbours[j];
    num += s * (c.rating - user_mean(c.user));
    den += s;
  }
  return mu_u + num / den;
}

double UserKnnModel::Predict(UserIndex u, ArtistIndex a) const {
  CheckIndices(u, a);
  const auto row = SimilarityRow(u);
  return PredictWithRow(u, a, row);
}

std::vector<double> UserKnnModel::ScoreCandidates(UserIndex u,
                                                  std::span<const ArtistIndex> candidates) const {
  for (ArtistIndex a : candidates) CheckIndices(u, a);
  const auto row = SimilarityRow(u);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (ArtistIndex a : candidates) scores.push_back(PredictWithRow(u, a, row));
  return scores;
}

void UserKnnModel::Export(std::ostream& out) const {
  out << "model\tUserKNNAvg\n";
  out << "shape\t" << n_users() << '\t' << n_artists() << '\n';
  out << "config\t" << k_ << '\t' << (similarity_ == Similarity::kCosine ? "cosine" : "msd")
      << '\t' << min_support_ << '\n';
  for (std::size_t u = 0; u < user_means_.size(); ++u) {
    out << "user\t" << u << '\t' << (user_means_[u] ? FormatDouble(*user_means_[u]) : "") << '\n';
  }
  for (const auto& t : train_.Triples()) {
    out << "rating\t" << t.user << '\t' << t.artist << '\t' << t.playcount << '\n';
  }
}

}  // namespace fairrec
