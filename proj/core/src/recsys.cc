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

#include "fairrec/recsys.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fairrec/tsv.h"

namespace fairrec {

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kMostPopular:
      return "MostPopular";
    case Algorithm::kUserItemAvg:
      return "UserItemAvg";
    case Algorithm::kUserKnnAvg:
      return "UserKNNAvg";
    case Algorithm::kNmf:
      return "NMF";
  }
  return "NMF";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view text) {
  std::string s(Trim(text));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "mostpopular" || s == "pop") return Algorithm::kMostPopular;
  if (s == "useritemavg") return Algorithm::kUserItemAvg;
  if (s == "userknnavg" || s == "knn") return Algorithm::kUserKnnAvg;
  if (s == "nmf") return Algorithm::kNmf;
  return std::nullopt;
}

void ModelConfig::Validate() const {
  if (k_neighbors < 1) throw std::invalid_argument("ModelConfig: k_neighbors must be >= 1");
  if (nmf_factors < 1) throw std::invalid_argument("ModelConfig: nmf_factors must be >= 1");
  if (nmf_epochs < 0) throw std::invalid_argument("ModelConfig: nmf_epochs must be >= 0");
  if (!(nmf_reg >= 0.0)) throw std::invalid_argument("ModelConfig: nmf_reg must be >= 0");
  if (!(nmf_init_low >= 0.0 && nmf_init_high > nmf_init_low)) {
    throw std::invalid_argument("ModelConfig: need nmf_init_high > nmf_init_low >= 0");
  }
  if (min_support < 0) throw std::invalid_argument("ModelConfig: min_support must be >= 0");
}

void Model::CheckIndices(UserIndex u, ArtistIndex a) const {
  if (u < 0 || static_cast<std::size_t>(u) >= n_users_)
    throw std::out_of_range("user index " + std::to_string(u) + " out of range");
  if (a < 0 || static_cast<std::size_t>(a) >= n_artists_)
    throw std::out_of_range("artist index " + std::to_string(a) + " out of range");
}

std::vector<double> Model::ScoreCandidates(UserIndex u,
                                           std::span<const ArtistIndex> candidates) const {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (ArtistIndex a : candidates) scores.push_back(Predict(u, a));
  return scores;
}

std::unique_ptr<Model> Fit(const InteractionMatrix& train, const ModelConfig& config) {
  config.Validate();
  if (train.nnz() == 0) throw std::invalid_argument("Fit: training matrix is empty");
  switch (config.algorithm) {
    case Algorithm::kMostPopular:
      return std::make_unique<MostPopularModel>(train, config.popularity);
    case Algorithm::kUserItemAvg:
      return std::make_unique<UserItemAvgModel>(train);
    case Algorithm::kUserKnnAvg:
      return std::make_unique<UserKnnModel>(train, config.k_neighbors, config.similarity,
                                            config.min_support);
    case Algorithm::kNmf:
      return std::make_unique<NmfModel>(train, config);
  }
  throw std::invalid_argument("Fit: unknown algorithm");
}

RecommendationList RankTopN(UserIndex user, std::span<const ArtistIndex> candidates,
                            std::span<const double> scores, int n) {
  if (candidates.empty()) throw std::invalid_argument("RankTopN: empty candidate set");
  if (n < 1) throw std::invalid_argument("RankTopN: n must be >= 1");
  if (scores.size() != candidates.size()) {
    throw std::invalid_argument("RankTopN: scores and candidates differ in length");
  }
  std::vector<std::pair<double, ArtistIndex>> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double s = std::isnan(scores[k]) ? -std::numeric_limits<double>::infinity() : scores[k];
    ranked.emplace_back(s, candidates[k]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  RecommendationList list;
  list.user = user;
  std::vector<ArtistIndex> seen;
  for (const auto& [score, artist] : ranked) {
    if (list.artists.size() == static_cast<std::size_t>(n)) break;
    if (std::find(seen.begin(), seen.end(), artist) != seen.end()) continue;
    seen.push_back(artist);
    list.artists.push_back(artist);
    list.scores.push_back(score);
  }
  return list;
}

RecommendationList RecommendTopN(const Model& model, UserIndex user,
                                 std::span<const ArtistIndex> candidates, int n) {
  if (candidates.empty()) throw std::invalid_argument("RecommendTopN: empty candidate set");
  if (n < 1) throw std::invalid_argument("RecommendTopN: n must be >= 1");
  const auto scores = model.ScoreCandidates(user, candidates);
  return RankTopN(user, candidates, scores, n);
}

// ---------------------------------------------------------------------------

MostPopularModel::MostPopularModel(const InteractionMatrix& train, PopularityScore score)
    : Model(train.n_users(), train.n_artists()), scores_(train.n_artists(), 0.0) {
  for (std::size_t a = 0; a < train.n_artists(); ++a) {
    const auto column = train.Column(static_cast<ArtistIndex>(a));
    if (score == PopularityScore::kListenerCount) {
      scores_[a] = static_cast<double>(column.size());
    }
  }
  if (score == PopularityScore::kPlaycountMass) {
    for (std::size_t u = 0; u < train.n_users(); ++u) {
      for (const auto& e : train.Row(static_cast<UserIndex>(u))) {
        scores_[static_cast<std::size_t>(e.artist)] += static_cast<double>(e.playcount);
      }
    }
  }
}

MostPopularModel::MostPopularModel(std::size_t n_users, std::vector<double> scores)
    : Model(n_users, scores.size()), scores_(std::move(scores)) {}

double MostPopularModel::Predict(UserIndex u, ArtistIndex a) const {
  CheckIndices(u, a);
  return scores_[static_cast<std::size_t>(a)];
}

void MostPopularModel::Export(std::ostream& out) const {
  out << "model\tMostPopular\n";
  out << "shape\t" << n_users() << '\t' << n_artists() << '\n';
  for (std::size_t a = 0; a < scores_.size(); ++a) {
    out << "item\t" << a << '\t' << FormatDouble(scores_[a]) << '\n';
  }
}

// ---------------------------------------------------------------------------

UserItemAvgModel::UserItemAvgModel(const InteractionMatrix& train)
    : Model(train.n_users(), train.n_artists()),
      user_means_(train.n_users()),
      item_means_(train.n_artists()) {
  double total = 0.0;
  std::vector<double> item_sum(train.n_artists(), 0.0);
  std::vector<std::size_t> item_count(train.n_artists(), 0);
  for (std::size_t u = 0; u < train.n_users(); ++u) {
    const auto row = train.Row(static_cast<UserIndex>(u));
    if (row.empty()) continue;
    double s = 0.0;
    for (const auto& e : row) {
      s += e.rating;
      item_sum[static_cast<std::size_t>(e.artist)] += e.rating;
      ++item_count[static_cast<std::size_t>(e.artist)];
    }
    total += s;
    user_means_[u] = s / static_cast<double>(row.size());
  }
  global_mean_ = total / static_cast<double>(train.nnz());
  for (std::size_t a = 0; a < train.n_artists(); ++a) {
    if (item_count[a] > 0) item_means_[a] = item_sum[a] / static_cast<double>(item_count[a]);
  }
}

UserItemAvgModel::UserItemAvgModel(double global_mean,
                                   std::vector<std::optional<double>> user_means,
                                   std::vector<std::optional<double>> item_means)
    : Model(user_means.size(), item_means.size()),
      global_mean_(global_mean),
      user_means_(std::move(user_means)),
      item_means_(std::move(item_means)) {}

double UserItemAvgModel::Predict(UserIndex u, ArtistIndex a) const {
  CheckIndices(u, a);
  const double mu_u = user_means_[static_cast<std::size_t>(u)].value_or(global_mean_);
  const double mu_i = item_means_[static_cast<std::size_t>(a)].value_or(global_mean_);
  return global_mean_ + (mu_u - global_mean_) + (mu_i - global_mean_);
}

void UserItemAvgModel::Export(std::ostream& out) const {
  out << "model\tUserItemAvg\n";
  out << "shape\t" << n_users() << '\t' << n_artists() << '\n';
  out << "global\t" << FormatDouble(global_mean_) << '\n';
  for (std::size_t u = 0; u < user_means_.size(); ++u) {
    out << "user\t" << u << '\t' << (user_means_[u] ? FormatDouble(*user_means_[u]) : "") << '\n';
  }
  for (std::size_t a = 0; a < item_means_.size(); ++a) {
    out << "item\t" << a << '\t' << (item_means_[a] ? FormatDouble(*item_means_[a]) : "") << '\n';
  }
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void BadDump(const std::string& what) {
  throw std::invalid_argument("ImportModel: " + what);
}

double NeedDouble(std::string_view text) {
  const auto v = ParseDouble(text);
  if (!v) BadDump("bad number '" + std::string(text) + "'");
  return *v;
}

std::size_t NeedIndex(std::string_view text, std::size_t bound) {
  const auto v = ParseInt(text);
  if (!v || *v < 0 || static_cast<std::size_t>(*v) >= bound) BadDump("bad index");
  return static_cast<std::size_t>(*v);
}

}  // namespace

std::unique_ptr<Model> ImportModel(std::istream& in) {
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : SplitTabs(line)) fields.emplace_back(f);
    rows.push_back(std::move(fields));
  }
  if (rows.size() < 2 || rows[0].size() != 2 || rows[0][0] != "model" ||
      rows[1].size() < 3 || rows[1][0] != "shape") {
    BadDump("missing model/shape header");
  }
  const auto algorithm = ParseAlgorithm(rows[0][1]);
  if (!algorithm) BadDump("unknown algorithm '" + rows[0][1] + "'");
  const auto nu = static_cast<std::size_t>(NeedDouble(rows[1][1]));
  const auto na = static_cast<std::size_t>(NeedDouble(rows[1][2]));

  switch (*algorithm) {
    case Algorithm::kMostPopular: {
      std::vector<double> scores(na, 0.0);
      for (std::size_t r = 2; r < rows.size(); ++r) {
        if (rows[r].size() != 3 || rows[r][0] != "item") BadDump("bad item row");
        scores[NeedIndex(rows[r][1], na)] = NeedDouble(rows[r][2]);
      }
      return std::make_unique<MostPopularModel>(nu, std::move(scores));
    }
    case Algorithm::kUserItemAvg: {
      double global = 0.0;
      std::vector<std::optional<double>> users(nu), items(na);
      for (std::size_t r = 2; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (f[0] == "global" && f.size() == 2) {
          global = NeedDouble(f[1]);
        } else if ((f[0] == "user" || f[0] == "item") && f.size() == 3) {
          auto& target = f[0] == "user" ? users : items;
          const std::size_t idx = NeedIndex(f[1], target.size());
          if (!f[2].empty()) target[idx] = NeedDouble(f[2]);
        } else {
          BadDump("bad UserItemAvg row");
        }
      }
      return std::make_unique<UserItemAvgModel>(global, std::move(users), std::move(items));
    }
    case Algorithm::kUserKnnAvg: {
      int k = 40, min_support = 1;
      Similarity sim = Similarity::kCosine;
      std::vector<Triple> triples;
      for (std::size_t r = 2; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (f[0] == "config" && f.size() == 4) {
          k = static_cast<int>(NeedDouble(f[1]));
          sim = f[2] == "msd" ? Similarity::kMeanSquaredDifference : Similarity::kCosine;
          min_support = static_cast<int>(NeedDouble(f[3]));
        } else if (f[0] == "rating" && f.size() == 4) {
          triples.push_back({static_cast<UserIndex>(NeedIndex(f[1], nu)),
                             static_cast<ArtistIndex>(NeedIndex(f[2], na)),
                             static_cast<std::int64_t>(NeedDouble(f[3]))});
        } else if (f[0] != "user") {
          BadDump("bad UserKNNAvg row");
        }
      }
      // Index-only ids, zero-padded so lexicographic order matches index order.
      auto ids = [](std::size_t n, char prefix) {
        std::vector<std::string> v(n);
        const std::size_t width = std::to_string(n).size();
        for (std::size_t i = 0; i < n; ++i) {
          std::string digits = std::to_string(i);
          v[i] = prefix + std::string(width - digits.size(), '0') + digits;
        }
        return v;
      };
      auto matrix = InteractionMatrix::FromTriples(ids(nu, 'u'), ids(na, 'a'), std::move(triples));
      return std::make_unique<UserKnnModel>(matrix, k, sim, min_support);
    }
    case Algorithm::kNmf: {
      NmfModel::Factors p, q;
      std::size_t f_count = 0;
      for (std::size_t r = 2; r < rows.size(); ++r) {
        const auto& f = rows[r];
        if (f[0] == "factors" && f.size() == 2) {
          f_count = static_cast<std::size_t>(NeedDouble(f[1]));
          p = {nu, f_count, std::vector<double>(nu * f_count, 0.0)};
          q = {na, f_count, std::vector<double>(na * f_count, 0.0)};
        } else if ((f[0] == "p" || f[0] == "q") && f_count > 0 && f.size() == f_count + 2) {
          auto& target = f[0] == "p" ? p : q;
          auto row = target.row(NeedIndex(f[1], target.n_rows));
          for (std::size_t c = 0; c < f_count; ++c) row[c] = NeedDouble(f[c + 2]);
        } else {
          BadDump("bad NMF row");
        }
      }
      if (f_count == 0) BadDump("missing factors row");
      return std::make_unique<NmfModel>(std::move(p), std::move(q));
    }
  }
  BadDump("unreachable");
}

}  // namespace fairrec
