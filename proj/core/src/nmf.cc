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

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fairrec/recsys.h"
#include "fairrec/rng.h"
#include "fairrec/tsv.h"

namespace fairrec {

namespace {

double Dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) s += x[f] * y[f];
  return s;
}

// One multiplicative half-step for a single row `target` against the fixed
// factors of its observed partners. `partners` yields (partner_row, rating).
template <typename Partners>
void UpdateRow(std::span<double> target, const NmfModel::Factors& fixed, const Partners& partners,
               double reg, std::vector<double>& num, std::vector<double>& den) {
  const std::size_t nf = target.size();
  std::fill(num.begin(), num.end(), 0.0);
  std::fill(den.begin(), den.end(), 0.0);
  std::size_t count = 0;
  for (const auto& [partner, rating] : partners) {
    const auto other = fixed.row(partner);
    const double est = Dot(target, other);
    for (std::size_t f = 0; f < nf; ++f) {
      num[f] += other[f] * rating;
      den[f] += other[f] * est;
    }
    ++count;
  }
  if (count == 0) return;
  for (std::size_t f = 0; f < nf; ++f) {
    if (target[f] == 0.0) continue;
    const double d = den[f] + reg * static_cast<double>(count) * target[f];
    if (d > 0.0) target[f] *= num[f] / d;
  }
}

}  // namespace

NmfModel::NmfModel(const InteractionMatrix& train, const ModelConfig& config,
                   std::vector<double>* epoch_objectives)
    : Model(train.n_users(), train.n_artists()) {
  config.Validate();
  const auto nf = static_cast<std::size_t>(config.nmf_factors);
  p_ = {train.n_users(), nf, std::vector<double>(train.n_users() * nf)};
  q_ = {train.n_artists(), nf, std::vector<double>(train.n_artists() * nf)};
  RandomStream rng(config.seed, {"nmf", "init"});
  const double span = config.nmf_init_high - config.nmf_init_low;
  for (auto& v : p_.values) v = config.nmf_init_low + span * rng.Uniform01();
  for (auto& v : q_.values) v = config.nmf_init_low + span * rng.Uniform01();

  if (epoch_objectives) {
    epoch_objectives->clear();
    epoch_objectives->push_back(Objective(train, config.nmf_reg));
  }

  std::vector<double> num(nf), den(nf);
  std::vector<std::pair<std::size_t, double>> partners;
  for (int epoch = 0; epoch < config.nmf_epochs; ++epoch) {
    for (std::size_t u = 0; u < train.n_users(); ++u) {
      partners.clear();
      for (const auto& e : train.Row(static_cast<UserIndex>(u))) {
        partners.emplace_back(static_cast<std::size_t>(e.artist), e.rating);
      }
      UpdateRow(p_.row(u), q_, partners, config.nmf_reg, num, den);
    }
    for (std::size_t a = 0; a < train.n_artists(); ++a) {
      partners.clear();
      for (const auto& c : train.Column(static_cast<ArtistIndex>(a))) {
        partners.emplace_back(static_cast<std::size_t>(c.user), c.rating);
      }
      UpdateRow(q_.row(a), p_, partners, config.nmf_reg, num, den);
    }
    if (epoch_objectives) epoch_objectives->push_back(Objective(train, config.nmf_reg));
  }
}

NmfModel::NmfModel(Factors user_factors, Factors item_factors)
    : Model(user_factors.n_rows, item_factors.n_rows),
      p_(std::move(user_factors)),
      q_(std::move(item_factors)) {
  if (p_.n_factors != q_.n_factors) {
    throw std::invalid_argument("NmfModel: factor dimensions differ");
  }
}

double NmfModel::Predict(UserIndex u, ArtistIndex a) const {
  CheckIndices(u, a);
  return Dot(p_.row(static_cast<std::size_t>(u)), q_.row(static_cast<std::size_t>(a)));
}

double NmfModel::Objective(const InteractionMatrix& train, double reg) const {
  double loss = 0.0, penalty = 0.0;
  for (std::size_t u = 0; u < train.n_users(); ++u) {
    const auto row = train.Row(static_cast<UserIndex>(u));
    for (const auto& e : row) {
      const double err = e.rating - Dot(p_.row(u), q_.row(static_cast<std::size_t>(e.artist)));
      loss += err * err;
    }
    const auto pu = p_.row(u);
    penalty += static_cast<double>(row.size()) * Dot(pu, pu);
  }
  for (std::size_t a = 0; a < train.n_artists(); ++a) {
    const auto qa = q_.row(a);
    penalty += static_cast<double>(train.Column(static_cast<ArtistIndex>(a)).size()) * Dot(qa, qa);
  }
  return 0.5 * loss + 0.5 * reg * penalty;
}

void NmfModel::Export(std::ostream& out) const {
  out << "model\tNMF\n";
  out << "shape\t" << n_users() << '\t' << n_artists() << '\n';
  out << "factors\t" << p_.n_factors << '\n';
  for (std::size_t u = 0; u < p_.n_rows; ++u) {
    out << "p\t" << u;
    for (double v : p_.row(u)) out << '\t' << FormatDouble(v);
    out << '\n';
  }
  for (std::size_t a = 0; a < q_.n_rows; ++a) {
    out << "q\t" << a;
    for (double v : q_.row(a)) out << '\t' << FormatDouble(v);
    out << '\n';
  }
}

}  // namespace fairrec
