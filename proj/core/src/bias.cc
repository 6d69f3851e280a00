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

#include "fairrec/bias.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "fairrec/tsv.h"

namespace fairrec {

std::string_view UserGroupName(UserGroup g) {
  return g == UserGroup::kMaleUsers ? "MaleUsers" : "FemaleUsers";
}

std::string_view ArtistCategoryName(ArtistCategory c) {
  return c == ArtistCategory::kMaleArtists ? "MaleArtists" : "FemaleArtists";
}

GroupAssignment GroupAssignment::FromCorpus(const InteractionMatrix& matrix,
                                            const FilteredCorpus& corpus) {
  GroupAssignment out;
  out.user_groups.reserve(matrix.n_users());
  for (const auto& id : matrix.user_ids()) {
    const auto it = corpus.user_profiles.find(id);
    if (it == corpus.user_profiles.end() || !IsBinary(it->second.gender)) {
      throw PipelineError("bias", "user '" + id + "' has no binary gender");
    }
    out.user_groups.push_back(it->second.gender == Gender::kMale ? UserGroup::kMaleUsers
                                                                 : UserGroup::kFemaleUsers);
  }
  out.item_categories.reserve(matrix.n_artists());
  for (const auto& id : matrix.artist_ids()) {
    const auto it = corpus.artist_genders.find(id);
    if (it == corpus.artist_genders.end() || !IsBinary(it->second)) {
      throw PipelineError("bias", "artist '" + id + "' has no binary gender");
    }
    out.item_categories.push_back(it->second == Gender::kMale ? ArtistCategory::kMaleArtists
                                                              : ArtistCategory::kFemaleArtists);
  }
  return out;
}

SelectionMatrix SelectionMatrix::FromBinary(const InteractionMatrix& matrix) {
  SelectionMatrix s;
  s.rows_.resize(matrix.n_users());
  for (std::size_t u = 0; u < matrix.n_users(); ++u) {
    for (const auto& e : matrix.Row(static_cast<UserIndex>(u))) s.rows_[u].emplace_back(e.artist, 1.0);
  }
  return s;
}

SelectionMatrix SelectionMatrix::FromPlaycounts(const InteractionMatrix& matrix) {
  SelectionMatrix s;
  s.rows_.resize(matrix.n_users());
  for (std::size_t u = 0; u < matrix.n_users(); ++u) {
    for (const auto& e : matrix.Row(static_cast<UserIndex>(u))) {
      s.rows_[u].emplace_back(e.artist, static_cast<double>(e.playcount));
    }
  }
  return s;
}

SelectionMatrix SelectionMatrix::FromLists(std::size_t n_users,
                                           std::span<const RecommendationList> lists) {
  SelectionMatrix s;
  s.rows_.resize(n_users);
  for (const auto& list : lists) {
    auto& row = s.rows_.at(static_cast<std::size_t>(list.user));
    for (ArtistIndex a : list.artists) row.emplace_back(a, 1.0);
  }
  return s;
}

SelectionMatrix SelectionMatrix::FromRows(
    std::vector<std::vector<std::pair<ArtistIndex, double>>> rows) {
  SelectionMatrix s;
  s.rows_ = std::move(rows);
  return s;
}

PreferenceTerms PreferenceRatioTerms(const SelectionMatrix& selection,
                                     std::span<const UserIndex> users, UserGroup group,
                                     ArtistCategory category, const GroupAssignment& assignment) {
  PreferenceTerms terms;
  for (UserIndex u : users) {
    if (assignment.user_groups.at(static_cast<std::size_t>(u)) != group) continue;
    for (const auto& [a, w] : selection.Row(u)) {
      terms.total += w;
      if (assignment.item_categories.at(static_cast<std::size_t>(a)) == category) {
        terms.in_category += w;
      }
    }
  }
  return terms;
}

double PreferenceRatio(const SelectionMatrix& selection, std::span<const UserIndex> users,
                       UserGroup group, ArtistCategory category,
                       const GroupAssignment& assignment) {
  const auto terms = PreferenceRatioTerms(selection, users, group, category, assignment);
  if (!(terms.total > 0.0)) {
    throw PipelineError("bias", std::string("group ") + std::string(UserGroupName(group)) +
                                    " has an empty listening/recommendation history");
  }
  return terms.in_category / terms.total;
}

std::optional<double> BiasDisparity(double pr_input, double pr_output) {
  if (!(pr_input > 0.0)) return std::nullopt;
  return (pr_output - pr_input) / pr_input;
}

std::vector<BiasCell> ComputeBiasCells(const SelectionMatrix& input, const SelectionMatrix& output,
                                       std::span<const UserIndex> users,
                                       const GroupAssignment& assignment) {
  std::vector<BiasCell> cells;
  for (UserGroup g : kUserGroups) {
    for (ArtistCategory c : kArtistCategories) {
      BiasCell cell;
      cell.group = g;
      cell.category = c;
      const auto in = PreferenceRatioTerms(input, users, g, c, assignment);
      const auto out = PreferenceRatioTerms(output, users, g, c, assignment);
      if (in.total > 0.0) cell.pr_input = in.in_category / in.total;
      if (out.total > 0.0) cell.pr_output = out.in_category / out.total;
      if (!cell.pr_input) {
        cell.skip_reason = "empty input history for group";
      } else if (!cell.pr_output) {
        cell.skip_reason = "no recommendations for group";
      } else if (!(*cell.pr_input > 0.0)) {
        cell.skip_reason = "input preference ratio is zero";
      } else {
        cell.bias_disparity = BiasDisparity(*cell.pr_input, *cell.pr_output);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

PerUserPreference PerUserPreferenceRatio(const SelectionMatrix& selection,
                                         const GroupAssignment& assignment) {
  PerUserPreference out;
  out.by_user.resize(selection.n_users());
  for (std::size_t u = 0; u < selection.n_users(); ++u) {
    double male = 0.0, total = 0.0;
    for (const auto& [a, w] : selection.Row(static_cast<UserIndex>(u))) {
      total += w;
      if (assignment.item_categories.at(static_cast<std::size_t>(a)) ==
          ArtistCategory::kMaleArtists) {
        male += w;
      }
    }
    if (!(total > 0.0)) {
      ++out.excluded;
      continue;
    }
    UserPreference p{static_cast<UserIndex>(u), male / total, (total - male) / total};
    out.users.push_back(p);
    out.by_user[u] = p;
  }
  return out;
}

std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> cdf;
  const auto n = static_cast<double>(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k + 1 < values.size() && values[k + 1] == values[k]) continue;
    cdf.emplace_back(values[k], static_cast<double>(k + 1) / n);
  }
  return cdf;
}

void SamplingPlan::Validate() const {
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
    throw std::invalid_argument("SamplingPlan: sample_fraction must be in (0, 1]");
  }
  if (!(extreme_threshold > 0.0 && extreme_threshold < 1.0)) {
    throw std::invalid_argument("SamplingPlan: extreme_threshold must be in (0, 1)");
  }
}

std::size_t StratumSize(double fraction, std::size_t size) {
  // The epsilon keeps products such as 0.3 * 75 = 22.4999... on the half.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(size) + 0.5 + 1e-9));
}

std::vector<UserIndex> SampleUsers(const PerUserPreference& preference,
                                   const GroupAssignment& assignment, const SamplingPlan& plan) {
  plan.Validate();
  std::vector<UserIndex> chosen;

  if (plan.design == SamplingDesign::kWholePopulation) {
    auto take = [&](const std::vector<UserIndex>& stratum, std::string_view label) {
      RandomStream rng(plan.seed, {"sample", label});
      for (std::size_t k :
           SampleWithoutReplacement(stratum.size(), StratumSize(plan.sample_fraction, stratum.size()), rng)) {
        chosen.push_back(stratum[k]);
      }
    };
    if (plan.preserve_gender_proportions) {
      for (UserGroup g : kUserGroups) {
        std::vector<UserIndex> stratum;
        for (const auto& p : preference.users) {
          if (assignment.user_groups.at(static_cast<std::size_t>(p.user)) == g) stratum.push_back(p.user);
        }
        take(stratum, UserGroupName(g));
      }
    } else {
      std::vector<UserIndex> all;
      for (const auto& p : preference.users) all.push_back(p.user);
      take(all, "all");
    }
  } else {
    const auto pr_of = [&](const UserPreference& p) {
      return plan.extreme_category == ArtistCategory::kMaleArtists ? p.pr_male : p.pr_female;
    };
    std::vector<UserPreference> extreme;
    for (const auto& p : preference.users) {
      if (pr_of(p) > plan.extreme_threshold) extreme.push_back(p);
    }
    if (extreme.empty()) {
      throw PipelineError("sample", "no user has PR(" +
                                        std::string(ArtistCategoryName(plan.extreme_category)) +
                                        ") > " + FormatDouble(plan.extreme_threshold));
    }
    const auto by_max_pr = [](const UserPreference& a, const UserPreference& b) {
      const double ma = std::max(a.pr_male, a.pr_female);
      const double mb = std::max(b.pr_male, b.pr_female);
      if (ma != mb) return ma > mb;
      return a.user < b.user;
    };
    auto keep_top = [&](std::vector<UserPreference> stratum) {
      std::sort(stratum.begin(), stratum.end(), by_max_pr);
      const std::size_t k = plan.sample_fraction < 1.0
                                ? StratumSize(plan.sample_fraction, stratum.size())
                                : stratum.size();
      for (std::size_t j = 0; j < k; ++j) chosen.push_back(stratum[j].user);
    };
    if (plan.preserve_gender_proportions) {
      for (UserGroup g : kUserGroups) {
        std::vector<UserPreference> stratum;
        for (const auto& p : extreme) {
          if (assignment.user_groups.at(static_cast<std::size_t>(p.user)) == g) stratum.push_back(p);
        }
        keep_top(std::move(stratum));
      }
    } else {
      keep_top(extreme);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

void WritePrDistribution(std::ostream& out, const InteractionMatrix& matrix,
                         const GroupAssignment& assignment, const PerUserPreference& preference) {
  out << "user_id\tgender\tpr_male\tpr_female\n";
  for (const auto& p : preference.users) {
    const bool male = assignment.user_groups.at(static_cast<std::size_t>(p.user)) == UserGroup::kMaleUsers;
    out << matrix.user_id(p.user) << '\t' << (male ? "male" : "female") << '\t'
        << FormatDouble(p.pr_male) << '\t' << FormatDouble(p.pr_female) << '\n';
  }
}

}  // namespace fairrec
