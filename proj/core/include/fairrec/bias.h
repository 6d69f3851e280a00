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

#ifndef FAIRREC_BIAS_H_
#define FAIRREC_BIAS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairrec/corpus.h"
#include "fairrec/interactions.h"
#include "fairrec/recsys.h"

namespace fairrec {

enum class UserGroup { kMaleUsers, kFemaleUsers };
enum class ArtistCategory { kMaleArtists, kFemaleArtists };

inline constexpr std::array<UserGroup, 2> kUserGroups = {UserGroup::kMaleUsers,
                                                         UserGroup::kFemaleUsers};
inline constexpr std::array<ArtistCategory, 2> kArtistCategories = {
    ArtistCategory::kMaleArtists, ArtistCategory::kFemaleArtists};

std::string_view UserGroupName(UserGroup g);            // "MaleUsers" / "FemaleUsers"
std::string_view ArtistCategoryName(ArtistCategory c);  // "MaleArtists" / "FemaleArtists"

struct GroupAssignment {
  std::vector<UserGroup> user_groups;            // by user index
  std::vector<ArtistCategory> item_categories;   // by artist index

  // Throws PipelineError("bias") if a user or artist lacks a binary gender.
  static GroupAssignment FromCorpus(const InteractionMatrix& matrix, const FilteredCorpus& corpus);
};

// Weighted per-user selections: the input matrix S (weight 1 per stored
// entry, or playcount weights) or the recommendation matrix R (weight 1 per
// list slot).
class SelectionMatrix {
 public:
  static SelectionMatrix FromBinary(const InteractionMatrix& matrix);
  static SelectionMatrix FromPlaycounts(const InteractionMatrix& matrix);
  static SelectionMatrix FromLists(std::size_t n_users, std::span<const RecommendationList> lists);
  static SelectionMatrix FromRows(std::vector<std::vector<std::pair<ArtistIndex, double>>> rows);

  std::size_t n_users() const { return rows_.size(); }
  std::span<const std::pair<ArtistIndex, double>> Row(UserIndex u) const {
    return rows_.at(static_cast<std::size_t>(u));
  }

 private:
  std::vector<std::vector<std::pair<ArtistIndex, double>>> rows_;
};

struct PreferenceTerms {
  double in_category = 0.0;
  double total = 0.0;
};

// Numerator and denominator of PR(G, C) over `users` restricted to group G.
PreferenceTerms PreferenceRatioTerms(const SelectionMatrix& selection,
                                     std::span<const UserIndex> users, UserGroup group,
                                     ArtistCategory category, const GroupAssignment& assignment);

// PR(G, C) = sum_{u in G} sum_{i in C} S(u, i) / sum_{u in G} sum_i S(u, i),
// with G = members of `group` among `users`. A ratio of sums, not a mean of
// per-user ratios. Throws PipelineError("bias") when the denominator is 0.
double PreferenceRatio(const SelectionMatrix& selection, std::span<const UserIndex> users,
                       UserGroup group, ArtistCategory category,
                       const GroupAssignment& assignment);

// (pr_output - pr_input) / pr_input; nullopt when pr_input == 0.
std::optional<double> BiasDisparity(double pr_input, double pr_output);

struct BiasCell {
  UserGroup group = UserGroup::kMaleUsers;
  ArtistCategory category = ArtistCategory::kMaleArtists;
  std::optional<double> pr_input;
  std::optional<double> pr_output;
  std::optional<double> bias_disparity;
  std::string skip_reason;  // empty when bias_disparity is present
};

// The 2 x 2 group x category grid. Cells whose PR is undefined are returned
// with a skip reason instead of throwing.
std::vector<BiasCell> ComputeBiasCells(const SelectionMatrix& input, const SelectionMatrix& output,
                                       std::span<const UserIndex> users,
                                       const GroupAssignment& assignment);

struct UserPreference {
  UserIndex user = 0;
  double pr_male = 0.0;
  double pr_female = 0.0;
};

struct PerUserPreference {
  std::vector<UserPreference> users;  // ascending user index
  std::size_t excluded = 0;           // users without any selection
  // Look-up by user index; nullopt for excluded users.
  std::vector<std::optional<UserPreference>> by_user;
};

PerUserPreference PerUserPreferenceRatio(const SelectionMatrix& selection,
                                         const GroupAssignment& assignment);

// Empirical CDF points (value, fraction of values <= value), one per
// distinct value, ascending.
std::vector<std::pair<double, double>> EmpiricalCdf(std::vector<double> values);

enum class SamplingDesign { kWholePopulation, kExtremePreference };

struct SamplingPlan {
  SamplingDesign design = SamplingDesign::kWholePopulation;
  double sample_fraction = 0.30;
  ArtistCategory extreme_category = ArtistCategory::kFemaleArtists;
  double extreme_threshold = 0.6;
  bool preserve_gender_proportions = true;
  std::uint64_t seed = 0;

  void Validate() const;
};

// round(fraction * size) with halves rounded up.
std::size_t StratumSize(double fraction, std::size_t size);

// WholePopulation: uniform sample of sample_fraction of the users (per user
// group when preserve_gender_proportions), stream (seed, "sample", group).
// ExtremePreference: users with PR(u, extreme_category) > extreme_threshold,
// then, when sample_fraction < 1, the top sample_fraction per group by
// max(pr_male, pr_female) (ties by user index). Returns ascending indices.
// Throws PipelineError("sample") when the extreme subpopulation is empty.
std::vector<UserIndex> SampleUsers(const PerUserPreference& preference,
                                   const GroupAssignment& assignment, const SamplingPlan& plan);

// TSV with header: user_id, gender, pr_male, pr_female.
void WritePrDistribution(std::ostream& out, const InteractionMatrix& matrix,
                         const GroupAssignment& assignment, const PerUserPreference& preference);

}  // namespace fairrec

#endif  // FAIRREC_BIAS_H_
