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
#include <array>
#include <stdexcept>

#include "fairrec/corpus.h"
#include "fairrec/error.h"
#include "fairrec/tsv.h"

namespace fairrec {

BandGender ResolveBandGender(const std::vector<Gender>& member_genders) {
  if (member_genders.empty()) {
    throw std::invalid_argument("ResolveBandGender: no membership data");
  }
  // male, female, other
  std::array<int, 3> counts{};
  for (Gender g : member_genders) {
    switch (g) {
      case Gender::kMale:
        ++counts[0];
        break;
      case Gender::kFemale:
        ++counts[1];
        break;
      case Gender::kOther:
        ++counts[2];
        break;
      case Gender::kNotApplicable:
      case Gender::kUndefined:
        break;
    }
  }
  const int best = *std::max_element(counts.begin(), counts.end());
  if (best == 0) return Gender::kUndefined;
  if (std::count(counts.begin(), counts.end(), best) > 1) return Discard{};
  static constexpr std::array<Gender, 3> kLabels = {Gender::kMale, Gender::kFemale,
                                                    Gender::kOther};
  return kLabels[std::find(counts.begin(), counts.end(), best) - counts.begin()];
}

void GenderMap::Set(std::string artist_id, Gender gender,
                    std::optional<std::array<int, 3>> member_counts) {
  entries_[std::move(artist_id)] = GenderMapEntry{gender, member_counts};
}

Gender GenderMap::Lookup(std::string_view artist_id) const {
  const auto it = entries_.find(artist_id);
  return it == entries_.end() ? Gender::kUndefined : it->second.gender;
}

bool GenderMap::Contains(std::string_view artist_id) const {
  return entries_.find(artist_id) != entries_.end();
}

GenderMapReport GenderMap::Report() const {
  GenderMapReport report;
  report.total = entries_.size();
  for (const auto& [id, entry] : entries_) {
    ++report.per_label[entry.gender];
    if (!IsBinary(entry.gender) && entry.gender != Gender::kOther) ++report.unresolved;
  }
  return report;
}

double GenderMap::Coverage(const std::vector<std::string>& artist_ids) const {
  if (artist_ids.empty()) return 0.0;
  std::size_t known = 0;
  for (const auto& id : artist_ids) {
    const Gender g = Lookup(id);
    if (IsBinary(g) || g == Gender::kOther) ++known;
  }
  return static_cast<double>(known) / static_cast<double>(artist_ids.size());
}

LoadedGenderMap LoadGenderMap(const std::filesystem::path& path) {
  LoadedGenderMap loaded;
  std::vector<ParseIssue> issues;
  ForEachLine(path, "resolve-gender", [&](std::size_t line, std::string_view text) {
    if (Trim(text).empty() || text.front() == '#') return;
    const auto fields = SplitTabs(text);
    if (fields.size() != 2 && fields.size() != 5) {
      issues.push_back({path.string(), line,
                        "expected 2 or 5 fields, found " + std::to_string(fields.size())});
      return;
    }
    const std::string_view id = Trim(fields[0]);
    if (id.empty()) {
      issues.push_back({path.string(), line, "empty artist id"});
      return;
    }
    Gender gender = Gender::kUndefined;
    if (const auto parsed = ParseGenderName(fields[1])) {
      gender = *parsed;
    } else {
      issues.push_back({path.string(), line,
                        "unknown gender '" + std::string(fields[1]) + "', using undef"});
    }
    std::optional<std::array<int, 3>> counts;
    if (fields.size() == 5) {
      std::array<int, 3> c{};
      bool ok = true;
      for (int k = 0; k < 3; ++k) {
        const auto v = ParseInt(fields[2 + k]);
        ok = ok && v && *v >= 0;
        if (ok) c[k] = static_cast<int>(*v);
      }
      if (ok) {
        counts = c;
      } else {
        issues.push_back({path.string(), line, "invalid member counts ignored"});
      }
    }
    loaded.map.Set(std::string(id), gender, counts);
  });
  loaded.report = loaded.map.Report();
  loaded.report.issues = std::move(issues);
  return loaded;
}

void WriteGenderMap(std::ostream& out, const GenderMap& map) {
  for (const auto& [id, entry] : map.entries()) {
    out << id << '\t' << GenderName(entry.gender);
    if (entry.member_counts) {
      for (int c : *entry.member_counts) out << '\t' << c;
    }
    out << '\n';
  }
}

GenderMap GenderMapFromMembership(
    const std::map<std::string, std::vector<Gender>>& members_by_artist) {
  GenderMap map;
  for (const auto& [artist, members] : members_by_artist) {
    if (members.empty()) continue;
    std::array<int, 3> counts{};
    for (Gender g : members) {
      if (g == Gender::kMale) ++counts[0];
      if (g == Gender::kFemale) ++counts[1];
      if (g == Gender::kOther) ++counts[2];
    }
    const BandGender resolved = ResolveBandGender(members);
    const Gender gender =
        std::holds_alternative<Gender>(resolved) ? std::get<Gender>(resolved) : Gender::kUndefined;
    // Solo artists (one member) do not carry counts.
    if (members.size() > 1) {
      map.Set(artist, gender, counts);
    } else {
      map.Set(artist, gender);
    }
  }
  return map;
}

}  // namespace fairrec
