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

#ifndef FAIRREC_CORPUS_H_
#define FAIRREC_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fairrec {

// MusicBrainz-style gender categories.
enum class Gender { kMale, kFemale, kOther, kNotApplicable, kUndefined };

// Lowercase TSV spelling: "male", "female", "other", "n/a", "undef".
std::string_view GenderName(Gender gender);
// Accepts the TSV spelling (case-insensitive). Returns nullopt otherwise.
std::optional<Gender> ParseGenderName(std::string_view text);
// Last.fm profile codes: m/f map to Male/Female; n, empty or anything else
// maps to Undefined.
Gender GenderFromProfileCode(std::string_view code);

inline bool IsBinary(Gender g) { return g == Gender::kMale || g == Gender::kFemale; }

struct ListeningRecord {
  std::string user_id;
  std::string artist_id;
  std::int64_t playcount = 0;

  friend bool operator==(const ListeningRecord&, const ListeningRecord&) = default;
  friend auto operator<=>(const ListeningRecord&, const ListeningRecord&) = default;
};

struct UserProfile {
  std::string user_id;
  Gender gender = Gender::kUndefined;
  std::optional<std::string> country;
  std::optional<int> age;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// A recoverable input problem: the offending line was skipped.
struct ParseIssue {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct ParsedDataset {
  // One record per (user, artist), sorted by (user_id, artist_id).
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  std::vector<ParseIssue> issues;
  std::size_t event_lines = 0;
  std::size_t dropped_missing_artist_id = 0;
};

// LFM-360k: events `user \t artist_mbid \t artist_name \t plays`, profiles
// `user \t gender \t age \t country \t signup`. Lines with an empty artist
// MBID are dropped (counted, not reported as issues). Duplicate
// (user, artist) lines are summed.
ParsedDataset ParseLfm360k(const std::filesystem::path& events_path,
                           const std::filesystem::path& profile_path);

// LFM-1b: events `user \t artist \t album \t track \t timestamp`; the
// playcount of (user, artist) is the number of event lines. The users file is
// tab separated; when its first line names a `gender` column that column is
// used, otherwise the LFM-1b layout (user_id, country, age, gender, ...) is
// assumed.
ParsedDataset ParseLfm1b(const std::filesystem::path& events_path,
                         const std::filesystem::path& users_path);

// Serializes records in LFM-360k event format (artist name column left
// empty) and profiles in LFM-360k profile format.
void WriteLfm360kEvents(std::ostream& out, const std::vector<ListeningRecord>& records);
void WriteLfm360kProfiles(std::ostream& out, const std::map<std::string, UserProfile>& profiles);

// Sums duplicate (user, artist) pairs and sorts by (user_id, artist_id).
std::vector<ListeningRecord> AggregateRecords(std::vector<ListeningRecord> records);

// ---------------------------------------------------------------------------
// Gender resolution.

// A band whose member vote ends in a tie.
struct Discard {
  friend bool operator==(Discard, Discard) = default;
};
using BandGender = std::variant<Gender, Discard>;

// Strict-majority vote over member genders. NotApplicable/Undefined members
// are ignored; Male/Female/Other are counted. A tie between the leading
// counts yields Discard; no countable member yields Undefined. Throws
// std::invalid_argument on an empty member list.
BandGender ResolveBandGender(const std::vector<Gender>& member_genders);

struct GenderMapEntry {
  Gender gender = Gender::kUndefined;
  // Member counts (male, female, other) when the map carries them.
  std::optional<std::array<int, 3>> member_counts;
};

struct GenderMapReport {
  std::size_t total = 0;
  std::map<Gender, std::size_t> per_label;
  // Entries that are not Male/Female/Other.
  std::size_t unresolved = 0;
  std::vector<ParseIssue> issues;
};

class GenderMap {
 public:
  GenderMap() = default;

  void Set(std::string artist_id, Gender gender,
           std::optional<std::array<int, 3>> member_counts = std::nullopt);
  // Artists absent from the map are Undefined.
  Gender Lookup(std::string_view artist_id) const;
  bool Contains(std::string_view artist_id) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, GenderMapEntry, std::less<>>& entries() const { return entries_; }

  GenderMapReport Report() const;

  // Fraction of `artist_ids` whose gender is Male, Female or Other.
  double Coverage(const std::vector<std::string>& artist_ids) const;

 private:
  std::map<std::string, GenderMapEntry, std::less<>> entries_;
};

struct LoadedGenderMap {
  GenderMap map;
  GenderMapReport report;
};

// Reads `artist_id \t gender [\t n_male \t n_female \t n_other]`. Unknown
// gender strings are recorded as issues and stored as Undefined.
LoadedGenderMap LoadGenderMap(const std::filesystem::path& path);
void WriteGenderMap(std::ostream& out, const GenderMap& map);

// Builds a gender map from band membership rows `artist_id \t member_gender`
// (one row per member) plus optional solo rows already resolved. Tied bands
// are written as Undefined with their member counts so the tie stays visible.
GenderMap GenderMapFromMembership(
    const std::map<std::string, std::vector<Gender>>& members_by_artist);

// ---------------------------------------------------------------------------
// Filtering.

enum class UnknownGenderBasis { kUniqueArtists, kPlaycountMass };

struct FilterPolicy {
  int min_unique_artists_per_user = 10;
  int min_users_per_artist = 10;
  double max_unknown_gender_fraction = 0.25;
  UnknownGenderBasis unknown_basis = UnknownGenderBasis::kUniqueArtists;
  // Restore the interaction-threshold fixed point after the gender stages.
  bool reenforce_thresholds = true;

  void Validate() const;
};

struct FilterStageCounts {
  std::string stage;
  std::size_t users = 0;
  std::size_t artists = 0;
  std::size_t records = 0;
};

struct FilterReport {
  std::vector<FilterStageCounts> stages;
  // Threshold violations found after the gender stages (before re-enforcement).
  std::size_t users_below_threshold = 0;
  std::size_t artists_below_threshold = 0;

  std::string Describe() const;
};

struct FilteredCorpus {
  std::vector<ListeningRecord> records;  // sorted by (user_id, artist_id)
  std::map<std::string, UserProfile> user_profiles;
  std::map<std::string, Gender> artist_genders;
  std::map<std::string, std::int64_t> popularity;  // total playcount

  friend bool operator==(const FilteredCorpus&, const FilteredCorpus&) = default;
};

struct FilterResult {
  FilteredCorpus corpus;
  FilterReport report;
};

// Runs the filtering pipeline:
//   1. drop users below min_unique_artists_per_user and artists below
//      min_users_per_artist, alternating until a fixed point;
//   2. drop users whose history has more than max_unknown_gender_fraction
//      artists that are not Male/Female;
//   3. drop artists that are not Male/Female, with their records;
//   4. drop users whose profile gender is not Male/Female (or who have no
//      profile);
//   5. count threshold violations introduced by 2-4 and, when
//      reenforce_thresholds is set, rerun step 1.
// Throws PipelineError("filter") with per-stage counts when nothing survives.
FilterResult ApplyFilters(const std::vector<ListeningRecord>& records,
                          const std::map<std::string, UserProfile>& profiles,
                          const GenderMap& genders, const FilterPolicy& policy);

// Convenience overload: treats a filtered corpus as raw input.
FilterResult ApplyFilters(const FilteredCorpus& corpus, const FilterPolicy& policy);

}  // namespace fairrec

#endif  // FAIRREC_CORPUS_H_
