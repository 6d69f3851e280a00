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
#include <sstream>

#include "fairrec/corpus.h"
#include "fairrec/error.h"

namespace fairrec {

void FilterPolicy::Validate() const {
  if (min_unique_artists_per_user < 0 || min_users_per_artist < 0) {
    throw std::invalid_argument("FilterPolicy: thresholds must be >= 0");
  }
  if (!(max_unknown_gender_fraction >= 0.0 && max_unknown_gender_fraction <= 1.0)) {
    throw std::invalid_argument("FilterPolicy: max_unknown_gender_fraction must be in [0, 1]");
  }
}

std::string FilterReport::Describe() const {
  std::ostringstream os;
  for (const auto& s : stages) {
    os << s.stage << ": users=" << s.users << " artists=" << s.artists
       << " records=" << s.records << '\n';
  }
  os << "threshold violations after gender stages: users=" << users_below_threshold
     << " artists=" << artists_below_threshold << '\n';
  return os.str();
}

namespace {

// Index-based working state over the raw records.
class FilterState {
 public:
  FilterState(const std::vector<ListeningRecord>& records) : records_(records) {
    for (const auto& r : records) {
      users_.push_back(r.user_id);
      artists_.push_back(r.artist_id);
    }
    SortUnique(users_);
    SortUnique(artists_);
    user_of_.reserve(records.size());
    artist_of_.reserve(records.size());
    for (const auto& r : records) {
      user_of_.push_back(IndexOf(users_, r.user_id));
      artist_of_.push_back(IndexOf(artists_, r.artist_id));
    }
    user_alive_.assign(users_.size(), true);
    artist_alive_.assign(artists_.size(), true);
  }

  bool RecordAlive(std::size_t k) const {
    return user_alive_[user_of_[k]] && artist_alive_[artist_of_[k]];
  }

  // Alternating threshold pruning until nothing changes.
  void PruneToFixedPoint(int min_artists, int min_users) {
    for (;;) {
      bool changed = DropUsersBelow(min_artists);
      changed = DropArtistsBelow(min_users) || changed;
      if (!changed) return;
    }
  }

  bool DropUsersBelow(int min_artists) {
    const auto degree = UserDegrees();
    bool changed = false;
    for (std::size_t u = 0; u < users_.size(); ++u) {
      if (user_alive_[u] && degree[u] < static_cast<std::size_t>(min_artists)) {
        user_alive_[u] = false;
        changed = true;
      }
    }
    return changed;
  }

  bool DropArtistsBelow(int min_users) {
    const auto degree = ArtistDegrees();
    bool changed = false;
    for (std::size_t a = 0; a < artists_.size(); ++a) {
      if (artist_alive_[a] && degree[a] < static_cast<std::size_t>(min_users)) {
        artist_alive_[a] = false;
        changed = true;
      }
    }
    return changed;
  }

  std::size_t CountUsersBelow(int min_artists) const {
    const auto degree = UserDegrees();
    std::size_t n = 0;
    for (std::size_t u = 0; u < users_.size(); ++u)
      if (user_alive_[u] && degree[u] > 0 && degree[u] < static_cast<std::size_t>(min_artists)) ++n;
    return n;
  }

  std::size_t CountArtistsBelow(int min_users) const {
    const auto degree = ArtistDegrees();
    std::size_t n = 0;
    for (std::size_t a = 0; a < artists_.size(); ++a)
      if (artist_alive_[a] && degree[a] > 0 && degree[a] < static_cast<std::size_t>(min_users)) ++n;
    return n;
  }

  void DropUsersWithUnknownArtists(const GenderMap& genders, double max_fraction,
                                   UnknownGenderBasis basis) {
    std::vector<double> unknown(users_.size(), 0.0), total(users_.size(), 0.0);
    for (std::size_t k = 0; k < records_.size(); ++k) {
      if (!RecordAlive(k)) continue;
      const double w = basis == UnknownGenderBasis::kUniqueArtists
                           ? 1.0
                           : static_cast<double>(records_[k].playcount);
      total[user_of_[k]] += w;
      if (!IsBinary(genders.Lookup(artists_[artist_of_[k]]))) unknown[user_of_[k]] += w;
    }
    for (std::size_t u = 0; u < users_.size(); ++u) {
      if (user_alive_[u] && total[u] > 0 && unknown[u] / total[u] > max_fraction) {
        user_alive_[u] = false;
      }
    }
  }

  void DropNonBinaryArtists(const GenderMap& genders) {
    for (std::size_t a = 0; a < artists_.size(); ++a) {
      if (!IsBinary(genders.Lookup(artists_[a]))) artist_alive_[a] = false;
    }
  }

  void DropNonBinaryUsers(const std::map<std::string, UserProfile>& profiles) {
    for (std::size_t u = 0; u < users_.size(); ++u) {
      const auto it = profiles.find(users_[u]);
      if (it == profiles.end() || !IsBinary(it->second.gender)) user_alive_[u] = false;
    }
  }

  FilterStageCounts Counts(std::string stage) const {
    FilterStageCounts c{std::move(stage), 0, 0, 0};
    const auto ud = UserDegrees();
    const auto ad = ArtistDegrees();
    c.users = static_cast<std::size_t>(std::count_if(ud.begin(), ud.end(), [](auto d) { return d > 0; }));
    c.artists = static_cast<std::size_t>(std::count_if(ad.begin(), ad.end(), [](auto d) { return d > 0; }));
    for (std::size_t k = 0; k < records_.size(); ++k) c.records += RecordAlive(k) ? 1 : 0;
    return c;
  }

  FilteredCorpus Build(const std::map<std::string, UserProfile>& profiles,
                       const GenderMap& genders) const {
    FilteredCorpus corpus;
    for (std::size_t k = 0; k < records_.size(); ++k) {
      if (!RecordAlive(k)) continue;
      const auto& r = records_[k];
      corpus.records.push_back(r);
      corpus.popularity[r.artist_id] += r.playcount;
      if (!corpus.user_profiles.contains(r.user_id)) {
        corpus.user_profiles.emplace(r.user_id, profiles.at(r.user_id));
      }
      corpus.artist_genders.emplace(r.artist_id, genders.Lookup(r.artist_id));
    }
    std::sort(corpus.records.begin(), corpus.records.end());
    return corpus;
  }

 private:
  static void SortUnique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  static std::size_t IndexOf(const std::vector<std::string>& sorted, const std::string& key) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), key) -
                                    sorted.begin());
  }

  std::vector<std::size_t> UserDegrees() const {
    std::vector<std::size_t> degree(users_.size(), 0);
    for (std::size_t k = 0; k < records_.size(); ++k)
      if (RecordAlive(k)) ++degree[user_of_[k]];
    return degree;
  }

  std::vector<std::size_t> ArtistDegrees() const {
    std::vector<std::size_t> degree(artists_.size(), 0);
    for (std::size_t k = 0; k < records_.size(); ++k)
      if (RecordAlive(k)) ++degree[artist_of_[k]];
    return degree;
  }

  const std::vector<ListeningRecord>& records_;
  std::vector<std::string> users_;
  std::vector<std::string> artists_;
  std::vector<std::size_t> user_of_;
  std::vector<std::size_t> artist_of_;
  std::vector<bool> user_alive_;
  std::vector<bool> artist_alive_;
};

}  // namespace

FilterResult ApplyFilters(const std::vector<ListeningRecord>& raw_records,
                          const std::map<std::string, UserProfile>& profiles,
                          const GenderMap& genders, const FilterPolicy& policy) {
  policy.Validate();
  // Degree counting assumes one record per (user, artist).
  const std::vector<ListeningRecord> records = AggregateRecords(raw_records);
  FilterState state(records);
  FilterReport report;
  report.stages.push_back(state.Counts("input"));

  state.PruneToFixedPoint(policy.min_unique_artists_per_user, policy.min_users_per_artist);
  report.stages.push_back(state.Counts("1-interaction-thresholds"));

  state.DropUsersWithUnknownArtists(genders, policy.max_unknown_gender_fraction,
                                    policy.unknown_basis);
  report.stages.push_back(state.Counts("2-unknown-gender-fraction"));

  state.DropNonBinaryArtists(genders);
  report.stages.push_back(state.Counts("3-binary-artists"));

  state.DropNonBinaryUsers(profiles);
  report.stages.push_back(state.Counts("4-binary-users"));

  report.users_below_threshold = state.CountUsersBelow(policy.min_unique_artists_per_user);
  report.artists_below_threshold = state.CountArtistsBelow(policy.min_users_per_artist);
  if (policy.reenforce_thresholds) {
    state.PruneToFixedPoint(policy.min_unique_artists_per_user, policy.min_users_per_artist);
  }
  report.stages.push_back(state.Counts("5-reverify"));

  if (report.stages.back().records == 0) {
    throw PipelineError("filter", "corpus is empty after filtering\n" + report.Describe());
  }
  return FilterResult{state.Build(profiles, genders), std::move(report)};
}

FilterResult ApplyFilters(const FilteredCorpus& corpus, const FilterPolicy& policy) {
  GenderMap genders;
  for (const auto& [id, g] : corpus.artist_genders) genders.Set(id, g);
  return ApplyFilters(corpus.records, corpus.user_profiles, genders, policy);
}

}  // namespace fairrec
