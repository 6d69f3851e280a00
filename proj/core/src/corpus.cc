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
#include <cctype>
#include <string>
#include <unordered_map>

#include "fairrec/corpus.h"
#include "fairrec/error.h"
#include "fairrec/tsv.h"

namespace fairrec {

namespace {

std::string Lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    const std::size_t h1 = std::hash<std::string>{}(p.first);
    const std::size_t h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
  }
};

using PairCounts =
    std::unordered_map<std::pair<std::string, std::string>, std::int64_t, PairHash>;

std::vector<ListeningRecord> Flatten(PairCounts counts) {
  std::vector<ListeningRecord> records;
  records.reserve(counts.size());
  for (auto& [key, plays] : counts) records.push_back({key.first, key.second, plays});
  std::sort(records.begin(), records.end());
  return records;
}

void AddProfile(ParsedDataset& data, const std::filesystem::path& path, std::size_t line,
                UserProfile profile) {
  if (profile.user_id.empty()) {
    data.issues.push_back({path.string(), line, "empty user id"});
    return;
  }
  if (data.profiles.contains(profile.user_id)) {
    data.issues.push_back({path.string(), line, "duplicate profile for user '" +
                                                     profile.user_id + "'"});
    return;
  }
  std::string key = profile.user_id;
  data.profiles.emplace(std::move(key), std::move(profile));
}

std::optional<int> OptionalAge(std::string_view text) {
  const auto v = ParseInt(text);
  if (!v || *v < 0 || *v > 200) return std::nullopt;
  return static_cast<int>(*v);
}

std::optional<std::string> OptionalText(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return std::nullopt;
  return std::string(text);
}

}  // namespace

std::string_view GenderName(Gender gender) {
  switch (gender) {
    case Gender::kMale:
      return "male";
    case Gender::kFemale:
      return "female";
    case Gender::kOther:
      return "other";
    case Gender::kNotApplicable:
      return "n/a";
    case Gender::kUndefined:
      return "undef";
  }
  return "undef";
}

std::optional<Gender> ParseGenderName(std::string_view text) {
  const std::string s = Lower(Trim(text));
  if (s == "male") return Gender::kMale;
  if (s == "female") return Gender::kFemale;
  if (s == "other") return Gender::kOther;
  if (s == "n/a" || s == "not applicable") return Gender::kNotApplicable;
  if (s == "undef" || s == "undefined") return Gender::kUndefined;
  return std::nullopt;
}

Gender GenderFromProfileCode(std::string_view code) {
  const std::string s = Lower(Trim(code));
  if (s == "m" || s == "male") return Gender::kMale;
  if (s == "f" || s == "female") return Gender::kFemale;
  return Gender::kUndefined;
}

std::vector<ListeningRecord> AggregateRecords(std::vector<ListeningRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.user_id, a.artist_id) < std::tie(b.user_id, b.artist_id);
  });
  std::vector<ListeningRecord> out;
  for (auto& r : records) {
    if (!out.empty() && out.back().user_id == r.user_id && out.back().artist_id == r.artist_id) {
      out.back().playcount += r.playcount;
    } else {
      out.push_back(std::move(r));
    }
  }
  return out;
}

ParsedDataset ParseLfm360k(const std::filesystem::path& events_path,
                           const std::filesystem::path& profile_path) {
  ParsedDataset data;
  PairCounts counts;
  ForEachLine(events_path, "ingest", [&](std::size_t line, std::string_view text) {
    if (Trim(text).empty()) return;
    ++data.event_lines;
    const auto fields = SplitTabs(text);
    if (fields.size() != 4) {
      data.issues.push_back({events_path.string(), line,
                             "expected 4 fields, found " + std::to_string(fields.size())});
      return;
    }
    const std::string_view user = Trim(fields[0]);
    const std::string_view artist = Trim(fields[1]);
    const auto plays = ParseInt(fields[3]);
    if (user.empty()) {
      data.issues.push_back({events_path.string(), line, "empty user id"});
      return;
    }
    if (!plays || *plays < 1) {
      data.issues.push_back({events_path.string(), line,
                             "invalid play count '" + std::string(fields[3]) + "'"});
      return;
    }
    if (artist.empty()) {
      ++data.dropped_missing_artist_id;
      return;
    }
    counts[{std::string(user), std::string(artist)}] += *plays;
  });
  data.records = Flatten(std::move(counts));

  ForEachLine(profile_path, "ingest", [&](std::size_t line, std::string_view text) {
    if (Trim(text).empty()) return;
    const auto fields = SplitTabs(text);
    if (fields.size() < 2 || fields.size() > 5) {
      data.issues.push_back({profile_path.string(), line,
                             "expected 2-5 fields, found " + std::to_string(fields.size())});
      return;
    }
    UserProfile profile;
    profile.user_id = std::string(Trim(fields[0]));
    profile.gender = GenderFromProfileCode(fields[1]);
    if (fields.size() > 2) profile.age = OptionalAge(fields[2]);
    if (fields.size() > 3) profile.country = OptionalText(fields[3]);
    AddProfile(data, profile_path, line, std::move(profile));
  });
  return data;
}

ParsedDataset ParseLfm1b(const std::filesystem::path& events_path,
                         const std::filesystem::path& users_path) {
  ParsedDataset data;
  PairCounts counts;
  ForEachLine(events_path, "ingest", [&](std::size_t line, std::string_view text) {
    if (Trim(text).empty()) return;
    ++data.event_lines;
    const auto fields = SplitTabs(text);
    if (fields.size() != 5) {
      data.issues.push_back({events_path.string(), line,
                             "expected 5 fields, found " + std::to_string(fields.size())});
      return;
    }
    const std::string_view user = Trim(fields[0]);
    const std::string_view artist = Trim(fields[1]);
    if (user.empty() || artist.empty()) {
      data.issues.push_back({events_path.string(), line, "empty user or artist id"});
      return;
    }
    counts[{std::string(user), std::string(artist)}] += 1;
  });
  data.records = Flatten(std::move(counts));

  // LFM-1b_users.txt layout.
  std::size_t user_col = 0, country_col = 1, age_col = 2, gender_col = 3;
  std::size_t min_fields = 4;
  ForEachLine(users_path, "ingest", [&](std::size_t line, std::string_view text) {
    if (Trim(text).empty()) return;
    const auto fields = SplitTabs(text);
    if (line == 1) {
      std::map<std::string, std::size_t> header;
      for (std::size_t i = 0; i < fields.size(); ++i) header[Lower(Trim(fields[i]))] = i;
      if (header.contains("gender")) {
        gender_col = header["gender"];
        user_col = header.contains("user_id") ? header["user_id"] : 0;
        country_col = header.contains("country") ? header["country"] : fields.size();
        age_col = header.contains("age") ? header["age"] : fields.size();
        min_fields = std::max(user_col, gender_col) + 1;
        return;
      }
    }
    if (fields.size() < min_fields) {
      data.issues.push_back({users_path.string(), line,
                             "expected at least " + std::to_string(min_fields) +
                                 " fields, found " + std::to_string(fields.size())});
      return;
    }
    UserProfile profile;
    profile.user_id = std::string(Trim(fields[user_col]));
    profile.gender = GenderFromProfileCode(fields[gender_col]);
    if (age_col < fields.size()) profile.age = OptionalAge(fields[age_col]);
    if (country_col < fields.size()) profile.country = OptionalText(fields[country_col]);
    AddProfile(data, users_path, line, std::move(profile));
  });
  return data;
}

void WriteLfm360kEvents(std::ostream& out, const std::vector<ListeningRecord>& records) {
  for (const auto& r : records) {
    out << r.user_id << '\t' << r.artist_id << '\t' << '\t' << r.playcount << '\n';
  }
}

void WriteLfm360kProfiles(std::ostream& out,
                          const std::map<std::string, UserProfile>& profiles) {
  for (const auto& [id, p] : profiles) {
    const char* code = p.gender == Gender::kMale ? "m" : p.gender == Gender::kFemale ? "f" : "";
    out << id << '\t' << code << '\t' << (p.age ? std::to_string(*p.age) : "") << '\t'
        << p.country.value_or("") << '\t' << '\n';
  }
}

}  // namespace fairrec
