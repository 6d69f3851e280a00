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

#include "musicbrainz.h"

#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace fairrec::tools {

void RateLimiter::Acquire() {
  const auto now = Clock::now();
  if (last_ && now < *last_ + interval_) {
    std::this_thread::sleep_until(*last_ + interval_);
  }
  last_ = Clock::now();
}

Gender GenderFromMusicBrainz(const std::optional<std::string>& text) {
  if (!text) return Gender::kUndefined;
  if (*text == "Male") return Gender::kMale;
  if (*text == "Female") return Gender::kFemale;
  if (*text == "Other" || *text == "Non-binary") return Gender::kOther;
  if (*text == "Not applicable") return Gender::kNotApplicable;
  return Gender::kUndefined;
}

ArtistLookup ParseArtistJson(const std::string& body) {
  const auto json = nlohmann::json::parse(body);
  ArtistLookup out;
  if (json.contains("type") && json["type"].is_string()) out.type = json["type"].get<std::string>();
  std::optional<std::string> gender;
  if (json.contains("gender") && json["gender"].is_string()) gender = json["gender"].get<std::string>();
  out.gender = GenderFromMusicBrainz(gender);
  if (json.contains("relations") && json["relations"].is_array()) {
    for (const auto& rel : json["relations"]) {
      if (rel.value("type", "") != "member of band") continue;
      if (rel.value("direction", "") != "backward") continue;
      if (!rel.contains("artist") || !rel["artist"].contains("id")) continue;
      out.member_ids.push_back(rel["artist"]["id"].get<std::string>());
    }
  }
  return out;
}

namespace {

class Fetcher {
 public:
  explicit Fetcher(const FetchOptions& options, FetchReport* report,
                   const std::function<void(std::size_t)>& progress)
      : options_(options), client_(options.base_url), limiter_(options.interval),
        report_(report), progress_(progress) {
    client_.set_connection_timeout(options.timeout_seconds, 0);
    client_.set_read_timeout(options.timeout_seconds, 0);
    client_.set_follow_location(true);
  }

  std::optional<ArtistLookup> Lookup(const std::string& mbid) {
    if (const auto it = cache_.find(mbid); it != cache_.end()) return it->second;
    limiter_.Acquire();
    ++requests_;
    if (report_) report_->requests = requests_;
    const std::string path = "/ws/2/artist/" + mbid + "?inc=artist-rels&fmt=json";
    const httplib::Headers headers = {{"User-Agent", options_.user_agent},
                                      {"Accept", "application/json"}};
    auto res = client_.Get(path, headers);
    if (progress_) progress_(requests_);
    std::optional<ArtistLookup> parsed;
    if (!res) {
      Fail(mbid, "request failed: " + httplib::to_string(res.error()));
    } else if (res->status != 200) {
      Fail(mbid, "HTTP " + std::to_string(res->status));
    } else {
      try {
        parsed = ParseArtistJson(res->body);
      } catch (const std::exception& e) {
        Fail(mbid, std::string("bad JSON: ") + e.what());
      }
    }
    cache_[mbid] = parsed;
    return parsed;
  }

 private:
  void Fail(const std::string& mbid, const std::string& reason) {
    if (report_) report_->failures.push_back(mbid + ": " + reason);
  }

  FetchOptions options_;
  httplib::Client client_;
  RateLimiter limiter_;
  FetchReport* report_;
  std::function<void(std::size_t)> progress_;
  std::map<std::string, std::optional<ArtistLookup>> cache_;
  std::size_t requests_ = 0;
};

}  // namespace

GenderMap FetchGenders(const std::vector<std::string>& artist_ids, const FetchOptions& options,
                       FetchReport* report, const std::function<void(std::size_t)>& progress) {
  Fetcher fetcher(options, report, progress);
  std::map<std::string, std::vector<Gender>> members_by_artist;
  std::vector<std::string> unresolved;
  for (const auto& id : artist_ids) {
    const auto artist = fetcher.Lookup(id);
    if (!artist) {
      unresolved.push_back(id);
      continue;
    }
    if (artist->type != "Group") {
      members_by_artist[id] = {artist->gender};
      continue;
    }
    std::vector<Gender> genders;
    for (const auto& member : artist->member_ids) {
      const auto m = fetcher.Lookup(member);
      genders.push_back(m ? m->gender : Gender::kUndefined);
    }
    if (genders.empty()) {
      unresolved.push_back(id);
    } else {
      members_by_artist[id] = std::move(genders);
    }
  }
  GenderMap map = GenderMapFromMembership(members_by_artist);
  for (const auto& id : unresolved) map.Set(id, Gender::kUndefined);
  return map;
}

}  // namespace fairrec::tools
