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

#ifndef FAIRREC_TOOLS_MUSICBRAINZ_H_
#define FAIRREC_TOOLS_MUSICBRAINZ_H_

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairrec/corpus.h"

namespace fairrec::tools {

// Blocks so that consecutive Acquire() calls are at least `interval` apart.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(std::chrono::milliseconds interval = std::chrono::milliseconds(1000))
      : interval_(interval) {}

  void Acquire();
  std::chrono::milliseconds interval() const { return interval_; }

 private:
  std::chrono::milliseconds interval_;
  std::optional<Clock::time_point> last_;
};

struct ArtistLookup {
  std::string type;  // "Person", "Group", ...
  Gender gender = Gender::kUndefined;
  std::vector<std::string> member_ids;
};

// Maps the MusicBrainz gender string ("Male", "Female", "Other",
// "Not applicable", null) to Gender.
Gender GenderFromMusicBrainz(const std::optional<std::string>& text);

// Parses a `/ws/2/artist/<mbid>?inc=artist-rels&fmt=json` response.
ArtistLookup ParseArtistJson(const std::string& body);

struct FetchOptions {
  std::string base_url = "https://musicbrainz.org";
  std::string user_agent = "fairrec/0.1 ( fairrec@example.org )";
  std::chrono::milliseconds interval = std::chrono::milliseconds(1000);
  int timeout_seconds = 30;
};

struct FetchReport {
  std::size_t requests = 0;
  std::vector<std::string> failures;  // "mbid: reason"
};

// Resolves every artist: persons by their own gender, groups by a vote over
// their members' genders. Issues at most one request per `interval`.
// `progress`, when set, is called after every request.
GenderMap FetchGenders(const std::vector<std::string>& artist_ids, const FetchOptions& options,
                       FetchReport* report = nullptr,
                       const std::function<void(std::size_t)>& progress = {});

}  // namespace fairrec::tools

#endif  // FAIRREC_TOOLS_MUSICBRAINZ_H_
