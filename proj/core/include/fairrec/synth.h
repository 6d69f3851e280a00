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

#ifndef FAIRREC_SYNTH_H_
#define FAIRREC_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fairrec/corpus.h"

namespace fairrec {

// Parameters of a synthetic Last.fm-like corpus.
//
// Each user belongs to a gender group and listens to `density * n_artists`
// artists on average (scaled per user by a factor in
// [1 - activity_spread, 1 + activity_spread]). The male-artist share of a
// user's history is drawn from Beta(t k, (1 - t) k) with t the group target
// and k = pr_concentration (k = 0 puts every user on the target), then nudged
// so the group-level preference ratio lands on the target. Within a
// category, artists are picked without replacement with Zipf weights
// (rank + 1)^-skew; a larger male skew concentrates listeners on a few male
// head artists.
//
// log2(1 + plays) = base_log_plays + user offset + artist quality
//                   + gender_affinity * (user's share of the artist's category)
//                   + taste_strength * <user taste, artist style> + noise
// where tastes and styles are non-negative latent vectors.
struct SynthSpec {
  int n_male_users = 1440;
  int n_female_users = 560;
  int n_male_artists = 820;
  int n_female_artists = 180;
  // Target PR(group, MaleArtists); PR(group, FemaleArtists) is 1 - target.
  double pr_male_users_male = 0.85;
  double pr_female_users_male = 0.72;
  double pr_concentration = 1.5;
  double density = 0.05;
  double activity_spread = 0.5;
  double male_popularity_skew = 2.0;
  double female_popularity_skew = 0.3;
  // Log-normal sd of per-(user, artist) selection weights around the Zipf
  // weights; 0 makes every user follow the global popularity order.
  double selection_noise = 3.5;
  int latent_dims = 4;
  double base_log_plays = 0.0;
  double user_offset_sd = 0.2;
  double quality_sd = 0.3;
  double gender_affinity = 2.5;
  double taste_strength = 1.5;
  double noise_sd = 0.3;
  std::uint64_t seed = 7;

  // Throws PipelineError("synth") for out-of-range values or an infeasible
  // target (the message carries the feasible PR range).
  void Validate() const;
};

struct SynthCorpus {
  std::vector<ListeningRecord> records;
  std::map<std::string, UserProfile> profiles;
  GenderMap genders;
  // Realized group-level PR(group, MaleArtists) over the emitted entries.
  double realized_pr_male_users_male = 0.0;
  double realized_pr_female_users_male = 0.0;
};

SynthCorpus GenerateSynthetic(const SynthSpec& spec);

struct SynthFiles {
  std::filesystem::path events;
  std::filesystem::path profiles;
  std::filesystem::path gender_map;
};

// Writes events.tsv (LFM-360k events), profiles.tsv (LFM-360k profiles) and
// gender_map.tsv into `dir` (created if needed).
SynthFiles WriteSynthetic(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace fairrec

#endif  // FAIRREC_SYNTH_H_
