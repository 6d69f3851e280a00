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

#include "fairrec/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "fairrec/tsv.h"

namespace fairrec {

void SynthSpec::Validate() const {
  auto fail = [](const std::string& what) { throw PipelineError("synth", what); };
  if (n_male_users < 0 || n_female_users < 0 || n_male_users + n_female_users == 0)
    fail("need at least one user");
  if (n_male_artists < 1 || n_female_artists < 1) fail("need at least one artist per category");
  for (double t : {pr_male_users_male, pr_female_users_male}) {
    if (!(t > 0.0 && t < 1.0)) fail("PR targets must lie in (0, 1)");
  }
  if (!(density > 0.0 && density <= 1.0)) fail("density must lie in (0, 1]");
  if (!(activity_spread >= 0.0 && activity_spread < 1.0)) fail("activity_spread must lie in [0, 1)");
  if (!(pr_concentration >= 0.0)) fail("pr_concentration must be >= 0");
  if (latent_dims < 1) fail("latent_dims must be >= 1");
  if (!(male_popularity_skew >= 0.0 && female_popularity_skew >= 0.0)) fail("skews must be >= 0");
  if (!(selection_noise >= 0.0)) fail("selection_noise must be >= 0");
}

namespace {

std::string PaddedId(char prefix, std::size_t value, std::size_t width) {
  std::string digits = std::to_string(value);
  return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

// Efraimidis-Spirakis weighted sampling without replacement.
std::vector<std::size_t> WeightedSample(const std::vector<double>& weights, std::size_t k,
                                        RandomStream& rng) {
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double u;
    do {
      u = rng.Uniform01();
    } while (u <= 0.0);
    keys.emplace_back(std::log(u) / weights[i], i);
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < k; ++j) out.push_back(keys[j].second);
  return out;
}

std::vector<double> ZipfWeights(int n, double skew) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) w[static_cast<std::size_t>(r)] = std::pow(r + 1.0, -skew);
  return w;
}

std::vector<double> LatentVector(int dims, RandomStream& rng) {
  std::vector<double> v(static_cast<std::size_t>(dims));
  double total = 0.0;
  for (auto& x : v) {
    x = rng.Gamma(0.5);
    total += x;
  }
  for (auto& x : v) x = total > 0.0 ? x / total : 1.0 / dims;
  return v;
}

struct SynthUser {
  bool male = true;
  std::size_t entries = 0;
  std::size_t male_entries = 0;
  std::size_t lo = 0;  // feasible male_entries range
  std::size_t hi = 0;
};

}  // namespace

SynthCorpus GenerateSynthetic(const SynthSpec& spec) {
  spec.Validate();
  const auto n_users = static_cast<std::size_t>(spec.n_male_users + spec.n_female_users);
  const auto n_ma = static_cast<std::size_t>(spec.n_male_artists);
  const auto n_fa = static_cast<std::size_t>(spec.n_female_artists);
  const std::size_t n_artists = n_ma + n_fa;

  // Artist ids are a random permutation so that id order (the ranking
  // tie-break) carries no gender signal. Male artists occupy slots [0, n_ma).
  RandomStream id_rng(spec.seed, {"synth", "artist-ids"});
  const auto artist_perm = SampleWithoutReplacement(n_artists, n_artists, id_rng);
  const std::size_t artist_width = std::to_string(n_artists).size();
  std::vector<std::string> artist_ids(n_artists);
  for (std::size_t a = 0; a < n_artists; ++a) artist_ids[a] = PaddedId('a', artist_perm[a], artist_width);

  RandomStream user_id_rng(spec.seed, {"synth", "user-ids"});
  const auto user_perm = SampleWithoutReplacement(n_users, n_users, user_id_rng);
  const std::size_t user_width = std::to_string(n_users).size();

  // Per-user activity and male share.
  std::vector<SynthUser> users(n_users);
  RandomStream mix_rng(spec.seed, {"synth", "mix"});
  for (std::size_t u = 0; u < n_users; ++u) {
    auto& su = users[u];
    su.male = u < static_cast<std::size_t>(spec.n_male_users);
    const double target = su.male ? spec.pr_male_users_male : spec.pr_female_users_male;
    const double scale = 1.0 + spec.activity_spread * (2.0 * mix_rng.Uniform01() - 1.0);
    const double expected = spec.density * static_cast<double>(n_artists) * scale;
    su.entries = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(expected)), 1, n_artists);
    if (spec.density >= 1.0) su.entries = n_artists;
    const double share =
        spec.pr_concentration > 0.0
            ? mix_rng.Beta(target * spec.pr_concentration, (1.0 - target) * spec.pr_concentration)
            : target;
    su.lo = su.entries > n_fa ? su.entries - n_fa : 0;
    su.hi = std::min(su.entries, n_ma);
    su.male_entries = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(share * static_cast<double>(su.entries))), su.lo, su.hi);
  }

  // Nudge each group onto its target.
  for (bool male : {true, false}) {
    const double target = male ? spec.pr_male_users_male : spec.pr_female_users_male;
    std::vector<std::size_t> members;
    std::size_t total = 0, lo = 0, hi = 0, current = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
      if (users[u].male != male) continue;
      members.push_back(u);
      total += users[u].entries;
      lo += users[u].lo;
      hi += users[u].hi;
      current += users[u].male_entries;
    }
    if (members.empty()) continue;
    const auto wanted = static_cast<std::size_t>(std::llround(target * static_cast<double>(total)));
    if (wanted < lo || wanted > hi) {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "infeasible PR target %.4f for %s users: feasible range is [%.4f, %.4f] at "
                    "density %.4f",
                    target, male ? "male" : "female", static_cast<double>(lo) / total,
                    static_cast<double>(hi) / total, spec.density);
      throw PipelineError("synth", buf);
    }
    RandomStream nudge_rng(spec.seed, {"synth", "nudge", male ? "male" : "female"});
    while (current != wanted) {
      const std::size_t u = members[nudge_rng.UniformBelow(members.size())];
      auto& su = users[u];
      if (current < wanted && su.male_entries < su.hi) {
        ++su.male_entries;
        ++current;
      } else if (current > wanted && su.male_entries > su.lo) {
        --su.male_entries;
        --current;
      }
    }
  }

  // Artist-side latent state.
  const auto male_weights = ZipfWeights(spec.n_male_artists, spec.male_popularity_skew);
  const auto female_weights = ZipfWeights(spec.n_female_artists, spec.female_popularity_skew);
  RandomStream artist_rng(spec.seed, {"synth", "artists"});
  std::vector<double> quality(n_artists);
  std::vector<std::vector<double>> style(n_artists);
  for (std::size_t a = 0; a < n_artists; ++a) {
    quality[a] = spec.quality_sd * artist_rng.Normal();
    style[a] = LatentVector(spec.latent_dims, artist_rng);
  }

  SynthCorpus out;
  std::size_t male_total = 0, male_in_male = 0, female_total = 0, female_in_male = 0;
  for (std::size_t u = 0; u < n_users; ++u) {
    const auto& su = users[u];
    const std::string user_id = PaddedId('u', user_perm[u], user_width);
    RandomStream rng(spec.seed, {"synth", "user", user_id});
    const double offset = spec.user_offset_sd * rng.Normal();
    const auto taste = LatentVector(spec.latent_dims, rng);
    const double male_share = static_cast<double>(su.male_entries) / static_cast<double>(su.entries);

    auto personal = [&](const std::vector<double>& weights) {
      if (spec.selection_noise <= 0.0) return weights;
      std::vector<double> w(weights);
      for (auto& x : w) x *= std::exp(spec.selection_noise * rng.Normal());
      return w;
    };
    std::vector<std::size_t> picks = WeightedSample(personal(male_weights), su.male_entries, rng);
    for (std::size_t k :
         WeightedSample(personal(female_weights), su.entries - su.male_entries, rng)) {
      picks.push_back(n_ma + k);
    }
    for (std::size_t a : picks) {
      const bool male_artist = a < n_ma;
      double affinity = 0.0;
      for (int d = 0; d < spec.latent_dims; ++d) {
        affinity += taste[static_cast<std::size_t>(d)] * style[a][static_cast<std::size_t>(d)];
      }
      const double log_plays = spec.base_log_plays + offset + quality[a] +
                               spec.gender_affinity * (male_artist ? male_share : 1.0 - male_share) +
                               spec.taste_strength * affinity + spec.noise_sd * rng.Normal();
      const auto plays = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(std::llround(std::exp2(std::min(log_plays, 40.0)) - 1.0)));
      out.records.push_back({user_id, artist_ids[a], plays});
    }
    (su.male ? male_total : female_total) += su.entries;
    (su.male ? male_in_male : female_in_male) += su.male_entries;

    UserProfile profile;
    profile.user_id = user_id;
    profile.gender = su.male ? Gender::kMale : Gender::kFemale;
    out.profiles.emplace(user_id, std::move(profile));
  }
  std::sort(out.records.begin(), out.records.end());
  for (std::size_t a = 0; a < n_artists; ++a) {
    out.genders.Set(artist_ids[a], a < n_ma ? Gender::kMale : Gender::kFemale);
  }
  out.realized_pr_male_users_male =
      male_total > 0 ? static_cast<double>(male_in_male) / static_cast<double>(male_total) : 0.0;
  out.realized_pr_female_users_male =
      female_total > 0 ? static_cast<double>(female_in_male) / static_cast<double>(female_total) : 0.0;
  return out;
}

SynthFiles WriteSynthetic(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw PipelineError("synth", "cannot create '" + dir.string() + "': " + ec.message());
  SynthFiles files{dir / "events.tsv", dir / "profiles.tsv", dir / "gender_map.tsv"};
  {
    auto out = OpenForWrite(files.events, "synth");
    WriteLfm360kEvents(out, corpus.records);
  }
  {
    auto out = OpenForWrite(files.profiles, "synth");
    WriteLfm360kProfiles(out, corpus.profiles);
  }
  {
    auto out = OpenForWrite(files.gender_map, "synth");
    WriteGenderMap(out, corpus.genders);
  }
  return files;
}

}  // namespace fairrec
