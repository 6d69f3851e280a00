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
#include <fstream>
#include <sstream>

#include "fairrec/error.h"
#include "fairrec/experiment.h"
#include "fairrec/rng.h"
#include "fairrec/tsv.h"

namespace fairrec {

namespace {

[[noreturn]] void ConfigError(const std::string& message) { throw PipelineError("config", message); }

std::string Lower(std::string_view text) {
  std::string s(Trim(text));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

long long AsInt(const std::string& key, const std::string& value) {
  const auto v = ParseInt(value);
  if (!v) ConfigError(key + ": expected an integer, got '" + value + "'");
  return *v;
}

double AsDouble(const std::string& key, const std::string& value) {
  const auto v = ParseDouble(value);
  if (!v) ConfigError(key + ": expected a number, got '" + value + "'");
  return *v;
}

bool AsBool(const std::string& key, const std::string& value) {
  const std::string s = Lower(value);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  ConfigError(key + ": expected a boolean, got '" + value + "'");
}

int AsCount(const std::string& key, const std::string& value) {
  return static_cast<int>(AsInt(key, value));
}

using Setter = void (*)(ExperimentConfig&, const std::string&, const std::string&);

struct KeySpec {
  const char* key;
  const char* help;
  Setter set;
};

const std::vector<KeySpec>& Keys() {
  static const std::vector<KeySpec> keys = {
      {"dataset", "lfm360k | lfm1b | synthetic",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "lfm360k") c.dataset = DatasetFlavor::kLfm360k;
         else if (s == "lfm1b") c.dataset = DatasetFlavor::kLfm1b;
         else if (s == "synthetic") c.dataset = DatasetFlavor::kSynthetic;
         else ConfigError(k + ": unknown dataset '" + v + "'");
       }},
      {"events", "listening events file",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.events_path = v; }},
      {"profiles", "user profile file",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.profiles_path = v; }},
      {"gender_map", "artist gender map TSV",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.gender_map_path = v; }},
      {"experiment", "whole | extreme",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "whole") c.sampling.design = SamplingDesign::kWholePopulation;
         else if (s == "extreme") c.sampling.design = SamplingDesign::kExtremePreference;
         else ConfigError(k + ": unknown experiment '" + v + "'");
       }},
      {"algorithms", "comma-separated list of MostPopular, UserItemAvg, UserKNNAvg, NMF",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         std::vector<Algorithm> algos;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           if (Trim(item).empty()) continue;
           const auto a = ParseAlgorithm(item);
           if (!a) ConfigError(k + ": unknown algorithm '" + item + "'");
           if (std::find(algos.begin(), algos.end(), *a) == algos.end()) algos.push_back(*a);
         }
         if (algos.empty()) ConfigError(k + ": empty algorithm list");
         c.algorithms = algos;
       }},
      {"candidates", "testset | catalog",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "testset") c.candidates = CandidateMode::kTestSet;
         else if (s == "catalog") c.candidates = CandidateMode::kCatalog;
         else ConfigError(k + ": unknown candidate mode '" + v + "'");
       }},
      {"seed", "master seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed = static_cast<std::uint64_t>(AsInt(k, v));
       }},
      {"out", "output directory",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      {"svg", "write SVG charts (bool)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.write_svg = AsBool(k, v); }},
      {"export_models", "directory for fitted model dumps (empty = none)",
       [](ExperimentConfig& c, const std::string&, const std::string& v) { c.model_dir = v; }},
      {"threads", "worker threads for (algorithm, fold) pairs",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.threads = AsCount(k, v); }},
      {"pr.weighted", "playcount-weighted PR instead of binary (bool)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.weighted_pr = AsBool(k, v); }},

      {"filter.min_unique_artists_per_user", "drop users below this many artists",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.filter.min_unique_artists_per_user = AsCount(k, v);
       }},
      {"filter.min_users_per_artist", "drop artists below this many listeners",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.filter.min_users_per_artist = AsCount(k, v);
       }},
      {"filter.max_unknown_gender_fraction", "drop users above this unknown-gender share",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.filter.max_unknown_gender_fraction = AsDouble(k, v);
       }},
      {"filter.unknown_basis", "artists | playcount",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "artists") c.filter.unknown_basis = UnknownGenderBasis::kUniqueArtists;
         else if (s == "playcount") c.filter.unknown_basis = UnknownGenderBasis::kPlaycountMass;
         else ConfigError(k + ": expected artists or playcount");
       }},
      {"filter.reenforce_thresholds", "restore thresholds after gender stages (bool)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.filter.reenforce_thresholds = AsBool(k, v);
       }},

      {"folds.n_folds", "number of folds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.folds.n_folds = AsCount(k, v); }},
      {"folds.held_out", "N, test items per user",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.folds.held_out_per_user = AsCount(k, v);
       }},
      {"folds.min_unique_artists", "M, minimum history for evaluation",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.folds.min_unique_artists = AsCount(k, v);
       }},
      {"folds.list_size", "n, recommendation list length",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.folds.list_size = AsCount(k, v); }},

      {"model.k_neighbors", "UserKNNAvg neighbourhood size",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.k_neighbors = AsCount(k, v); }},
      {"model.similarity", "cosine | msd",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "cosine") c.model.similarity = Similarity::kCosine;
         else if (s == "msd") c.model.similarity = Similarity::kMeanSquaredDifference;
         else ConfigError(k + ": expected cosine or msd");
       }},
      {"model.min_support", "minimum co-rated items for a non-zero similarity",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.min_support = AsCount(k, v); }},
      {"model.nmf_factors", "NMF latent factors",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.nmf_factors = AsCount(k, v); }},
      {"model.nmf_epochs", "NMF epochs",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.nmf_epochs = AsCount(k, v); }},
      {"model.nmf_reg", "NMF regularization",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.nmf_reg = AsDouble(k, v); }},
      {"model.nmf_init_low", "NMF init lower bound",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.nmf_init_low = AsDouble(k, v); }},
      {"model.nmf_init_high", "NMF init upper bound",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.model.nmf_init_high = AsDouble(k, v); }},
      {"model.popularity", "listeners | playcount (MostPopular score)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "listeners") c.model.popularity = PopularityScore::kListenerCount;
         else if (s == "playcount") c.model.popularity = PopularityScore::kPlaycountMass;
         else ConfigError(k + ": expected listeners or playcount");
       }},

      {"sample.fraction", "sample fraction in (0, 1]",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sampling.sample_fraction = AsDouble(k, v);
       }},
      {"sample.extreme_category", "male | female",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string s = Lower(v);
         if (s == "male") c.sampling.extreme_category = ArtistCategory::kMaleArtists;
         else if (s == "female") c.sampling.extreme_category = ArtistCategory::kFemaleArtists;
         else ConfigError(k + ": expected male or female");
       }},
      {"sample.extreme_threshold", "PR threshold of the extreme design",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sampling.extreme_threshold = AsDouble(k, v);
       }},
      {"sample.preserve_gender_proportions", "stratify by user gender (bool)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sampling.preserve_gender_proportions = AsBool(k, v);
       }},

      {"synth.male_users", "synthetic male users",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.n_male_users = AsCount(k, v); }},
      {"synth.female_users", "synthetic female users",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.n_female_users = AsCount(k, v); }},
      {"synth.male_artists", "synthetic male artists",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.n_male_artists = AsCount(k, v); }},
      {"synth.female_artists", "synthetic female artists",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.n_female_artists = AsCount(k, v); }},
      {"synth.pr_male_users_male", "target PR(MaleUsers, MaleArtists)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.pr_male_users_male = AsDouble(k, v); }},
      {"synth.pr_female_users_male", "target PR(FemaleUsers, MaleArtists)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.pr_female_users_male = AsDouble(k, v); }},
      {"synth.pr_concentration", "Beta concentration of per-user PR (0 = none)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.pr_concentration = AsDouble(k, v); }},
      {"synth.density", "mean share of the catalog per user",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.density = AsDouble(k, v); }},
      {"synth.activity_spread", "relative spread of per-user activity",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.activity_spread = AsDouble(k, v); }},
      {"synth.male_popularity_skew", "Zipf exponent among male artists",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.male_popularity_skew = AsDouble(k, v); }},
      {"synth.female_popularity_skew", "Zipf exponent among female artists",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.female_popularity_skew = AsDouble(k, v); }},
      {"synth.selection_noise", "log-normal sd of per-user selection weights",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.selection_noise = AsDouble(k, v); }},
      {"synth.latent_dims", "latent taste dimensions",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.latent_dims = AsCount(k, v); }},
      {"synth.base_log_plays", "baseline log2 plays",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.base_log_plays = AsDouble(k, v); }},
      {"synth.user_offset_sd", "per-user offset sd",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.user_offset_sd = AsDouble(k, v); }},
      {"synth.quality_sd", "per-artist quality sd",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.quality_sd = AsDouble(k, v); }},
      {"synth.gender_affinity", "weight of the user's category share",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.gender_affinity = AsDouble(k, v); }},
      {"synth.taste_strength", "weight of the latent taste match",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.taste_strength = AsDouble(k, v); }},
      {"synth.noise_sd", "rating noise sd",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.synth.noise_sd = AsDouble(k, v); }},
      {"synth.seed", "generator seed (default: derived from the master seed)",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.synth.seed = static_cast<std::uint64_t>(AsInt(k, v));
         c.synth_seed_set = true;
       }},
  };
  return keys;
}

}  // namespace

std::map<std::string, std::string> ParseConfigText(std::string_view text) {
  std::map<std::string, std::string> settings;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) ConfigError("line " + std::to_string(line_no) + ": empty key");
    settings[key] = std::string(Trim(line.substr(eq + 1)));
    if (end == text.size()) break;
  }
  return settings;
}

std::map<std::string, std::string> ReadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfigText(ss.str());
}

void ApplyConfig(const std::map<std::string, std::string>& settings, ExperimentConfig& config) {
  for (const auto& [key, value] : settings) {
    const auto& keys = Keys();
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&](const KeySpec& k) { return key == k.key; });
    if (it == keys.end()) ConfigError("unknown key '" + key + "'");
    it->set(config, key, value);
  }
}

std::vector<std::pair<std::string, std::string>> ConfigKeys() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : Keys()) out.emplace_back(k.key, k.help);
  return out;
}

std::uint64_t StageSeed(std::uint64_t master, std::string_view label) {
  RandomStream rng(master, {label});
  return rng();
}

void ExperimentConfig::Validate() const {
  try {
    filter.Validate();
    folds.Validate();
    ModelConfig m = model;
    m.Validate();
    sampling.Validate();
    if (dataset == DatasetFlavor::kSynthetic) synth.Validate();
  } catch (const std::invalid_argument& e) {
    ConfigError(e.what());
  }
  if (algorithms.empty()) ConfigError("no algorithms selected");
  if (threads < 1) ConfigError("threads must be >= 1");
  if (dataset != DatasetFlavor::kSynthetic) {
    for (const auto& [name, path] : {std::pair{"events", events_path},
                                     std::pair{"profiles", profiles_path},
                                     std::pair{"gender_map", gender_map_path}}) {
      if (path.empty()) ConfigError(std::string(name) + " path is not set");
      if (!std::filesystem::exists(path)) {
        ConfigError(std::string(name) + " path '" + path.string() + "' does not exist");
      }
    }
  }
}

}  // namespace fairrec
