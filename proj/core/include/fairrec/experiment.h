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

#ifndef FAIRREC_EXPERIMENT_H_
#define FAIRREC_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairrec/bias.h"
#include "fairrec/corpus.h"
#include "fairrec/eval.h"
#include "fairrec/interactions.h"
#include "fairrec/recsys.h"
#include "fairrec/synth.h"

namespace fairrec {

enum class DatasetFlavor { kLfm360k, kLfm1b, kSynthetic };
enum class CandidateMode { kTestSet, kCatalog };

std::string_view DatasetName(DatasetFlavor flavor);  // "lfm360k", "lfm1b", "synthetic"
std::string_view ExperimentName(SamplingDesign design);  // "whole", "extreme"
std::string_view CandidateModeName(CandidateMode mode);  // "testset", "catalog"

struct ExperimentConfig {
  DatasetFlavor dataset = DatasetFlavor::kSynthetic;
  std::filesystem::path events_path;
  std::filesystem::path profiles_path;
  std::filesystem::path gender_map_path;

  FilterPolicy filter;
  FoldSpec folds;
  std::vector<Algorithm> algorithms = {Algorithm::kMostPopular, Algorithm::kUserItemAvg,
                                       Algorithm::kUserKnnAvg, Algorithm::kNmf};
  // Shared hyperparameters; `algorithm` is overwritten per run.
  ModelConfig model;
  SamplingPlan sampling;
  CandidateMode candidates = CandidateMode::kTestSet;
  // PR over playcount weights instead of the binary matrix.
  bool weighted_pr = false;
  SynthSpec synth;
  bool synth_seed_set = false;

  std::filesystem::path output_dir = "fairrec-out";
  bool write_svg = true;
  int threads = 1;
  std::uint64_t seed = 42;
  // When set, every fitted model is dumped to <model_dir>/<algorithm>.fold<f>.tsv.
  std::filesystem::path model_dir;

  // Checks nested invariants and, for real datasets, that input paths exist.
  // Throws PipelineError("config").
  void Validate() const;
};

// Flat `key = value` configuration text; '#' starts a comment. Throws
// PipelineError("config") with the line number on malformed lines.
std::map<std::string, std::string> ParseConfigText(std::string_view text);
std::map<std::string, std::string> ReadConfigFile(const std::filesystem::path& path);
// Applies settings in key order; unknown keys and bad values throw
// PipelineError("config").
void ApplyConfig(const std::map<std::string, std::string>& settings, ExperimentConfig& config);
// Every recognised key with a one-line description.
std::vector<std::pair<std::string, std::string>> ConfigKeys();

// Derived seed for a pipeline stage: RandomStream(master, {label})().
std::uint64_t StageSeed(std::uint64_t master, std::string_view label);

struct AuditRow {
  std::string experiment;
  std::string dataset;
  std::string algorithm;
  std::string fold;  // "0", "1", ..., or "mean"
  UserGroup group = UserGroup::kMaleUsers;
  ArtistCategory category = ArtistCategory::kMaleArtists;
  std::optional<double> pr_input;
  std::optional<double> pr_output;
  std::optional<double> bias_disparity;
  std::string skip_reason;
};

struct MetricRow {
  std::string experiment;
  std::string dataset;
  std::string algorithm;
  std::string fold;
  MetricReport report;
};

struct PrDistributionRow {
  std::string user_id;
  UserGroup group = UserGroup::kMaleUsers;
  double pr_male = 0.0;
  double pr_female = 0.0;
};

struct ExperimentResult {
  std::vector<AuditRow> audit;
  std::vector<MetricRow> metrics;
  std::vector<PrDistributionRow> pr_distribution;
  FilterReport filter_report;
  std::size_t n_users = 0;
  std::size_t n_artists = 0;
  std::size_t n_records = 0;
  std::size_t sampled_users = 0;
  std::size_t evaluated_users = 0;
  std::vector<ParseIssue> issues;
  std::optional<double> synth_realized_pr_male_users_male;
  std::optional<double> synth_realized_pr_female_users_male;
};

// Everything a list provider may look at for one fold.
struct ListRequest {
  const InteractionMatrix& full;
  const EvalFold& fold;
  std::span<const UserIndex> users;
  std::span<const std::vector<ArtistIndex>> candidates;  // by user index
  int n;
};

// A recommender that produces lists directly (used for oracles in tests).
struct ListProvider {
  std::string name;
  std::function<std::vector<RecommendationList>(const ListRequest&)> make;
};

// Ingest -> resolve -> filter -> sample -> folds -> fit -> evaluate -> audit.
// Synthetic corpora are written to <output_dir>/synthetic and read back
// through the LFM-360k parser. Per algorithm and fold, emits the 2 x 2 audit
// grid and a metric row, followed by fold = "mean" rows whose BD is
// recomputed from the mean input and output PRs.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               std::span<const ListProvider> extra_recommenders = {});

// Lists that contain every artist of each user's full history; the output
// PR then equals the input PR in every cell.
ListProvider ProportionalOracle();

// ---------------------------------------------------------------------------
// Report emission.

inline constexpr std::string_view kAuditHeader =
    "experiment,dataset,algorithm,fold,user_group,item_category,pr_input,pr_output,"
    "bias_disparity,skip_reason";
inline constexpr std::string_view kMetricsHeader =
    "experiment,dataset,algorithm,fold,precision,ndcg,coverage,spread,longtail_pct,"
    "users_evaluated,users_skipped";

void WriteAuditCsv(std::ostream& out, const std::vector<AuditRow>& rows);
void WriteMetricsCsv(std::ostream& out, const std::vector<MetricRow>& rows);
void WritePrDistributionTsv(std::ostream& out, const std::vector<PrDistributionRow>& rows);
// Grouped bar charts of the fold = "mean" rows: output PR bars with a dotted
// input-PR line, and BD bars per group x category.
void WritePrChartSvg(std::ostream& out, const std::vector<AuditRow>& rows);
void WriteBdChartSvg(std::ostream& out, const std::vector<AuditRow>& rows);

// Writes audit.csv, metrics.csv, pr_distribution.tsv and (optionally)
// pr_chart.svg / bd_chart.svg into `dir`. Returns the written paths. Throws
// PipelineError("report") for empty results or an unwritable directory.
std::vector<std::filesystem::path> EmitReport(const ExperimentResult& result,
                                              const std::filesystem::path& dir, bool write_svg);

// Minimal RFC-4180 reader used by `report` and `ttest`.
std::vector<std::vector<std::string>> ReadCsv(const std::filesystem::path& path);

}  // namespace fairrec

#endif  // FAIRREC_EXPERIMENT_H_
