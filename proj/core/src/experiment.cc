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

#include "fairrec/experiment.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "fairrec/tsv.h"

namespace fairrec {

std::string_view DatasetName(DatasetFlavor flavor) {
  switch (flavor) {
    case DatasetFlavor::kLfm360k:
      return "lfm360k";
    case DatasetFlavor::kLfm1b:
      return "lfm1b";
    case DatasetFlavor::kSynthetic:
      return "synthetic";
  }
  return "unknown";
}

std::string_view ExperimentName(SamplingDesign design) {
  return design == SamplingDesign::kWholePopulation ? "whole" : "extreme";
}

std::string_view CandidateModeName(CandidateMode mode) {
  return mode == CandidateMode::kTestSet ? "testset" : "catalog";
}

namespace {

struct LoadedInput {
  ParsedDataset parsed;
  GenderMap genders;
  std::vector<ParseIssue> gender_issues;
  std::optional<double> realized_male;
  std::optional<double> realized_female;
};

LoadedInput LoadInput(const ExperimentConfig& config) {
  LoadedInput in;
  std::filesystem::path events = config.events_path;
  std::filesystem::path profiles = config.profiles_path;
  std::filesystem::path gender_map = config.gender_map_path;
  if (config.dataset == DatasetFlavor::kSynthetic) {
    SynthSpec spec = config.synth;
    if (!config.synth_seed_set) spec.seed = StageSeed(config.seed, "synth");
    SynthCorpus corpus = GenerateSynthetic(spec);
    const SynthFiles files = WriteSynthetic(corpus, config.output_dir / "synthetic");
    events = files.events;
    profiles = files.profiles;
    gender_map = files.gender_map;
    in.realized_male = corpus.realized_pr_male_users_male;
    in.realized_female = corpus.realized_pr_female_users_male;
  }
  in.parsed = config.dataset == DatasetFlavor::kLfm1b ? ParseLfm1b(events, profiles)
                                                      : ParseLfm360k(events, profiles);
  LoadedGenderMap loaded = LoadGenderMap(gender_map);
  in.genders = std::move(loaded.map);
  in.gender_issues = std::move(loaded.report.issues);
  return in;
}

std::vector<std::vector<ArtistIndex>> Candidates(const EvalFold& fold, CandidateMode mode,
                                                 std::size_t n_users, std::size_t n_artists) {
  std::vector<std::vector<ArtistIndex>> out(n_users);
  for (UserIndex u : fold.eval_users) {
    auto& c = out[static_cast<std::size_t>(u)];
    if (mode == CandidateMode::kTestSet) {
      for (const auto& [a, rating] : fold.test[static_cast<std::size_t>(u)]) c.push_back(a);
      continue;
    }
    const auto row = fold.train.Row(u);
    std::size_t k = 0;
    for (std::size_t a = 0; a < n_artists; ++a) {
      if (k < row.size() && static_cast<std::size_t>(row[k].artist) == a) {
        ++k;
        continue;
      }
      c.push_back(static_cast<ArtistIndex>(a));
    }
  }
  return out;
}

std::vector<double> Thresholds(const EvalFold& fold, std::size_t n_users) {
  std::vector<double> out(n_users, 0.0);
  std::vector<double> ratings;
  for (UserIndex u : fold.eval_users) {
    ratings.clear();
    for (const auto& e : fold.train.Row(u)) ratings.push_back(e.rating);
    out[static_cast<std::size_t>(u)] = RelevanceThreshold(ratings);
  }
  return out;
}

struct FoldContext {
  const EvalFold* fold = nullptr;
  std::vector<std::vector<ArtistIndex>> candidates;
  std::vector<double> thresholds;
};

struct TaskOutput {
  std::vector<BiasCell> cells;
  MetricReport report;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers; the first failure
// (by index) is rethrown.
template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string CellKey(const BiasCell& c) {
  return std::string(UserGroupName(c.group)) + "/" + std::string(ArtistCategoryName(c.category));
}

}  // namespace

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               std::span<const ListProvider> extra_recommenders) {
  config.Validate();
  ExperimentResult result;
  if (!config.model_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.model_dir, ec);
    if (ec) throw PipelineError("export", "cannot create '" + config.model_dir.string() + "'");
  }

  LoadedInput input = LoadInput(config);
  result.issues = std::move(input.parsed.issues);
  result.issues.insert(result.issues.end(), input.gender_issues.begin(), input.gender_issues.end());
  result.synth_realized_pr_male_users_male = input.realized_male;
  result.synth_realized_pr_female_users_male = input.realized_female;

  FilterResult filtered =
      ApplyFilters(input.parsed.records, input.parsed.profiles, input.genders, config.filter);
  result.filter_report = filtered.report;
  const InteractionMatrix matrix = InteractionMatrix::Build(filtered.corpus);
  result.n_users = matrix.n_users();
  result.n_artists = matrix.n_artists();
  result.n_records = matrix.nnz();

  const GroupAssignment assignment = GroupAssignment::FromCorpus(matrix, filtered.corpus);
  const PopularityIndex popularity = BuildPopularity(matrix);
  const SelectionMatrix input_selection = config.weighted_pr
                                              ? SelectionMatrix::FromPlaycounts(matrix)
                                              : SelectionMatrix::FromBinary(matrix);
  const PerUserPreference preference = PerUserPreferenceRatio(input_selection, assignment);
  for (const auto& p : preference.users) {
    result.pr_distribution.push_back({matrix.user_id(p.user),
                                      assignment.user_groups[static_cast<std::size_t>(p.user)],
                                      p.pr_male, p.pr_female});
  }

  SamplingPlan plan = config.sampling;
  plan.seed = config.seed;
  const std::vector<UserIndex> sampled = SampleUsers(preference, assignment, plan);
  result.sampled_users = sampled.size();

  FoldSpec fold_spec = config.folds;
  fold_spec.seed = config.seed;
  const std::vector<EvalFold> folds = MakeFolds(matrix, fold_spec, sampled);
  result.evaluated_users = folds.front().eval_users.size();

  std::vector<FoldContext> contexts(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    contexts[f].fold = &folds[f];
    contexts[f].candidates =
        Candidates(folds[f], config.candidates, matrix.n_users(), matrix.n_artists());
    contexts[f].thresholds = Thresholds(folds[f], matrix.n_users());
  }

  // Task order: built-in algorithms, then extra providers; folds innermost.
  struct Runner {
    std::string name;
    std::optional<Algorithm> algorithm;
    const ListProvider* provider = nullptr;
  };
  std::vector<Runner> runners;
  for (Algorithm a : config.algorithms) runners.push_back({std::string(AlgorithmName(a)), a, nullptr});
  for (const auto& p : extra_recommenders) runners.push_back({p.name, std::nullopt, &p});

  const std::size_t n_folds = folds.size();
  std::vector<TaskOutput> outputs(runners.size() * n_folds);
  ParallelFor(outputs.size(), config.threads, [&](std::size_t task) {
    const Runner& runner = runners[task / n_folds];
    const std::size_t f = task % n_folds;
    const FoldContext& ctx = contexts[f];
    const EvalFold& fold = *ctx.fold;
    std::vector<RecommendationList> lists;
    lists.reserve(fold.eval_users.size());
    if (runner.algorithm) {
      ModelConfig model_config = config.model;
      model_config.algorithm = *runner.algorithm;
      model_config.seed = RandomStream(config.seed, {"model", std::to_string(f)})();
      std::unique_ptr<Model> model;
      try {
        model = Fit(fold.train, model_config);
      } catch (const std::invalid_argument& e) {
        throw PipelineError("fit", runner.name + ", fold " + std::to_string(f) + ": " + e.what());
      }
      if (!config.model_dir.empty()) {
        const auto path = config.model_dir / (runner.name + ".fold" + std::to_string(f) + ".tsv");
        std::ofstream dump = OpenForWrite(path, "export");
        model->Export(dump);
        if (!dump) throw PipelineError("export", "write failed for '" + path.string() + "'");
      }
      for (UserIndex u : fold.eval_users) {
        lists.push_back(RecommendTopN(*model, u, ctx.candidates[static_cast<std::size_t>(u)],
                                      config.folds.list_size));
      }
    } else {
      const ListRequest request{matrix, fold, fold.eval_users, ctx.candidates,
                                config.folds.list_size};
      lists = runner.provider->make(request);
    }
    TaskOutput& out = outputs[task];
    out.report = EvaluateLists(lists, fold.test, ctx.thresholds, popularity, matrix.n_artists(),
                               config.folds.list_size);
    const SelectionMatrix output_selection = SelectionMatrix::FromLists(matrix.n_users(), lists);
    out.cells = ComputeBiasCells(input_selection, output_selection, fold.eval_users, assignment);
  });

  const std::string experiment(ExperimentName(config.sampling.design));
  const std::string dataset(DatasetName(config.dataset));
  for (std::size_t r = 0; r < runners.size(); ++r) {
    const std::string& algo = runners[r].name;
    std::vector<MetricReport> reports;
    for (std::size_t f = 0; f < n_folds; ++f) {
      const TaskOutput& out = outputs[r * n_folds + f];
      for (const auto& c : out.cells) {
        result.audit.push_back({experiment, dataset, algo, std::to_string(f), c.group, c.category,
                                c.pr_input, c.pr_output, c.bias_disparity, c.skip_reason});
      }
      result.metrics.push_back({experiment, dataset, algo, std::to_string(f), out.report});
      reports.push_back(out.report);
    }
    const std::size_t n_cells = outputs[r * n_folds].cells.size();
    for (std::size_t c = 0; c < n_cells; ++c) {
      const BiasCell& first = outputs[r * n_folds].cells[c];
      AuditRow row{experiment, dataset, algo, "mean", first.group, first.category,
                   std::nullopt, std::nullopt, std::nullopt, ""};
      double in_sum = 0.0, out_sum = 0.0;
      std::size_t present = 0;
      std::string reason;
      for (std::size_t f = 0; f < n_folds; ++f) {
        const BiasCell& cell = outputs[r * n_folds + f].cells[c];
        if (CellKey(cell) != CellKey(first)) throw PipelineError("audit", "cell order mismatch");
        if (cell.pr_input && cell.pr_output) {
          in_sum += *cell.pr_input;
          out_sum += *cell.pr_output;
          ++present;
        } else if (reason.empty()) {
          reason = "fold " + std::to_string(f) + ": " + cell.skip_reason;
        }
      }
      if (present == n_folds) {
        row.pr_input = in_sum / static_cast<double>(n_folds);
        row.pr_output = out_sum / static_cast<double>(n_folds);
        row.bias_disparity = BiasDisparity(*row.pr_input, *row.pr_output);
        if (!row.bias_disparity) row.skip_reason = "input preference ratio is zero";
      } else {
        row.skip_reason = reason;
      }
      result.audit.push_back(std::move(row));
    }
    result.metrics.push_back({experiment, dataset, algo, "mean", MeanReport(reports)});
  }
  return result;
}

ListProvider ProportionalOracle() {
  return {"ProportionalOracle", [](const ListRequest& request) {
            std::vector<RecommendationList> lists;
            for (UserIndex u : request.users) {
              RecommendationList list;
              list.user = u;
              for (const auto& e : request.full.Row(u)) {
                list.artists.push_back(e.artist);
                list.scores.push_back(1.0);
              }
              lists.push_back(std::move(list));
            }
            return lists;
          }};
}

}  // namespace fairrec
