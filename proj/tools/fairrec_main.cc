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

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrec/corpus.h"
#include "fairrec/error.h"
#include "fairrec/experiment.h"
#include "fairrec/interactions.h"
#include "fairrec/stats.h"
#include "fairrec/synth.h"
#include "fairrec/tsv.h"
#include "output_guard.h"

namespace fairrec::tools {
namespace {

// Flags shared by the pipeline subcommands. Set flags override config keys.
struct PipelineFlags {
  std::string config_path;
  std::vector<std::string> overrides;  // KEY=VALUE
  std::string dataset;
  std::string events;
  std::string profiles;
  std::string gender_map;
  std::optional<long long> seed;
  std::string out;
  std::string experiment;
  std::string algorithms;
  std::string candidates;
  std::optional<int> threads;
  std::string export_models;
  bool no_svg = false;

  void AddCommon(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value config file");
    app->add_option("--set", overrides, "override a config key (KEY=VALUE), repeatable");
    app->add_option("--dataset", dataset, "lfm360k | lfm1b | synthetic")
        ->check(CLI::IsMember({"lfm360k", "lfm1b", "synthetic"}));
    app->add_option("--events", events, "listening events file");
    app->add_option("--profiles", profiles, "user profile file");
    app->add_option("--gender-map", gender_map, "artist gender map TSV");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--out", out, "output directory");
  }

  void AddRun(CLI::App* app) {
    app->add_option("--experiment", experiment, "whole | extreme")
        ->check(CLI::IsMember({"whole", "extreme"}));
    app->add_option("--algorithms", algorithms, "comma-separated algorithm list");
    app->add_option("--candidates", candidates, "testset | catalog")
        ->check(CLI::IsMember({"testset", "catalog"}));
    app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--export-models", export_models, "directory for fitted model dumps");
    app->add_flag("--no-svg", no_svg, "skip SVG charts");
  }

  ExperimentConfig Resolve() const {
    std::map<std::string, std::string> settings;
    if (!config_path.empty()) settings = ReadConfigFile(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw PipelineError("config", "--set expects KEY=VALUE, got '" + kv + "'");
      settings[std::string(Trim(kv.substr(0, eq)))] = std::string(Trim(kv.substr(eq + 1)));
    }
    auto put = [&](const char* key, const std::string& value) {
      if (!value.empty()) settings[key] = value;
    };
    put("dataset", dataset);
    put("events", events);
    put("profiles", profiles);
    put("gender_map", gender_map);
    put("out", out);
    put("experiment", experiment);
    put("algorithms", algorithms);
    put("candidates", candidates);
    put("export_models", export_models);
    if (seed) settings["seed"] = std::to_string(*seed);
    if (threads) settings["threads"] = std::to_string(*threads);
    if (no_svg) settings["svg"] = "false";
    ExperimentConfig config;
    ApplyConfig(settings, config);
    return config;
  }
};

void PrintIssues(const std::vector<ParseIssue>& issues, std::size_t limit = 10) {
  if (issues.empty()) return;
  std::cerr << issues.size() << " input issue(s)";
  if (issues.size() > limit) std::cerr << ", first " << limit;
  std::cerr << ":\n";
  for (std::size_t i = 0; i < issues.size() && i < limit; ++i) {
    std::cerr << "  " << issues[i].file << ":" << issues[i].line << ": " << issues[i].reason << "\n";
  }
}

void WriteIssues(const std::filesystem::path& path, const std::vector<ParseIssue>& issues) {
  std::ofstream out = OpenForWrite(path, "ingest");
  out << "file\tline\treason\n";
  for (const auto& i : issues) out << i.file << '\t' << i.line << '\t' << i.reason << '\n';
}

ParsedDataset Parse(const ExperimentConfig& config) {
  if (config.dataset == DatasetFlavor::kSynthetic) {
    throw PipelineError("ingest", "synthetic corpora are produced by `synth`; pass --dataset lfm360k");
  }
  if (config.events_path.empty() || config.profiles_path.empty()) {
    throw PipelineError("ingest", "--events and --profiles are required");
  }
  return config.dataset == DatasetFlavor::kLfm1b
             ? ParseLfm1b(config.events_path, config.profiles_path)
             : ParseLfm360k(config.events_path, config.profiles_path);
}

int CmdIngest(const PipelineFlags& flags) {
  const ExperimentConfig config = flags.Resolve();
  OutputGuard guard(config.output_dir);
  const ParsedDataset parsed = Parse(config);
  std::filesystem::create_directories(config.output_dir);
  {
    std::ofstream events = OpenForWrite(config.output_dir / "events.tsv", "ingest");
    WriteLfm360kEvents(events, parsed.records);
    std::ofstream profiles = OpenForWrite(config.output_dir / "profiles.tsv", "ingest");
    WriteLfm360kProfiles(profiles, parsed.profiles);
  }
  WriteIssues(config.output_dir / "issues.tsv", parsed.issues);
  PrintIssues(parsed.issues);
  std::cout << "event lines: " << parsed.event_lines << "\n"
            << "dropped (missing artist id): " << parsed.dropped_missing_artist_id << "\n"
            << "aggregated records: " << parsed.records.size() << "\n"
            << "profiles: " << parsed.profiles.size() << "\n";
  guard.Commit();
  return 0;
}

int CmdResolveGender(const std::string& members_path, const std::string& events_path,
                     const std::string& profiles_path, const std::string& gender_map_path,
                     const std::string& out_path) {
  GenderMap map;
  if (!members_path.empty()) {
    std::map<std::string, std::vector<Gender>> members;
    std::vector<ParseIssue> issues;
    ForEachLine(members_path, "resolve-gender", [&](std::size_t line_no, std::string_view line) {
      if (Trim(line).empty()) return;
      const auto fields = SplitTabs(line);
      if (fields.size() != 2) {
        issues.push_back({members_path, line_no, "expected artist_id<TAB>member_gender"});
        return;
      }
      const auto g = ParseGenderName(fields[1]);
      if (!g) {
        issues.push_back({members_path, line_no, "unknown gender '" + std::string(fields[1]) + "'"});
        return;
      }
      members[std::string(fields[0])].push_back(*g);
    });
    PrintIssues(issues);
    map = GenderMapFromMembership(members);
    if (out_path.empty()) throw PipelineError("resolve-gender", "--out is required with --members");
    OutputGuard guard(std::filesystem::path(out_path).parent_path().empty()
                          ? std::filesystem::path(".")
                          : std::filesystem::path(out_path).parent_path());
    std::ofstream out = OpenForWrite(out_path, "resolve-gender");
    WriteGenderMap(out, map);
    out.close();
    if (!out) throw PipelineError("resolve-gender", "write failed for '" + out_path + "'");
    guard.Commit();
  } else if (!gender_map_path.empty()) {
    LoadedGenderMap loaded = LoadGenderMap(gender_map_path);
    PrintIssues(loaded.report.issues);
    map = std::move(loaded.map);
  } else {
    throw PipelineError("resolve-gender", "pass --members or --gender-map");
  }
  const GenderMapReport report = map.Report();
  std::cout << "artists: " << report.total << "\n";
  for (const auto& [g, n] : report.per_label) std::cout << "  " << GenderName(g) << ": " << n << "\n";
  std::cout << "unresolved: " << report.unresolved << "\n";
  if (!events_path.empty()) {
    const ParsedDataset parsed = ParseLfm360k(events_path, profiles_path);
    std::set<std::string> ids;
    for (const auto& r : parsed.records) ids.insert(r.artist_id);
    const double coverage = map.Coverage({ids.begin(), ids.end()});
    std::cout << "coverage of " << ids.size() << " listened artists: " << FormatDouble(coverage) << "\n";
  }
  return 0;
}

int CmdFilter(const PipelineFlags& flags) {
  ExperimentConfig config = flags.Resolve();
  if (config.gender_map_path.empty()) throw PipelineError("filter", "--gender-map is required");
  OutputGuard guard(config.output_dir);
  const ParsedDataset parsed = Parse(config);
  PrintIssues(parsed.issues);
  const LoadedGenderMap genders = LoadGenderMap(config.gender_map_path);
  PrintIssues(genders.report.issues);
  const FilterResult result = ApplyFilters(parsed.records, parsed.profiles, genders.map, config.filter);
  std::filesystem::create_directories(config.output_dir);
  const auto& dir = config.output_dir;
  {
    std::ofstream events = OpenForWrite(dir / "events.tsv", "filter");
    WriteLfm360kEvents(events, result.corpus.records);
    std::ofstream profiles = OpenForWrite(dir / "profiles.tsv", "filter");
    WriteLfm360kProfiles(profiles, result.corpus.user_profiles);
    GenderMap kept;
    for (const auto& [id, g] : result.corpus.artist_genders) kept.Set(id, g);
    std::ofstream map = OpenForWrite(dir / "gender_map.tsv", "filter");
    WriteGenderMap(map, kept);
    std::ofstream snapshot = OpenForWrite(dir / "matrix.bin", "filter");
    WriteSnapshot(snapshot, InteractionMatrix::Build(result.corpus));
    std::ofstream report = OpenForWrite(dir / "filter_report.txt", "filter");
    report << result.report.Describe() << "\n";
  }
  std::cout << result.report.Describe() << "\n";
  guard.Commit();
  return 0;
}

int CmdSynth(const PipelineFlags& flags) {
  ExperimentConfig config = flags.Resolve();
  SynthSpec spec = config.synth;
  if (!config.synth_seed_set) spec.seed = StageSeed(config.seed, "synth");
  OutputGuard guard(config.output_dir);
  const SynthCorpus corpus = GenerateSynthetic(spec);
  const SynthFiles files = WriteSynthetic(corpus, config.output_dir);
  std::cout << "events: " << files.events.string() << "\n"
            << "profiles: " << files.profiles.string() << "\n"
            << "gender map: " << files.gender_map.string() << "\n"
            << "realized PR(MaleUsers, MaleArtists): "
            << FormatDouble(corpus.realized_pr_male_users_male) << "\n"
            << "realized PR(FemaleUsers, MaleArtists): "
            << FormatDouble(corpus.realized_pr_female_users_male) << "\n";
  guard.Commit();
  return 0;
}

int CmdRun(const PipelineFlags& flags) {
  const ExperimentConfig config = flags.Resolve();
  OutputGuard guard(config.output_dir);
  const ExperimentResult result = RunExperiment(config);
  PrintIssues(result.issues);
  std::cerr << "filter: " << result.filter_report.Describe() << "\n"
            << "users " << result.n_users << ", artists " << result.n_artists << ", records "
            << result.n_records << ", sampled " << result.sampled_users << ", evaluated "
            << result.evaluated_users << "\n";
  const auto written = EmitReport(result, config.output_dir, config.write_svg);
  for (const auto& p : written) std::cout << p.string() << "\n";
  guard.Commit();
  return 0;
}

std::optional<double> OptionalField(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = ParseDouble(s);
  if (!v) throw PipelineError("report", "not a number: '" + s + "'");
  return v;
}

std::vector<AuditRow> ReadAudit(const std::filesystem::path& path) {
  const auto rows = ReadCsv(path);
  if (rows.empty()) throw PipelineError("report", "empty file '" + path.string() + "'");
  std::string header;
  for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
  if (header != kAuditHeader) throw PipelineError("report", "unexpected audit header '" + header + "'");
  std::vector<AuditRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != 10) throw PipelineError("report", "row " + std::to_string(r + 1) + ": expected 10 fields");
    AuditRow row;
    row.experiment = f[0];
    row.dataset = f[1];
    row.algorithm = f[2];
    row.fold = f[3];
    if (f[4] == "MaleUsers") row.group = UserGroup::kMaleUsers;
    else if (f[4] == "FemaleUsers") row.group = UserGroup::kFemaleUsers;
    else throw PipelineError("report", "row " + std::to_string(r + 1) + ": bad user_group");
    if (f[5] == "MaleArtists") row.category = ArtistCategory::kMaleArtists;
    else if (f[5] == "FemaleArtists") row.category = ArtistCategory::kFemaleArtists;
    else throw PipelineError("report", "row " + std::to_string(r + 1) + ": bad item_category");
    row.pr_input = OptionalField(f[6]);
    row.pr_output = OptionalField(f[7]);
    row.bias_disparity = OptionalField(f[8]);
    row.skip_reason = f[9];
    out.push_back(std::move(row));
  }
  return out;
}

int CmdReport(const std::string& in_dir, bool no_svg) {
  const std::filesystem::path dir(in_dir);
  const auto rows = ReadAudit(dir / "audit.csv");
  std::size_t inconsistent = 0;
  for (const auto& r : rows) {
    if (!r.bias_disparity) continue;
    const auto bd = r.pr_input && r.pr_output ? BiasDisparity(*r.pr_input, *r.pr_output) : std::nullopt;
    if (!bd || std::abs(*bd - *r.bias_disparity) > 1e-12 * std::max(1.0, std::abs(*bd))) ++inconsistent;
  }
  std::cout << "experiment\tdataset\talgorithm\tcell\tpr_input\tpr_output\tbias_disparity\n";
  for (const auto& r : rows) {
    if (r.fold != "mean") continue;
    auto show = [](const std::optional<double>& v) { return v ? FormatDouble(*v) : std::string("-"); };
    std::cout << r.experiment << '\t' << r.dataset << '\t' << r.algorithm << '\t'
              << UserGroupName(r.group) << "/" << ArtistCategoryName(r.category) << '\t'
              << show(r.pr_input) << '\t' << show(r.pr_output) << '\t' << show(r.bias_disparity)
              << "\n";
  }
  if (!no_svg) {
    std::ofstream pr = OpenForWrite(dir / "pr_chart.svg", "report");
    WritePrChartSvg(pr, rows);
    std::ofstream bd = OpenForWrite(dir / "bd_chart.svg", "report");
    WriteBdChartSvg(bd, rows);
  }
  if (inconsistent > 0) {
    std::cerr << inconsistent << " row(s) whose bias_disparity does not match pr_input/pr_output\n";
    return 1;
  }
  return 0;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = ParseDouble(item);
    if (!v) throw PipelineError("ttest", "not a number: '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> MetricColumn(const std::filesystem::path& path, const std::string& column,
                                 const std::string& algorithm, const std::string& experiment) {
  const auto rows = ReadCsv(path);
  if (rows.empty()) throw PipelineError("ttest", "empty file '" + path.string() + "'");
  const auto& header = rows[0];
  auto find = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw PipelineError("ttest", "no column '" + name + "' in " + path.string());
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t col = find(column), algo = find("algorithm"), fold = find("fold"),
                    exp = find("experiment");
  std::vector<double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != header.size() || f[algo] != algorithm || f[fold] == "mean") continue;
    if (!experiment.empty() && f[exp] != experiment) continue;
    const auto v = ParseDouble(f[col]);
    if (!v) continue;
    out.push_back(*v);
  }
  return out;
}

int CmdTTest(const std::string& metrics, const std::string& column, const std::string& a,
             const std::string& b, const std::string& experiment, const std::string& values_a,
             const std::string& values_b, double alpha) {
  std::vector<double> xs, ys;
  if (!values_a.empty() || !values_b.empty()) {
    xs = ParseList(values_a);
    ys = ParseList(values_b);
  } else {
    if (metrics.empty() || column.empty() || a.empty() || b.empty()) {
      throw PipelineError("ttest", "pass --values-a/--values-b or --metrics, --column, --a, --b");
    }
    xs = MetricColumn(metrics, column, a, experiment);
    ys = MetricColumn(metrics, column, b, experiment);
  }
  TTestResult r;
  try {
    r = WelchTTest(xs, ys, alpha);
  } catch (const std::invalid_argument& e) {
    throw PipelineError("ttest", e.what());
  }
  std::cout << "n_a\t" << xs.size() << "\nn_b\t" << ys.size() << "\nt\t" << FormatDouble(r.t_statistic)
            << "\ndf\t" << FormatDouble(r.degrees_of_freedom) << "\np\t" << FormatDouble(r.p_value)
            << "\nsignificant\t" << (r.significant ? "yes" : "no") << "\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Gender bias disparity audit for music recommenders"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "expand all help");

  PipelineFlags ingest_flags, filter_flags, synth_flags, run_flags;
  auto* ingest = app.add_subcommand("ingest", "parse raw events and profiles");
  ingest_flags.AddCommon(ingest);
  auto* filter = app.add_subcommand("filter", "apply the corpus filters and write a snapshot");
  filter_flags.AddCommon(filter);
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_flags.AddCommon(synth);
  auto* run = app.add_subcommand("run", "run an experiment end to end");
  run_flags.AddCommon(run);
  run_flags.AddRun(run);

  std::string members, rg_events, rg_profiles, rg_map, rg_out;
  auto* resolve = app.add_subcommand("resolve-gender", "build or inspect an artist gender map");
  resolve->add_option("--members", members, "artist_id<TAB>member_gender rows");
  resolve->add_option("--gender-map", rg_map, "existing gender map to summarise");
  resolve->add_option("--events", rg_events, "LFM-360k events for a coverage report");
  resolve->add_option("--profiles", rg_profiles, "LFM-360k profiles (with --events)");
  resolve->add_option("--out", rg_out, "gender map to write");

  std::string report_in;
  bool report_no_svg = false;
  auto* report = app.add_subcommand("report", "check audit.csv and redraw charts");
  report->add_option("--in", report_in, "directory holding audit.csv")->required();
  report->add_flag("--no-svg", report_no_svg, "skip SVG charts");

  std::string t_metrics, t_column, t_a, t_b, t_experiment, t_va, t_vb;
  double t_alpha = 0.05;
  auto* ttest = app.add_subcommand("ttest", "Welch t-test over per-fold values");
  ttest->add_option("--metrics", t_metrics, "metrics.csv");
  ttest->add_option("--column", t_column, "metric column, e.g. ndcg");
  ttest->add_option("--a", t_a, "first algorithm");
  ttest->add_option("--b", t_b, "second algorithm");
  ttest->add_option("--experiment", t_experiment, "restrict to one experiment");
  ttest->add_option("--values-a", t_va, "comma-separated values");
  ttest->add_option("--values-b", t_vb, "comma-separated values");
  ttest->add_option("--alpha", t_alpha, "significance level")->check(CLI::Range(0.0, 1.0));

  auto* keys = app.add_subcommand("config-keys", "list recognised config keys");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return CmdIngest(ingest_flags);
    if (*filter) return CmdFilter(filter_flags);
    if (*synth) return CmdSynth(synth_flags);
    if (*run) return CmdRun(run_flags);
    if (*resolve) return CmdResolveGender(members, rg_events, rg_profiles, rg_map, rg_out);
    if (*report) return CmdReport(report_in, report_no_svg);
    if (*ttest) return CmdTTest(t_metrics, t_column, t_a, t_b, t_experiment, t_va, t_vb, t_alpha);
    if (*keys) {
      for (const auto& [key, help] : ConfigKeys()) std::cout << key << "\t" << help << "\n";
      return 0;
    }
  } catch (const PipelineError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace fairrec::tools

int main(int argc, char** argv) { return fairrec::tools::Main(argc, argv); }
