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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fairrec/error.h"
#include "fairrec/experiment.h"
#include "test_util.h"

namespace fairrec {
namespace {

ExperimentConfig SmallSynthetic(const std::filesystem::path& out) {
  ExperimentConfig c;
  c.dataset = DatasetFlavor::kSynthetic;
  c.synth.n_male_users = 150;
  c.synth.n_female_users = 60;
  c.synth.n_male_artists = 80;
  c.synth.n_female_artists = 20;
  c.synth.density = 0.25;
  c.output_dir = out;
  c.write_svg = false;
  return c;
}

std::string AuditText(const ExperimentResult& r) {
  std::ostringstream s;
  WriteAuditCsv(s, r.audit);
  WriteMetricsCsv(s, r.metrics);
  WritePrDistributionTsv(s, r.pr_distribution);
  return s.str();
}

TEST(RunExperiment, RowCountsForTwoAlgorithmsThreeFolds) {
  testing::TempDir dir;
  auto c = SmallSynthetic(dir.path());
  c.algorithms = {Algorithm::kMostPopular, Algorithm::kNmf};
  const auto r = RunExperiment(c);
  EXPECT_EQ(r.audit.size(), 24u + 8u);
  EXPECT_EQ(r.metrics.size(), 6u + 2u);
  std::set<std::tuple<std::string, std::string, UserGroup, ArtistCategory>> keys;
  for (const auto& row : r.audit) {
    EXPECT_TRUE(keys.insert({row.algorithm, row.fold, row.group, row.category}).second);
    EXPECT_EQ(row.experiment, "whole");
    EXPECT_EQ(row.dataset, "synthetic");
  }
  std::size_t mean_rows = 0;
  for (const auto& row : r.audit) mean_rows += row.fold == "mean" ? 1 : 0;
  EXPECT_EQ(mean_rows, 8u);
  EXPECT_TRUE(r.synth_realized_pr_male_users_male);
  EXPECT_TRUE(std::filesystem::exists(dir / "synthetic" / "events.tsv"));
}

TEST(RunExperiment, BiasDisparityRecomputesFromOwnFields) {
  testing::TempDir dir;
  const auto r = RunExperiment(SmallSynthetic(dir.path()));
  for (const auto& row : r.audit) {
    ASSERT_TRUE(row.pr_input && row.pr_output);
    if (!row.bias_disparity) {
      EXPECT_FALSE(row.skip_reason.empty());
      continue;
    }
    EXPECT_TRUE(row.skip_reason.empty());
    EXPECT_NEAR(*row.bias_disparity, (*row.pr_output - *row.pr_input) / *row.pr_input, 1e-12);
  }
}

TEST(RunExperiment, MeanRowsAverageFoldPreferenceRatios) {
  testing::TempDir dir;
  auto c = SmallSynthetic(dir.path());
  c.algorithms = {Algorithm::kUserItemAvg};
  const auto r = RunExperiment(c);
  std::map<std::pair<UserGroup, ArtistCategory>, std::pair<double, double>> sums;
  for (const auto& row : r.audit) {
    if (row.fold == "mean") continue;
    sums[{row.group, row.category}].first += *row.pr_input / 3.0;
    sums[{row.group, row.category}].second += *row.pr_output / 3.0;
  }
  for (const auto& row : r.audit) {
    if (row.fold != "mean") continue;
    const auto [in, out] = sums.at({row.group, row.category});
    EXPECT_NEAR(*row.pr_input, in, 1e-12);
    EXPECT_NEAR(*row.pr_output, out, 1e-12);
    EXPECT_NEAR(*row.bias_disparity, (out - in) / in, 1e-12);
  }
  double ndcg = 0;
  for (const auto& m : r.metrics) ndcg += m.fold == "mean" ? 0.0 : m.report.ndcg / 3.0;
  EXPECT_NEAR(r.metrics.back().report.ndcg, ndcg, 1e-12);
  EXPECT_EQ(r.metrics.back().fold, "mean");
}

TEST(RunExperiment, ProportionalOracleHasZeroDisparity) {
  for (std::uint64_t seed : {1, 2, 3}) {
    testing::TempDir dir;
    auto c = SmallSynthetic(dir.path());
    c.seed = seed;
    c.algorithms = {Algorithm::kMostPopular};
    const ListProvider oracle = ProportionalOracle();
    const auto r = RunExperiment(c, std::span<const ListProvider>(&oracle, 1));
    std::size_t cells = 0;
    for (const auto& row : r.audit) {
      if (row.algorithm != oracle.name) continue;
      ++cells;
      ASSERT_TRUE(row.bias_disparity);
      EXPECT_NEAR(*row.bias_disparity, 0.0, 1e-12);
    }
    EXPECT_EQ(cells, 16u);
  }
}

TEST(RunExperiment, DeterministicAcrossRunsAndThreads) {
  testing::TempDir a, b, d;
  auto c = SmallSynthetic(a.path());
  const auto first = AuditText(RunExperiment(c));
  c.output_dir = b.path();
  EXPECT_EQ(AuditText(RunExperiment(c)), first);
  c.output_dir = d.path();
  c.threads = 4;
  EXPECT_EQ(AuditText(RunExperiment(c)), first);
  c.seed = 43;
  EXPECT_NE(AuditText(RunExperiment(c)), first);
}

// Six single-artist listeners make m0 the most popular artist; evaluated
// users never heard m0, so MostPopular recommends [m0] to all of them in
// catalog mode.
TEST(RunExperiment, MostPopularMatchesHandComputedDisparity) {
  testing::TempDir dir;
  std::string events, profiles;
  for (int f = 0; f < 6; ++f) {
    events += "fill" + std::to_string(f) + "\tm0\t\t5\n";
    profiles += "fill" + std::to_string(f) + (f % 2 ? "\tf" : "\tm") + "\t\t\t\n";
  }
  events += "e1\tf0\t\t3\ne1\tf1\t\t4\ne1\tm1\t\t5\n";
  events += "e2\tf0\t\t3\ne2\tf1\t\t2\ne2\tf2\t\t9\n";
  events += "e3\tm1\t\t3\ne3\tm2\t\t4\ne3\tf2\t\t5\n";
  profiles += "e1\tm\t\t\t\ne2\tf\t\t\t\ne3\tm\t\t\t\n";
  testing::WriteText(dir / "events.tsv", events);
  testing::WriteText(dir / "profiles.tsv", profiles);
  testing::WriteText(dir / "genders.tsv", "m0\tmale\nm1\tmale\nm2\tmale\nf0\tfemale\nf1\tfemale\nf2\tfemale\n");

  ExperimentConfig c;
  c.dataset = DatasetFlavor::kLfm360k;
  c.events_path = dir / "events.tsv";
  c.profiles_path = dir / "profiles.tsv";
  c.gender_map_path = dir / "genders.tsv";
  c.filter.min_unique_artists_per_user = 1;
  c.filter.min_users_per_artist = 1;
  c.folds.n_folds = 2;
  c.folds.min_unique_artists = 3;
  c.folds.held_out_per_user = 2;
  c.folds.list_size = 1;
  c.sampling.sample_fraction = 1.0;
  c.candidates = CandidateMode::kCatalog;
  c.algorithms = {Algorithm::kMostPopular};
  c.output_dir = dir / "out";
  const auto r = RunExperiment(c);

  // Input over e1, e3 (male): 3 of 6 entries male; e2 (female): 0 of 3.
  // Output: every list is [m0].
  std::map<std::pair<UserGroup, ArtistCategory>, std::optional<double>> expected = {
      {{UserGroup::kMaleUsers, ArtistCategory::kMaleArtists}, (1.0 - 0.5) / 0.5},
      {{UserGroup::kMaleUsers, ArtistCategory::kFemaleArtists}, (0.0 - 0.5) / 0.5},
      {{UserGroup::kFemaleUsers, ArtistCategory::kMaleArtists}, std::nullopt},
      {{UserGroup::kFemaleUsers, ArtistCategory::kFemaleArtists}, (0.0 - 1.0) / 1.0}};
  ASSERT_EQ(r.audit.size(), 12u);
  for (const auto& row : r.audit) {
    const auto& want = expected.at({row.group, row.category});
    ASSERT_EQ(row.bias_disparity.has_value(), want.has_value()) << row.fold;
    if (want) {
      EXPECT_NEAR(*row.bias_disparity, *want, 1e-12);
    } else {
      EXPECT_EQ(row.skip_reason, "input preference ratio is zero");
    }
  }
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.report.users_evaluated, m.fold == "mean" ? 6u : 3u);
    EXPECT_NEAR(m.report.coverage, 1.0 / 6.0, 1e-12);
    EXPECT_EQ(m.report.spread, 0.0);
  }
}

TEST(RunExperiment, ExtremeExperimentRestrictsUsers) {
  testing::TempDir dir;
  auto c = SmallSynthetic(dir.path());
  c.sampling.design = SamplingDesign::kExtremePreference;
  c.sampling.sample_fraction = 1.0;
  c.algorithms = {Algorithm::kMostPopular};
  const auto r = RunExperiment(c);
  EXPECT_GT(r.sampled_users, 0u);
  EXPECT_LT(r.sampled_users, r.n_users);
  for (const auto& row : r.audit) {
    EXPECT_EQ(row.experiment, "extreme");
    if (row.category == ArtistCategory::kFemaleArtists) EXPECT_GT(*row.pr_input, 0.6);
  }
}

TEST(RunExperiment, ExportsModelsWhenRequested) {
  testing::TempDir dir;
  auto c = SmallSynthetic(dir.path());
  c.algorithms = {Algorithm::kUserItemAvg};
  c.model_dir = dir / "models";
  RunExperiment(c);
  for (int f = 0; f < 3; ++f) {
    EXPECT_TRUE(std::filesystem::exists(dir / "models" / ("UserItemAvg.fold" + std::to_string(f) + ".tsv")));
  }
}

TEST(RunExperiment, FatalErrorsAreStageTagged) {
  testing::TempDir dir;
  auto c = SmallSynthetic(dir.path());
  c.sampling.design = SamplingDesign::kExtremePreference;
  c.sampling.extreme_threshold = 0.999;
  try {
    RunExperiment(c);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "sample");
  }
}

}  // namespace
}  // namespace fairrec
