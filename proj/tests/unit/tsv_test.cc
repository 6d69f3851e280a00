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

#include "fairrec/tsv.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fairrec/error.h"
#include "fairrec/rng.h"
#include "test_util.h"

namespace fairrec {
namespace {

TEST(SplitTabs, KeepsEmptyFieldsAndStripsCr) {
  const auto f = SplitTabs("a\t\tb\t\r");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[2], "b");
  EXPECT_EQ(f[3], "");
}

TEST(SplitTabs, SingleField) {
  const auto f = SplitTabs("abc");
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0], "abc");
}

TEST(ParseNumbers, IntegersAndDoubles) {
  EXPECT_EQ(ParseInt("250"), 250);
  EXPECT_EQ(ParseInt("-3"), -3);
  EXPECT_FALSE(ParseInt("2x"));
  EXPECT_FALSE(ParseInt(""));
  EXPECT_DOUBLE_EQ(*ParseDouble("0.125"), 0.125);
  EXPECT_FALSE(ParseDouble("abc"));
  EXPECT_DOUBLE_EQ(*ParseDouble(" 1.5 "), 1.5);
  EXPECT_FALSE(ParseDouble("1.5x"));
}

TEST(Trim, StripsWhitespace) {
  EXPECT_EQ(Trim("  a b \t"), "a b");
  EXPECT_EQ(Trim(""), "");
}

TEST(CsvField, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(CsvField("plain"), "plain");
  EXPECT_EQ(CsvField("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvField("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvField("line\nbreak"), "\"line\nbreak\"");
  EXPECT_EQ(CsvRow({"a", "b,c", ""}), "a,\"b,c\",\r\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.125), "0.125");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(1.0), "1");
  EXPECT_EQ(FormatDouble(-0.5), "-0.5");
  EXPECT_EQ(FormatDouble(1.0 / 3.0), "0.3333333333333333");
}

TEST(FormatDouble, RoundTripsRandomValues) {
  RandomStream rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.Uniform01() - 0.5) * std::pow(10.0, static_cast<int>(rng.UniformBelow(20)) - 10);
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
}

TEST(ForEachLine, NumbersLinesFromOne) {
  testing::TempDir dir;
  testing::WriteText(dir / "f.txt", "x\ny\r\nz");
  std::vector<std::pair<std::size_t, std::string>> seen;
  ForEachLine(dir / "f.txt", "ingest",
              [&](std::size_t n, std::string_view line) { seen.emplace_back(n, std::string(line)); });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_EQ(seen[0].first, 1u);
  EXPECT_EQ(seen[2].second, "z");
}

TEST(ForEachLine, MissingFileIsStageTagged) {
  try {
    ForEachLine("/nonexistent/file.tsv", "ingest", [](std::size_t, std::string_view) {});
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
}

}  // namespace
}  // namespace fairrec
