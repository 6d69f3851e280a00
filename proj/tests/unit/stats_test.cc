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

#include "fairrec/stats.h"

#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

namespace fairrec {
namespace {

TEST(WelchTTest, MatchesReferenceImplementation) {
  // Reference values from scipy.stats.ttest_ind(equal_var=False).
  const std::vector<double> a = {1, 2, 3, 4}, b = {2, 4, 6, 8, 10};
  const auto r = WelchTTest(a, b, 0.05);
  EXPECT_NEAR(r.t_statistic, -2.2514363231593695, 1e-12);
  EXPECT_NEAR(r.degrees_of_freedom, 5.520787746170677, 1e-9);
  EXPECT_NEAR(r.p_value, 0.06913359319239236, 1e-9);
  EXPECT_FALSE(r.significant);
  EXPECT_TRUE(WelchTTest(a, b, 0.1).significant);

  const std::vector<double> c = {0.81, 0.83, 0.80}, d = {0.78, 0.79, 0.80};
  const auto s = WelchTTest(c, d, 0.05);
  EXPECT_NEAR(s.t_statistic, 2.213594362117879, 1e-9);
  EXPECT_NEAR(s.p_value, 0.10206829667318171, 1e-9);
}

TEST(WelchTTest, IdenticalSamplesNotSignificant) {
  const std::vector<double> a = {0.3, 0.3, 0.3};
  const auto r = WelchTTest(a, a, 0.05);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.t_statistic, 0.0);
  EXPECT_FALSE(r.significant);
  const std::vector<double> b = {0.1, 0.5, 0.2};
  EXPECT_NEAR(WelchTTest(b, b, 0.05).p_value, 1.0, 1e-12);
}

TEST(WelchTTest, ConstantSamplesWithDifferentMeans) {
  const std::vector<double> a = {0.1, 0.1, 0.1}, b = {0.9, 0.9, 0.9};
  const auto r = WelchTTest(a, b, 0.05);
  EXPECT_TRUE(r.significant);
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_LT(r.t_statistic, 0.0);
}

TEST(WelchTTest, AlphaZeroNeverSignificant) {
  const std::vector<double> a = {0.1, 0.1, 0.1}, b = {0.9, 0.9, 0.9};
  EXPECT_FALSE(WelchTTest(a, b, 0.0).significant);
}

TEST(WelchTTest, NeedsTwoValuesPerSample) {
  const std::vector<double> one = {1.0}, two = {1.0, 2.0};
  EXPECT_THROW(WelchTTest(one, two, 0.05), std::invalid_argument);
  EXPECT_THROW(WelchTTest(two, one, 0.05), std::invalid_argument);
}

}  // namespace
}  // namespace fairrec
