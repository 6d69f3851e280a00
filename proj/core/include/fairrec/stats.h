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

#ifndef FAIRREC_STATS_H_
#define FAIRREC_STATS_H_

#include <span>

namespace fairrec {

struct TTestResult {
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided
  bool significant = false;
};

// Two-sample Welch t-test; significant iff p < alpha. Both samples need at
// least two values (std::invalid_argument otherwise).
//
// Zero-variance rule: a sample with zero variance gets the variance floor
// (DBL_EPSILON * max(1, |mean_a|, |mean_b|))^2. Equal means with zero
// variance on both sides return t = 0, p = 1. This keeps constant per-fold
// metrics with different means significant instead of dividing by zero.
TTestResult WelchTTest(std::span<const double> a, std::span<const double> b, double alpha);

}  // namespace fairrec

#endif  // FAIRREC_STATS_H_
