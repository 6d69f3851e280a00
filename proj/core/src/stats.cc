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

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace fairrec {

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};

Moments SampleMoments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

TTestResult WelchTTest(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() < 2 || b.size() < 2) {
    throw std::invalid_argument("WelchTTest: each sample needs at least two values");
  }
  Moments ma = SampleMoments(a);
  Moments mb = SampleMoments(b);
  TTestResult result;
  if (ma.variance == 0.0 && mb.variance == 0.0 && ma.mean == mb.mean) {
    result.degrees_of_freedom = static_cast<double>(a.size() + b.size() - 2);
    return result;
  }
  const double scale = std::max({1.0, std::abs(ma.mean), std::abs(mb.mean)});
  const double floor = (DBL_EPSILON * scale) * (DBL_EPSILON * scale);
  if (ma.variance == 0.0) ma.variance = floor;
  if (mb.variance == 0.0) mb.variance = floor;

  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double va = ma.variance / na;
  const double vb = mb.variance / nb;
  result.t_statistic = (ma.mean - mb.mean) / std::sqrt(va + vb);
  result.degrees_of_freedom =
      (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  const boost::math::students_t dist(result.degrees_of_freedom);
  result.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t_statistic)));
  result.p_value = std::min(1.0, result.p_value);
  result.significant = result.p_value < alpha;
  return result;
}

}  // namespace fairrec
