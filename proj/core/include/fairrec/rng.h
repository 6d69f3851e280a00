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

#ifndef FAIRREC_RNG_H_
#define FAIRREC_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace fairrec {

// Deterministic random streams.
//
// Every stream is derived from a master seed and a list of stable string
// labels (stage, fold, user id, ...). The splitting rule is:
//
//   state = splitmix64(seed)
//   for each label: state = splitmix64(state ^ fnv1a64(label))
//
// and the resulting state seeds a xoshiro256** generator through four
// successive splitmix64 outputs. Streams never touch global state, so the
// draws for one (fold, user) pair do not depend on iteration order or on the
// number of worker threads.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed);
  RandomStream(std::uint64_t seed, std::initializer_list<std::string_view> labels);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform01();
  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t UniformBelow(std::uint64_t bound);
  // Standard normal via Box-Muller (no cached second value).
  double Normal();
  // Gamma(shape, 1) via Marsaglia-Tsang.
  double Gamma(double shape);
  // Beta(a, b) from two gammas.
  double Beta(double a, double b);

 private:
  std::uint64_t s_[4];
};

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view text);

// Uniform sample of `count` distinct positions from [0, n), returned in draw
// order (partial Fisher-Yates).
std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t count,
                                                  RandomStream& rng);

}  // namespace fairrec

#endif  // FAIRREC_RNG_H_
