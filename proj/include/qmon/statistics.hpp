// Copyright 2026 The qmon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmon/random.hpp"

namespace qmon {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

inline double compensated_mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

/// Standard error of the mean from the unbiased sample variance.
inline double standard_error(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = compensated_mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(n - 1) / static_cast<double>(n));
}

inline constexpr int kDefaultBootstrapSamples = 200;
inline constexpr std::uint64_t kBootstrapSeed = 0xb0075742ULL;

/// Draws `samples` resamples (with replacement) of {0..n-1} and hands each to
/// `statistic`, returning the collected values. Deterministic for a given seed.
inline std::vector<double> bootstrap(std::size_t n, int samples,
                                     const std::function<double(const std::vector<std::size_t>&)>& statistic,
                                     std::uint64_t seed = kBootstrapSeed) {
  if (n == 0) throw std::invalid_argument("bootstrap of an empty sample");
  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  std::vector<double> out;
  out.reserve(samples);
  for (int b = 0; b < samples; ++b) {
    for (auto& i : idx) i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    out.push_back(statistic(idx));
  }
  return out;
}

inline double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return standard_error(xs) * std::sqrt(static_cast<double>(xs.size()));
}

}  // namespace qmon
