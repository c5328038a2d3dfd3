// Copyright 2026, The flipprint authors
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


#ifndef FLIPPRINT_ANALYSIS_ENTROPY_HPP_
#define FLIPPRINT_ANALYSIS_ENTROPY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "flipprint/common/error.hpp"

namespace flipprint::analysis {

/// log2 C(n, k): the bits needed to name which k of n cells flipped.
inline double theoretical_entropy_bits(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw UsageError("theoretical_entropy_bits: need k <= n");
  const std::uint64_t m = std::min(k, n - k);
  if (m <= 64) {
    double bits = 0.0;
    for (std::uint64_t i = 0; i < m; ++i)
      bits += std::log2(static_cast<double>(n - i) / static_cast<double>(i + 1));
    return bits;
  }
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(m);
  return (std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0)) / std::log(2.0);
}

/// Bits needed to tell `population` items apart.
inline double required_entropy_bits(double population) {
  if (!(population >= 1.0)) throw UsageError("required_entropy_bits: population must be >= 1");
  return std::log2(population);
}

struct EmpiricalEntropy {
  double bits = 0.0;
  double normalized = 0.0;
  std::size_t classes = 0;
  std::size_t chunks = 0;
};

/// Shannon entropy of the partition of chunks into classes with exactly the
/// same set of flipped indices, and that entropy over its maximum
/// log2(#chunks). A single chunk is trivially all-distinct and reports 1.
inline EmpiricalEntropy empirical_entropy(std::vector<std::vector<std::uint64_t>> flip_sets) {
  if (flip_sets.empty()) throw UsageError("empirical_entropy: no chunks");
  for (auto& s : flip_sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  std::sort(flip_sets.begin(), flip_sets.end());
  const double n = static_cast<double>(flip_sets.size());
  EmpiricalEntropy out;
  out.chunks = flip_sets.size();
  for (std::size_t i = 0; i < flip_sets.size();) {
    std::size_t j = i;
    while (j < flip_sets.size() && flip_sets[j] == flip_sets[i]) ++j;
    const double p = static_cast<double>(j - i) / n;
    out.bits -= p * std::log2(p);
    ++out.classes;
    i = j;
  }
  out.bits = std::max(0.0, out.bits);
  if (out.chunks == 1)
    out.normalized = 1.0;
  else if (out.classes == out.chunks)
    out.normalized = 1.0;  // exact, not subject to rounding
  else
    out.normalized = std::clamp(out.bits / std::log2(n), 0.0, 1.0);
  return out;
}

}  // namespace flipprint::analysis

#endif  // FLIPPRINT_ANALYSIS_ENTROPY_HPP_
