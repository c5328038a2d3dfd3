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


#ifndef FLIPPRINT_MATCHING_BIRTHDAY_HPP_
#define FLIPPRINT_MATCHING_BIRTHDAY_HPP_

#include <cmath>
#include <cstdint>

#include "flipprint/common/error.hpp"

namespace flipprint::matching {

/// Probability that two independent sessions of d chunks, each drawn
/// without replacement from N, share at least one chunk:
///   1 - prod_{i<d} (N - d - i) / (N - i).
/// Exactly 1 once 2d > N.
inline double overlap_probability(std::uint64_t n, std::uint64_t d) {
  if (d < 1 || d > n) throw UsageError("overlap_probability: need 1 <= d <= N");
  if (2 * d > n) return 1.0;
  double log_none = 0.0;
  for (std::uint64_t i = 0; i < d; ++i)
    log_none += std::log1p(-static_cast<double>(d) / static_cast<double>(n - i));
  return -std::expm1(log_none);
}

/// log of C(N - S, d) / C(N, d), the chance that d fresh chunks all miss a
/// reference of S chunks. -inf once d > N - S.
inline double log_miss_probability(std::uint64_t n, std::uint64_t s, std::uint64_t d) {
  if (d > n - s) return -INFINITY;
  double acc = 0.0;
  for (std::uint64_t i = 0; i < d; ++i)
    acc += std::log1p(-static_cast<double>(s) / static_cast<double>(n - i));
  return acc;
}

/// Smallest d with 1 - C(N - S, d) / C(N, d) >= target.
inline std::uint64_t required_sample_size(std::uint64_t n, std::uint64_t s, double target) {
  if (s >= n) throw UsageError("required_sample_size: need S < N");
  if (!(target > 0.0 && target < 1.0)) throw UsageError("required_sample_size: target must lie in (0, 1)");
  if (s == 0) throw UndefinedInputError("required_sample_size: an empty reference can never be overlapped");
  const double log_budget = std::log1p(-target);
  double acc = 0.0;
  for (std::uint64_t d = 1; d <= n - s; ++d) {
    acc += std::log1p(-static_cast<double>(s) / static_cast<double>(n - (d - 1)));
    if (acc <= log_budget) return d;
  }
  return n - s + 1;  // every non-reference chunk taken: the next one must overlap
}

}  // namespace flipprint::matching

#endif  // FLIPPRINT_MATCHING_BIRTHDAY_HPP_
