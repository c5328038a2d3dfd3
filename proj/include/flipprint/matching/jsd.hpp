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


#ifndef FLIPPRINT_MATCHING_JSD_HPP_
#define FLIPPRINT_MATCHING_JSD_HPP_

#include <algorithm>
#include <cmath>

#include "flipprint/common/distribution.hpp"

namespace flipprint::matching {

namespace detail {

/// Contribution of one index to JSD in bits. Written so that swapping p and
/// q gives the identical floating-point result.
inline double jsd_term(double p, double q) noexcept {
  const double m2 = p + q;  // 2 * M
  double t = 0.0;
  if (p > 0.0) t += 0.5 * p * std::log2(2.0 * p / m2);
  if (q > 0.0) t += 0.5 * q * std::log2(2.0 * q / m2);
  return t;
}

}  // namespace detail

/// Jensen-Shannon divergence, base 2, over the union of both supports.
/// Lies in [0, 1]: 0 iff P == Q as distributions, 1 iff the supports are
/// disjoint.
template <typename A, typename B>
double js_divergence(const SparseDistribution<A>& p, const SparseDistribution<B>& q) {
  if (!(p.total() > A{0}) || !(q.total() > B{0}))
    throw UndefinedInputError("js_divergence: empty distribution");
  const double tp = static_cast<double>(p.total());
  const double tq = static_cast<double>(q.total());
  auto a = p.entries().begin();
  auto b = q.entries().begin();
  const auto ae = p.entries().end();
  const auto be = q.entries().end();
  double sum = 0.0;
  while (a != ae || b != be) {
    double pv = 0.0;
    double qv = 0.0;
    if (b == be || (a != ae && a->first < b->first)) {
      pv = static_cast<double>(a->second) / tp;
      ++a;
    } else if (a == ae || b->first < a->first) {
      qv = static_cast<double>(b->second) / tq;
      ++b;
    } else {
      pv = static_cast<double>(a->second) / tp;
      qv = static_cast<double>(b->second) / tq;
      ++a;
      ++b;
    }
    sum += detail::jsd_term(pv, qv);
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace flipprint::matching

#endif  // FLIPPRINT_MATCHING_JSD_HPP_
