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

#ifndef FLIPPRINT_COMMON_DISTRIBUTION_HPP_
#define FLIPPRINT_COMMON_DISTRIBUTION_HPP_

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "flipprint/common/error.hpp"

namespace flipprint {

/// Sparse non-negative weights over capacitor indices, kept sorted by index
/// with no zero entries. W is std::uint64_t for observed flip counts and
/// double for closed-form probabilities.
template <typename W>
class SparseDistribution {
 public:
  using Entry = std::pair<std::uint64_t, W>;

  SparseDistribution() = default;

  /// Entries in any order; duplicates are summed and zeros dropped.
  explicit SparseDistribution(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (const auto& [i, w] : entries) {
      if (w < W{0}) throw UsageError("distribution weights must be non-negative");
      if (w == W{0}) continue;
      if (!entries_.empty() && entries_.back().first == i)
        entries_.back().second += w;
      else
        entries_.emplace_back(i, w);
    }
    for (const auto& e : entries_) total_ += e.second;
  }

  [[nodiscard]] const std::vector<Entry>& entries() const noexcept { return entries_; }
  [[nodiscard]] W total() const noexcept { return total_; }
  [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
  [[nodiscard]] std::size_t support_size() const noexcept { return entries_.size(); }

  [[nodiscard]] W weight(std::uint64_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::uint64_t i) { return e.first < i; });
    return it != entries_.end() && it->first == index ? it->second : W{0};
  }

  [[nodiscard]] double probability(std::uint64_t index) const {
    return total_ == W{0} ? 0.0 : static_cast<double>(weight(index)) / static_cast<double>(total_);
  }

  /// Pointwise sum, used when merging chunk observations.
  [[nodiscard]] SparseDistribution merged(const SparseDistribution& other) const {
    SparseDistribution out;
    out.entries_.reserve(entries_.size() + other.entries_.size());
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() || b != other.entries_.end()) {
      if (b == other.entries_.end() || (a != entries_.end() && a->first < b->first)) {
        out.entries_.push_back(*a++);
      } else if (a == entries_.end() || b->first < a->first) {
        out.entries_.push_back(*b++);
      } else {
        out.entries_.emplace_back(a->first, a->second + b->second);
        ++a;
        ++b;
      }
    }
    out.total_ = total_ + other.total_;
    return out;
  }

  friend bool operator==(const SparseDistribution&, const SparseDistribution&) = default;

 private:
  std::vector<Entry> entries_;
  W total_{0};
};

/// Observed flip counts per chunk-local capacitor index.
using BitFlipDistribution = SparseDistribution<std::uint64_t>;
/// Exact per-capacitor probabilities (unnormalised weights allowed).
using ProbabilityDistribution = SparseDistribution<double>;

}  // namespace flipprint

#endif  // FLIPPRINT_COMMON_DISTRIBUTION_HPP_
