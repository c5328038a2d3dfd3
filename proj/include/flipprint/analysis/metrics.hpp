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


#ifndef FLIPPRINT_ANALYSIS_METRICS_HPP_
#define FLIPPRINT_ANALYSIS_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "flipprint/common/error.hpp"

namespace flipprint::analysis {

/// |a ∩ b| / |a ∪ b| over sorted, duplicate-free index lists.
inline double jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  if (a.empty() && b.empty()) throw UndefinedInputError("jaccard: both sets empty");
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

struct MetricsReport {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  double precision = 1.0;
  double recall = 1.0;
  bool precision_degenerate = false;  // TP + FP == 0, precision reported as 1
  bool recall_degenerate = false;     // TP + FN == 0, recall reported as 1
  double threshold = 0.0;
  std::string scenario;

  [[nodiscard]] std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
};

inline MetricsReport metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn,
                                         double threshold, std::string scenario = {}) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.tn = tn;
  r.fn = fn;
  r.threshold = threshold;
  r.scenario = std::move(scenario);
  const std::uint64_t total = r.total();
  r.accuracy = total == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total);
  r.precision_degenerate = tp + fp == 0;
  r.precision = r.precision_degenerate ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall_degenerate = tp + fn == 0;
  r.recall = r.recall_degenerate ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  return r;
}

/// One identification outcome: the device the matcher named (empty for a
/// new-device verdict), the true device, and whether that device was enrolled.
struct IdentificationOutcome {
  std::optional<std::uint32_t> predicted;
  std::uint32_t truth = 0;
  bool enrolled = true;
};

inline MetricsReport classification_metrics(const std::vector<IdentificationOutcome>& outcomes, double threshold,
                                            std::string scenario = {}) {
  if (outcomes.empty()) throw UsageError("classification_metrics: no decisions");
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& o : outcomes) {
    if (o.predicted) {
      if (o.enrolled && *o.predicted == o.truth)
        ++tp;
      else
        ++fp;
    } else {
      if (o.enrolled)
        ++fn;
      else
        ++tn;
    }
  }
  return metrics_from_counts(tp, fp, tn, fn, threshold, std::move(scenario));
}

/// Pairwise verification at threshold tau: a pair is declared "same device"
/// iff its divergence is <= tau.
inline MetricsReport verification_metrics(const std::vector<double>& same, const std::vector<double>& cross,
                                          double threshold, std::string scenario = {}) {
  std::uint64_t tp = 0, fp = 0;
  for (double v : same) tp += v <= threshold;
  for (double v : cross) fp += v <= threshold;
  return metrics_from_counts(tp, fp, cross.size() - fp, same.size() - tp, threshold, std::move(scenario));
}

struct ThresholdSweep {
  std::vector<MetricsReport> rows;  // one per candidate threshold, ascending
  double max_same = 0.0;
  double min_cross = 0.0;
  bool perfect_separation = false;
  std::size_t best = 0;  // highest accuracy, lowest threshold on ties
};

inline ThresholdSweep threshold_sweep(const std::vector<double>& same, const std::vector<double>& cross,
                                      std::string scenario = {}) {
  if (same.empty() || cross.empty()) throw UsageError("threshold_sweep: both pair lists must be non-empty");
  std::vector<double> taus;
  taus.reserve(same.size() + cross.size());
  taus.insert(taus.end(), same.begin(), same.end());
  taus.insert(taus.end(), cross.begin(), cross.end());
  // Pairs with no comparable chunk carry +inf and never match.
  taus.erase(std::remove_if(taus.begin(), taus.end(), [](double t) { return !std::isfinite(t); }), taus.end());
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  if (taus.empty()) taus.push_back(1.0);

  std::vector<double> s = same;
  std::vector<double> c = cross;
  std::sort(s.begin(), s.end());
  std::sort(c.begin(), c.end());

  ThresholdSweep out;
  out.max_same = s.back();
  out.min_cross = c.front();
  out.perfect_separation = out.max_same < out.min_cross;
  out.rows.reserve(taus.size());
  for (double t : taus) {
    const auto tp = static_cast<std::uint64_t>(std::upper_bound(s.begin(), s.end(), t) - s.begin());
    const auto fp = static_cast<std::uint64_t>(std::upper_bound(c.begin(), c.end(), t) - c.begin());
    out.rows.push_back(metrics_from_counts(tp, fp, c.size() - fp, s.size() - tp, t, scenario));
    if (out.rows.back().accuracy > out.rows[out.best].accuracy) out.best = out.rows.size() - 1;
  }
  return out;
}

}  // namespace flipprint::analysis

#endif  // FLIPPRINT_ANALYSIS_METRICS_HPP_
