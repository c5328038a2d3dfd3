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


#ifndef FLIPPRINT_DRAM_GROUND_TRUTH_HPP_
#define FLIPPRINT_DRAM_GROUND_TRUTH_HPP_

#include <cstdint>
#include <vector>

#include "flipprint/hammering/sweep.hpp"

namespace flipprint::dram {

/// Exact per-sweep flip probability of every susceptible cell in the chunk,
/// normalised to sum to 1. This is the limit of extract_distribution as the
/// repeat count grows: a cell flips in a sweep with probability
/// 1 - prod_j (1 - p_j) = 1 - exp(-s * exposure * sum_j w_j).
inline ProbabilityDistribution ground_truth_distribution(const DimmDevice& device, const addrmap::ChunkHandle& chunk,
                                                         const templating::HammeringPattern& pattern,
                                                         const hammering::SweepConfig& config,
                                                         const Environment& env) {
  config.validate();
  const hammering::ChunkView view = hammering::chunk_view(device, chunk, config.bank);
  if (!evades_trr(pattern, device.trr)) return {};
  const auto pairs = hammering::sweep_pairs(view.rows, config);
  const double exposure = effective_exposure(pattern, device.trr, config.activations, env);

  std::vector<ProbabilityDistribution::Entry> entries;
  double total = 0.0;
  for (std::uint64_t r = 0; r < view.rows; ++r) {
    double weight = 0.0;
    for (std::uint64_t lo : pairs) weight += pair_weight(lo, r);
    if (weight <= 0.0) continue;
    const std::uint64_t row = view.base_row + r;
    for (const Cell& c : device.field.row_cells(view.flat_bank, row)) {
      const double q = flip_probability(c.s, exposure, weight);
      if (q <= 0.0) continue;
      entries.emplace_back(view.local_index(row, c.cell), q);
      total += q;
    }
  }
  for (auto& e : entries) e.second /= total;
  return ProbabilityDistribution(std::move(entries));
}

/// (s, summed pair weight) of every susceptible cell the sweep can flip
/// inside the chunk. Lets callers evaluate expected flip counts at many
/// exposures without regenerating rows.
struct Exposed {
  double s;
  double weight;
};

inline std::vector<Exposed> exposed_cells(const DimmDevice& device, const addrmap::ChunkHandle& chunk,
                                          const hammering::SweepConfig& config) {
  const hammering::ChunkView view = hammering::chunk_view(device, chunk, config.bank);
  const auto pairs = hammering::sweep_pairs(view.rows, config);
  std::vector<Exposed> out;
  for (std::uint64_t r = 0; r < view.rows; ++r) {
    double weight = 0.0;
    for (std::uint64_t lo : pairs) weight += pair_weight(lo, r);
    if (weight <= 0.0) continue;
    for (const Cell& c : device.field.row_cells(view.flat_bank, view.base_row + r)) out.push_back({c.s, weight});
  }
  return out;
}

/// Expected number of distinct flips in one sweep at the given exposure.
inline double expected_sweep_flips(const std::vector<Exposed>& cells, double exposure) {
  double sum = 0.0;
  for (const Exposed& c : cells) sum += flip_probability(c.s, exposure, c.weight);
  return sum;
}

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_GROUND_TRUTH_HPP_
