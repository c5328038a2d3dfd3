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

#ifndef FLIPPRINT_DRAM_HAMMER_HPP_
#define FLIPPRINT_DRAM_HAMMER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iterator>
#include <vector>

#include "flipprint/dram/device.hpp"
#include "flipprint/templating/pattern.hpp"

namespace flipprint::dram {

struct Flip {
  std::uint64_t index;  // global capacitor index
  FlipDirection direction;

  friend bool operator==(const Flip&, const Flip&) = default;
};

/// Flips of one execution, sorted by index without duplicates.
struct FlipSet {
  std::vector<Flip> flips;

  [[nodiscard]] bool empty() const noexcept { return flips.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return flips.size(); }

  /// Set union; on a shared index the direction is the cell's own, so the
  /// two sides always agree.
  void merge(const FlipSet& other) {
    std::vector<Flip> out;
    out.reserve(flips.size() + other.flips.size());
    std::set_union(flips.begin(), flips.end(), other.flips.begin(), other.flips.end(), std::back_inserter(out),
                   [](const Flip& a, const Flip& b) { return a.index < b.index; });
    flips = std::move(out);
  }

  friend bool operator==(const FlipSet&, const FlipSet&) = default;
};

/// Double-sided primary pair (row_low, row_low + 2) in one flat bank, plus
/// the decoy rows the secondary slots activate.
struct HammerTarget {
  std::uint64_t flat_bank = 0;
  std::uint64_t row_low = 0;
  std::vector<std::uint64_t> secondary_rows;

  [[nodiscard]] std::uint64_t row_high() const noexcept { return row_low + 2; }
};

inline constexpr std::uint64_t kDecayRadius = 2;

/// Distance-decay coupling between an aggressor and a victim row.
inline constexpr double victim_weight(std::uint64_t distance) noexcept {
  return distance == 1 ? 1.0 : distance == 2 ? 0.02 : 0.0;
}

/// Summed coupling of a victim row to both primaries. Aggressor rows
/// themselves are never victims of their own pair.
inline double pair_weight(std::uint64_t row_low, std::uint64_t victim) noexcept {
  const std::uint64_t row_high = row_low + 2;
  if (victim == row_low || victim == row_high) return 0.0;
  auto dist = [](std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; };
  return victim_weight(dist(victim, row_low)) + victim_weight(dist(victim, row_high));
}

/// TRR is evaded iff the decoys saturate the tracker.
inline bool evades_trr(const templating::HammeringPattern& pattern, const TrrModel& trr) {
  return !trr.enabled || pattern.secondary_slot_count() >= trr.tracker_capacity;
}

/// Effective primary exposure: activations scaled by the environment and by
/// the primaries' share of each refresh interval.
inline double effective_exposure(const templating::HammeringPattern& pattern, const TrrModel& trr,
                                 std::uint64_t activations, const Environment& env) {
  return static_cast<double>(activations) * env.activation_scale *
         templating::primary_share(pattern, trr.refresh_interval_slots);
}

/// p = 1 - exp(-s * exposure * weight).
inline double flip_probability(double s, double exposure, double weight) noexcept {
  return -std::expm1(-s * exposure * weight);
}

/// Victim rows of a pair inside the bank, lowest first.
inline std::vector<std::uint64_t> victim_rows(std::uint64_t row_low, std::uint64_t rows_per_bank) {
  std::vector<std::uint64_t> out;
  const std::uint64_t first = row_low >= kDecayRadius ? row_low - kDecayRadius : 0;
  const std::uint64_t last = std::min(row_low + 2 + kDecayRadius, rows_per_bank - 1);
  for (std::uint64_t v = first; v <= last; ++v)
    if (pair_weight(row_low, v) > 0.0) out.push_back(v);
  return out;
}

inline void check_target(const DimmDevice& device, const HammerTarget& target) {
  const DimmGeometry g = device.geometry();
  if (target.flat_bank >= g.flat_banks()) throw UsageError("hammer: bank out of range");
  if (target.row_high() >= g.rows_per_bank) throw UsageError("hammer: primary pair out of range");
  for (std::uint64_t r : target.secondary_rows)
    if (r >= g.rows_per_bank || r == target.row_low || r == target.row_high())
      throw UsageError("hammer: secondary row out of range or equal to a primary");
}

/// Hammer one double-sided pair with `pattern`. Draws one uniform per
/// susceptible victim cell, in (row, cell) order, so a fixed stream yields
/// flips that are monotone in the exposure.
inline FlipSet hammer_execute(const DimmDevice& device, const templating::HammeringPattern& pattern,
                              const HammerTarget& target, std::uint64_t activations, const Environment& env,
                              RngStream& rng) {
  pattern.validate();
  env.validate();
  check_target(device, target);
  if (activations < 1) throw UsageError("hammer: activations must be >= 1");

  FlipSet out;
  if (!evades_trr(pattern, device.trr)) return out;

  const DimmGeometry g = device.geometry();
  const double exposure = effective_exposure(pattern, device.trr, activations, env);
  for (std::uint64_t v : victim_rows(target.row_low, g.rows_per_bank)) {
    const double w = pair_weight(target.row_low, v);
    for (const Cell& c : device.field.row_cells(target.flat_bank, v)) {
      if (uniform01(rng) < flip_probability(c.s, exposure, w))
        out.flips.push_back({g.capacitor_index(target.flat_bank, v, c.cell), c.direction});
    }
  }
  return out;
}

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_HAMMER_HPP_
