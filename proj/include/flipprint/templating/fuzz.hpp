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


#ifndef FLIPPRINT_TEMPLATING_FUZZ_HPP_
#define FLIPPRINT_TEMPLATING_FUZZ_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/hammering/sweep.hpp"

namespace flipprint::templating {

/// Parameter ranges the fuzzer draws from, inclusive except phase which is
/// drawn in [0, phase_interval).
struct FuzzRanges {
  std::uint32_t slots_min = 2, slots_max = 24;
  std::uint32_t amplitude_min = 1, amplitude_max = 8;
  std::uint32_t frequency_min = 1, frequency_max = 8;
  std::uint32_t phase_interval = 128;

  void validate() const {
    if (slots_min < 2 || slots_min > slots_max) throw ConfigError("fuzz: need 2 <= slots_min <= slots_max");
    if (amplitude_min < 1 || amplitude_min > amplitude_max) throw ConfigError("fuzz: bad amplitude range");
    if (frequency_min < 1 || frequency_min > frequency_max) throw ConfigError("fuzz: bad frequency range");
    if (phase_interval < 1) throw ConfigError("fuzz: phase_interval must be >= 1");
  }
};

/// How a pattern is tried on a device: one sweep of one chunk.
struct TrialConfig {
  std::uint64_t chunk_id = 0;
  hammering::SweepConfig sweep = one_sweep();

  static hammering::SweepConfig one_sweep() {
    hammering::SweepConfig c;
    c.repeats = 1;
    return c;
  }
  std::uint64_t seed = 0x7472;
  dram::Environment env;
};

struct PatternScore {
  std::size_t pattern_index = 0;
  std::uint64_t total_flips = 0;
  std::uint64_t devices_covered = 0;
  std::size_t secondary_count = 0;
  std::map<std::uint32_t, std::uint64_t> per_device_flips;
};

namespace detail {
inline std::uint32_t draw_in(RngStream& rng, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(uniform_below(rng, std::uint64_t{hi} - lo + 1));
}
}  // namespace detail

/// Random pattern from the ranges: primaries at a random adjacent position,
/// the other slots filled with decoy roles (roles may repeat).
inline HammeringPattern random_pattern(RngStream& rng, const FuzzRanges& r) {
  const std::uint32_t n = detail::draw_in(rng, r.slots_min, r.slots_max);
  HammeringPattern p;
  p.primary_index = uniform_below(rng, n - 1);
  p.slots.assign(n, 0);
  const std::uint32_t decoy_slots = n - 2;
  for (std::uint32_t i = 0, k = 0; i < n; ++i) {
    if (i == p.primary_index) {
      p.slots[i] = kPrimaryLow;
    } else if (i == p.primary_index + 1) {
      p.slots[i] = kPrimaryHigh;
    } else {
      // Half the time a fresh role, otherwise any role up to the slot count.
      const bool fresh = uniform01(rng) < 0.5;
      p.slots[i] = static_cast<std::uint16_t>(2 + (fresh ? k : uniform_below(rng, decoy_slots)));
      ++k;
    }
  }
  p.phase = static_cast<std::uint32_t>(uniform_below(rng, r.phase_interval));
  p.amplitude = detail::draw_in(rng, r.amplitude_min, r.amplitude_max);
  p.frequency = detail::draw_in(rng, r.frequency_min, r.frequency_max);
  return p;
}

/// Flips the pattern produces on each device in one trial sweep.
inline PatternScore score_pattern(const HammeringPattern& pattern, const std::vector<dram::DimmDevice>& devices,
                                  const TrialConfig& trial = {}) {
  pattern.validate();
  PatternScore s;
  s.secondary_count = pattern.secondary_slot_count();
  const auto chunk = addrmap::ChunkHandle::from_index(trial.chunk_id);
  for (const auto& d : devices) {
    const auto obs = hammering::hammering_sweep(d, chunk, pattern, trial.sweep, trial.env,
                                                derive_seed(trial.seed, {d.id}));
    std::uint64_t flips = 0;
    for (const auto& sweep : obs.sweeps) flips += sweep.size();
    s.per_device_flips[d.id] = flips;
    s.total_flips += flips;
    s.devices_covered += flips > 0;
  }
  return s;
}

/// Try `budget` patterns and keep those that flip at least one bit on at
/// least one device. Trial 0 is always the plain double-sided pattern.
inline std::vector<HammeringPattern> fuzz_patterns(const std::vector<dram::DimmDevice>& devices, std::uint64_t budget,
                                                   std::uint64_t seed, const FuzzRanges& ranges = {},
                                                   const TrialConfig& trial = {}) {
  ranges.validate();
  std::vector<HammeringPattern> found;
  for (std::uint64_t t = 0; t < budget; ++t) {
    HammeringPattern p;
    if (t > 0) {
      RngStream rng = make_stream(seed, {0x66757a, t});
      p = random_pattern(rng, ranges);
    }
    if (score_pattern(p, devices, trial).total_flips > 0) found.push_back(std::move(p));
  }
  return found;
}

struct SelectedPattern {
  std::size_t pattern_index = 0;
  std::vector<std::uint32_t> devices;  // devices newly covered by this pattern
  std::uint64_t total_flips = 0;
};

/// Greedy set cover over devices. At each step the pattern covering the most
/// still-uncovered devices wins; ties go to more total flips, then fewer
/// secondaries, then the lower pattern index. Stops once `goal` of the
/// coverable devices are covered or nothing new can be covered.
inline std::vector<SelectedPattern> select_patterns(const std::vector<PatternScore>& scores, double goal = 1.0) {
  if (scores.empty()) throw UsageError("select_patterns: no scores");
  if (!(goal > 0.0 && goal <= 1.0)) throw UsageError("select_patterns: goal must lie in (0, 1]");
  std::set<std::uint32_t> coverable;
  for (const auto& s : scores)
    for (const auto& [dev, flips] : s.per_device_flips)
      if (flips > 0) coverable.insert(dev);
  const auto needed = static_cast<std::size_t>(std::ceil(goal * static_cast<double>(coverable.size()) - 1e-9));

  std::set<std::uint32_t> covered;
  std::vector<bool> used(scores.size(), false);
  std::vector<SelectedPattern> out;
  while (covered.size() < needed) {
    std::size_t best = scores.size();
    std::vector<std::uint32_t> best_new;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (used[i]) continue;
      std::vector<std::uint32_t> fresh;
      for (const auto& [dev, flips] : scores[i].per_device_flips)
        if (flips > 0 && !covered.count(dev)) fresh.push_back(dev);
      if (fresh.empty()) continue;
      bool better = best == scores.size() || fresh.size() > best_new.size();
      if (!better && fresh.size() == best_new.size()) {
        const auto& a = scores[i];
        const auto& b = scores[best];
        better = a.total_flips > b.total_flips ||
                 (a.total_flips == b.total_flips && a.secondary_count < b.secondary_count);
      }
      if (better) {
        best = i;
        best_new = std::move(fresh);
      }
    }
    if (best == scores.size()) break;
    used[best] = true;
    covered.insert(best_new.begin(), best_new.end());
    out.push_back({scores[best].pattern_index, std::move(best_new), scores[best].total_flips});
  }
  return out;
}

// --- pattern files -----------------------------------------------------------

inline constexpr int kPatternFileVersion = 1;

inline nlohmann::json patterns_to_json(const std::vector<HammeringPattern>& patterns) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : patterns) list.push_back(to_json(p));
  return {{"version", kPatternFileVersion}, {"patterns", list}};
}

inline std::vector<HammeringPattern> patterns_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("version", -1) != kPatternFileVersion)
    throw ConfigError("pattern file: unsupported or missing version");
  std::vector<HammeringPattern> out;
  for (const auto& p : j.at("patterns")) out.push_back(pattern_from_json(p));
  return out;
}

}  // namespace flipprint::templating

#endif  // FLIPPRINT_TEMPLATING_FUZZ_HPP_
