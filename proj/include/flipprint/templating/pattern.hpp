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

#ifndef FLIPPRINT_TEMPLATING_PATTERN_HPP_
#define FLIPPRINT_TEMPLATING_PATTERN_HPP_

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/common/error.hpp"

namespace flipprint::templating {

/// Role ids 0 and 1 are the primary aggressors; every other id names a
/// secondary (decoy) aggressor. A role may recur across slots.
inline constexpr std::uint16_t kPrimaryLow = 0;
inline constexpr std::uint16_t kPrimaryHigh = 1;

/// One refresh interval worth of aggressor accesses.
struct HammeringPattern {
  std::vector<std::uint16_t> slots{kPrimaryLow, kPrimaryHigh};
  std::uint32_t phase = 0;
  std::uint32_t amplitude = 1;
  std::uint32_t frequency = 1;
  std::size_t primary_index = 0;  // primaries sit at slots[i], slots[i + 1]

  [[nodiscard]] std::size_t secondary_slot_count() const {
    std::set<std::uint16_t> roles;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (i != primary_index && i != primary_index + 1) roles.insert(slots[i]);
    return roles.size();
  }

  void validate() const {
    if (slots.size() < 2) throw UsageError("pattern: needs at least the two primary slots");
    if (primary_index + 1 >= slots.size()) throw UsageError("pattern: primary slots out of range");
    if (slots[primary_index] != kPrimaryLow || slots[primary_index + 1] != kPrimaryHigh)
      throw UsageError("pattern: primary slots must hold roles 0 and 1");
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (i != primary_index && i != primary_index + 1 && slots[i] <= kPrimaryHigh)
        throw UsageError("pattern: primary roles may only appear at the primary slots");
    if (amplitude < 1 || frequency < 1) throw UsageError("pattern: amplitude and frequency must be >= 1");
  }

  friend bool operator==(const HammeringPattern&, const HammeringPattern&) = default;
};

/// The plain double-sided pattern: two primaries, no decoys.
inline HammeringPattern double_sided_pattern() { return {}; }

/// Pattern with `secondaries` distinct decoy roles placed after the primaries.
inline HammeringPattern decoy_pattern(std::size_t secondaries, std::uint32_t amplitude = 1,
                                      std::uint32_t frequency = 1) {
  HammeringPattern p;
  for (std::size_t i = 0; i < secondaries; ++i) p.slots.push_back(static_cast<std::uint16_t>(2 + i));
  p.amplitude = amplitude;
  p.frequency = frequency;
  return p;
}

/// Slot-budget model: a refresh interval holds `interval_slots` activations.
/// Decoys take secondary_count * amplitude * frequency of them and the
/// primaries get what is left, as a fraction of the interval.
inline double primary_share(const HammeringPattern& p, std::uint32_t interval_slots) {
  const double budget = interval_slots;
  const double decoys = static_cast<double>(p.secondary_slot_count()) * p.amplitude * p.frequency;
  return budget <= 0.0 ? 0.0 : std::max(0.0, budget - decoys) / budget;
}

inline nlohmann::json to_json(const HammeringPattern& p) {
  return {{"slots", p.slots},
          {"phase", p.phase},
          {"amplitude", p.amplitude},
          {"frequency", p.frequency},
          {"primary_index", p.primary_index}};
}

inline HammeringPattern pattern_from_json(const nlohmann::json& j) {
  HammeringPattern p;
  try {
    p.slots = j.at("slots").get<std::vector<std::uint16_t>>();
    p.phase = j.at("phase").get<std::uint32_t>();
    p.amplitude = j.at("amplitude").get<std::uint32_t>();
    p.frequency = j.at("frequency").get<std::uint32_t>();
    p.primary_index = j.at("primary_index").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pattern: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace flipprint::templating

#endif  // FLIPPRINT_TEMPLATING_PATTERN_HPP_
