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

#ifndef FLIPPRINT_DRAM_DEVICE_HPP_
#define FLIPPRINT_DRAM_DEVICE_HPP_

#include <cstdint>
#include <string>

#include "flipprint/addrmap/stock.hpp"
#include "flipprint/dram/field.hpp"
#include "flipprint/dram/geometry.hpp"

namespace flipprint::dram {

/// Behavioural TRR: the tracker follows up to `tracker_capacity` aggressor
/// rows per bank per refresh interval. `refresh_interval_slots` is the
/// activation budget of one interval.
struct TrrModel {
  bool enabled = true;
  std::uint32_t tracker_capacity = 4;
  std::uint32_t refresh_interval_slots = 128;

  void validate() const {
    if (enabled && tracker_capacity < 1) throw ConfigError("trr: tracker_capacity must be >= 1 when enabled");
    if (refresh_interval_slots < 1) throw ConfigError("trr: refresh_interval_slots must be >= 1");
  }

  friend bool operator==(const TrrModel&, const TrrModel&) = default;
};

/// External conditions. activation_scale 1.0 is nominal CPU frequency; lower
/// values model lower frequency or background load.
struct Environment {
  double activation_scale = 1.0;
  std::string temperature_tag = "ambient";  // recorded only

  void validate() const {
    if (!(activation_scale > 0.0)) throw UsageError("environment: activation_scale must be > 0");
  }
};

struct DimmDevice {
  std::uint32_t id = 0;
  std::string tag;  // manufacturer group
  addrmap::Layout layout = addrmap::layout_1rx8();
  SusceptibilityField field;
  TrrModel trr;
  std::uint32_t seat_epoch = 0;

  [[nodiscard]] DimmGeometry geometry() const { return layout.geometry(); }
  [[nodiscard]] const addrmap::AddressMapping& mapping() const noexcept { return layout.mapping; }
};

inline constexpr double kDefaultReseatPerturbation = 0.85;
inline constexpr double kDefaultReseatJitter = 0.2;

/// Remove and re-insert the module: returns a new device value whose field
/// has `perturbation` of its entries resampled and the rest jittered.
inline DimmDevice reseat(const DimmDevice& device, double perturbation, std::uint64_t seed,
                         double jitter = kDefaultReseatJitter) {
  DimmDevice out = device;
  out.field = device.field.reseated({seed, perturbation, jitter});
  out.seat_epoch = device.seat_epoch + 1;
  return out;
}

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_DEVICE_HPP_
