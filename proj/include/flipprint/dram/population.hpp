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

#ifndef FLIPPRINT_DRAM_POPULATION_HPP_
#define FLIPPRINT_DRAM_POPULATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/addrmap/mapping_io.hpp"
#include "flipprint/dram/device.hpp"

namespace flipprint::dram {

/// One group of identical modules (same layout, vendor and TRR).
struct PopulationGroup {
  std::uint32_t count = 1;
  std::string tag = "A";
  addrmap::Layout layout = addrmap::layout_2rx8();
  SusceptibilityParams susceptibility;
  TrrModel trr;
};

struct PopulationSpec {
  std::vector<PopulationGroup> groups;

  void validate() const {
    if (groups.empty()) throw ConfigError("population: at least one group required");
    for (const auto& g : groups) {
      if (g.count < 1) throw ConfigError("population: group count must be >= 1");
      g.layout.geometry().validate();
      g.susceptibility.validate();
      g.trr.validate();
    }
  }

  [[nodiscard]] std::uint32_t size() const noexcept {
    std::uint32_t n = 0;
    for (const auto& g : groups) n += g.count;
    return n;
  }
};

inline std::uint64_t field_seed(std::uint64_t population_seed, std::uint32_t device_id) {
  return derive_seed(population_seed, {0x706f70, device_id});
}

/// Devices get ids 0..n-1 in group order; device i's field seed is a pure
/// function of (seed, i).
inline std::vector<DimmDevice> create_population(const PopulationSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<DimmDevice> devices;
  devices.reserve(spec.size());
  std::uint32_t id = 0;
  for (const auto& g : spec.groups) {
    const auto geometry = g.layout.geometry();
    for (std::uint32_t i = 0; i < g.count; ++i, ++id) {
      DimmDevice d;
      d.id = id;
      d.tag = g.tag;
      d.layout = g.layout;
      d.field = SusceptibilityField(g.susceptibility, field_seed(seed, id), geometry.cells_per_row);
      d.trr = g.trr;
      devices.push_back(std::move(d));
    }
  }
  return devices;
}

/// Desk-scale analogues of the lab groups: 36 x 2Rx8, 35 x 1Rx8, 11 x 1Rx16.
inline PopulationSpec population_preset(const std::string& name) {
  auto group = [](std::uint32_t n, const char* layout, const char* tag, std::uint32_t capacity) {
    PopulationGroup g;
    g.count = n;
    g.tag = tag;
    g.layout = addrmap::stock_layout(layout);
    g.trr.tracker_capacity = capacity;
    return g;
  };
  if (name == "2rx8-36") return {{group(36, "2Rx8", "A", 4)}};
  if (name == "1rx8-35") return {{group(35, "1Rx8", "A", 4)}};
  if (name == "1rx16-11") return {{group(11, "1Rx16", "A", 4)}};
  if (name == "stability-10") return {{group(6, "2Rx8", "A", 4), group(4, "2Rx8", "B", 6)}};
  if (name == "two-vendor") return {{group(6, "2Rx8", "A", 4), group(6, "2Rx8", "B", 6)}};
  if (name == "small-4") return {{group(4, "2Rx8", "A", 4)}};
  throw ConfigError("unknown population preset '" + name + "'");
}

// --- serialisation: geometry and seeds only, never materialised fields ------

inline nlohmann::json to_json(const DimmDevice& d) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : d.field.epochs())
    epochs.push_back({{"seed", e.seed}, {"perturbation", e.perturbation}, {"jitter", e.jitter}});
  const auto& p = d.field.params();
  return {{"id", d.id},
          {"tag", d.tag},
          {"layout", addrmap::layout_to_json(d.layout)},
          {"field",
           {{"seed", d.field.seed()},
            {"density", p.density},
            {"s_min", p.s_min},
            {"s_max", p.s_max},
            {"reseats", epochs}}},
          {"trr",
           {{"enabled", d.trr.enabled},
            {"tracker_capacity", d.trr.tracker_capacity},
            {"refresh_interval_slots", d.trr.refresh_interval_slots}}},
          {"seat_epoch", d.seat_epoch}};
}

inline DimmDevice device_from_json(const nlohmann::json& j) {
  try {
    DimmDevice d;
    d.id = j.at("id").get<std::uint32_t>();
    d.tag = j.at("tag").get<std::string>();
    d.layout = addrmap::layout_from_json(j.at("layout"));
    const auto& f = j.at("field");
    SusceptibilityParams p{f.at("density").get<double>(), f.at("s_min").get<double>(),
                           f.at("s_max").get<double>()};
    d.field = SusceptibilityField(p, f.at("seed").get<std::uint64_t>(), d.geometry().cells_per_row);
    for (const auto& e : f.at("reseats"))
      d.field = d.field.reseated(
          {e.at("seed").get<std::uint64_t>(), e.at("perturbation").get<double>(), e.at("jitter").get<double>()});
    const auto& t = j.at("trr");
    d.trr = {t.at("enabled").get<bool>(), t.at("tracker_capacity").get<std::uint32_t>(),
             t.at("refresh_interval_slots").get<std::uint32_t>()};
    d.trr.validate();
    d.seat_epoch = j.at("seat_epoch").get<std::uint32_t>();
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("device: ") + e.what());
  }
}

inline PopulationGroup group_from_json(const nlohmann::json& j) {
  try {
    PopulationGroup g;
    g.count = j.at("count").get<std::uint32_t>();
    g.tag = j.value("tag", std::string("A"));
    g.layout = addrmap::layout_from_json(j.at("layout"));
    if (j.contains("susceptibility")) {
      const auto& s = j.at("susceptibility");
      g.susceptibility.density = s.value("density", g.susceptibility.density);
      g.susceptibility.s_min = s.value("s_min", g.susceptibility.s_min);
      g.susceptibility.s_max = s.value("s_max", g.susceptibility.s_max);
    }
    if (j.contains("trr")) {
      const auto& t = j.at("trr");
      g.trr.enabled = t.value("enabled", g.trr.enabled);
      g.trr.tracker_capacity = t.value("tracker_capacity", g.trr.tracker_capacity);
      g.trr.refresh_interval_slots = t.value("refresh_interval_slots", g.trr.refresh_interval_slots);
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("population group: ") + e.what());
  }
}

/// {"preset": "2rx8-36"} or {"groups": [{"count": .., "layout": "2Rx8", ...}]}.
inline PopulationSpec population_from_json(const nlohmann::json& j) {
  if (j.contains("preset")) return population_preset(j.at("preset").get<std::string>());
  PopulationSpec spec;
  if (!j.contains("groups")) throw ConfigError("population: expected 'preset' or 'groups'");
  for (const auto& g : j.at("groups")) spec.groups.push_back(group_from_json(g));
  spec.validate();
  return spec;
}

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_POPULATION_HPP_
