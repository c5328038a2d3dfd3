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


#ifndef FLIPPRINT_HARNESS_CONFIG_HPP_
#define FLIPPRINT_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/addrmap/timing.hpp"
#include "flipprint/dram/population.hpp"
#include "flipprint/hammering/fingerprint.hpp"
#include "flipprint/matching/store.hpp"
#include "flipprint/templating/pattern.hpp"

namespace flipprint::harness {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"S-UNIQ",  "S-STABLE",   "S-RESEAT", "S-EFF",    "S-FREQ",
                                              "S-BASELINE", "S-GEOM", "S-BIRTHDAY", "S-ENTROPY"};
  return names;
}

enum class Allocation : std::uint8_t {
  kStable,  // a device's huge pages land on the same chunks every session
  kFresh,   // every session draws a new chunk sample
};

struct ScenarioConfig {
  std::string scenario = "S-UNIQ";
  std::uint64_t seed = 1;
  std::optional<dram::PopulationSpec> population;  // unset: the scenario's default preset
  hammering::SessionConfig session;
  double tau = matching::kDefaultThreshold;
  Allocation allocation = Allocation::kStable;
  std::optional<templating::HammeringPattern> pattern;  // unset: decoys matching each device's tracker

  std::uint32_t sessions = 10;  // S-STABLE probe sessions after the reference session

  double reseat_perturbation = dram::kDefaultReseatPerturbation;
  double reseat_jitter = dram::kDefaultReseatJitter;

  std::vector<std::uint64_t> eff_activations{10'000'000, 5'000'000, 1'000'000, 500'000, 200'000};
  std::vector<std::uint32_t> eff_repeats{8, 4, 2};
  bool eff_half_rows = true;

  double freq_flip_ratio = 0.01;        // target drop in expected flips
  std::optional<double> freq_scale;     // explicit activation_scale, skips the solve
  templating::HammeringPattern low_flip_pattern = templating::decoy_pattern(21, 3, 2);

  addrmap::TimingParams timing;
  std::uint32_t geom_repetitions = 100;

  std::uint64_t birthday_chunks = 512;
  double birthday_target = 0.999;
  std::uint64_t birthday_trials = 100'000;
  std::vector<std::uint64_t> birthday_mc_sizes{1, 8, 16, 32, 64};

  std::vector<std::uint64_t> entropy_regions{65'536, 524'288, 16'777'216};
  std::uint64_t entropy_max_flips = 16;
  std::vector<double> entropy_populations{1e16, 1e17, 1e18};

  std::string output_dir = "out";

  [[nodiscard]] dram::PopulationSpec population_or_default() const {
    if (population) return *population;
    if (scenario == "S-STABLE" || scenario == "S-RESEAT") return dram::population_preset("stability-10");
    return dram::population_preset("2rx8-36");
  }

  void validate() const {
    bool known = false;
    for (const auto& n : scenario_names()) known = known || n == scenario;
    if (!known) throw ConfigError("unknown scenario '" + scenario + "'");
    population_or_default().validate();
    session.validate();
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
    if (pattern) pattern->validate();
    low_flip_pattern.validate();
    if (sessions < 1) throw ConfigError("sessions must be >= 1");
    if (!(reseat_perturbation >= 0.0 && reseat_perturbation <= 1.0))
      throw ConfigError("reseat perturbation must lie in [0, 1]");
    if (!(reseat_jitter >= 0.0 && reseat_jitter < 1.0)) throw ConfigError("reseat jitter must lie in [0, 1)");
    if (eff_activations.empty() || eff_repeats.empty()) throw ConfigError("efficiency grid must be non-empty");
    for (auto a : eff_activations)
      if (a < 1) throw ConfigError("efficiency activations must be >= 1");
    for (auto r : eff_repeats)
      if (r < 1) throw ConfigError("efficiency repeats must be >= 1");
    if (!(freq_flip_ratio > 0.0 && freq_flip_ratio < 1.0)) throw ConfigError("freq flip ratio must lie in (0, 1)");
    if (freq_scale && !(*freq_scale > 0.0)) throw ConfigError("freq scale must be > 0");
    if (birthday_chunks < 2) throw ConfigError("birthday chunks must be >= 2");
    if (!(birthday_target > 0.0 && birthday_target < 1.0)) throw ConfigError("birthday target must lie in (0, 1)");
    for (auto d : birthday_mc_sizes)
      if (d < 1 || d > birthday_chunks) throw ConfigError("birthday Monte-Carlo sizes must lie in [1, N]");
    if (entropy_regions.empty()) throw ConfigError("entropy regions must be non-empty");
    for (auto n : entropy_regions)
      if (n < 1) throw ConfigError("entropy regions must be >= 1");
  }
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline hammering::SessionConfig session_from_json(const nlohmann::json& j, hammering::SessionConfig s) {
  read_opt(j, "total_chunks", s.total_chunks);
  read_opt(j, "chunks_per_session", s.chunks_per_session);
  read_opt(j, "repeats", s.sweep.repeats);
  read_opt(j, "activations", s.sweep.activations);
  read_opt(j, "bank", s.sweep.bank);
  read_opt(j, "secondaries_per_pair", s.sweep.secondaries_per_pair);
  if (j.contains("row_subset")) s.sweep.row_subset = hammering::row_subset_from_string(j.at("row_subset"));
  read_opt(j, "explicit_pairs", s.sweep.explicit_pairs);
  return s;
}

}  // namespace detail

/// Every key is optional; absent keys keep their defaults. Keys starting
/// with "_" are comments and ignored.
inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{
      "scenario", "seed",         "population",  "session",   "tau",      "allocation", "pattern",
      "sessions", "reseat",       "efficiency",  "frequency", "geometry", "birthday",   "entropy",
      "output_dir"};
  for (const auto& [key, value] : j.items()) {
    if (!key.empty() && key[0] == '_') continue;
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  }
  ScenarioConfig c;
  try {
    using detail::read_opt;
    read_opt(j, "scenario", c.scenario);
    read_opt(j, "seed", c.seed);
    if (j.contains("population")) c.population = dram::population_from_json(j.at("population"));
    if (j.contains("session")) c.session = detail::session_from_json(j.at("session"), c.session);
    read_opt(j, "tau", c.tau);
    if (j.contains("allocation")) {
      const auto a = j.at("allocation").get<std::string>();
      if (a == "stable")
        c.allocation = Allocation::kStable;
      else if (a == "fresh")
        c.allocation = Allocation::kFresh;
      else
        throw ConfigError("allocation must be 'stable' or 'fresh'");
    }
    if (j.contains("pattern") && !j.at("pattern").is_null()) c.pattern = templating::pattern_from_json(j.at("pattern"));
    read_opt(j, "sessions", c.sessions);
    if (j.contains("reseat")) {
      const auto& r = j.at("reseat");
      read_opt(r, "perturbation", c.reseat_perturbation);
      read_opt(r, "jitter", c.reseat_jitter);
    }
    if (j.contains("efficiency")) {
      const auto& e = j.at("efficiency");
      read_opt(e, "activations", c.eff_activations);
      read_opt(e, "repeats", c.eff_repeats);
      read_opt(e, "half_rows", c.eff_half_rows);
    }
    if (j.contains("frequency")) {
      const auto& f = j.at("frequency");
      read_opt(f, "flip_ratio", c.freq_flip_ratio);
      if (f.contains("activation_scale") && !f.at("activation_scale").is_null())
        c.freq_scale = f.at("activation_scale").get<double>();
      if (f.contains("low_flip_pattern")) c.low_flip_pattern = templating::pattern_from_json(f.at("low_flip_pattern"));
    }
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      read_opt(g, "t_hit", c.timing.t_hit);
      read_opt(g, "t_conflict", c.timing.t_conflict);
      read_opt(g, "jitter", c.timing.jitter);
      read_opt(g, "margin", c.timing.margin);
      read_opt(g, "repetitions", c.geom_repetitions);
    }
    if (j.contains("birthday")) {
      const auto& b = j.at("birthday");
      read_opt(b, "chunks", c.birthday_chunks);
      read_opt(b, "target", c.birthday_target);
      read_opt(b, "trials", c.birthday_trials);
      read_opt(b, "monte_carlo_sizes", c.birthday_mc_sizes);
    }
    if (j.contains("entropy")) {
      const auto& e = j.at("entropy");
      read_opt(e, "regions", c.entropy_regions);
      read_opt(e, "max_flips", c.entropy_max_flips);
      read_opt(e, "populations", c.entropy_populations);
    }
    read_opt(j, "output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace flipprint::harness

#endif  // FLIPPRINT_HARNESS_CONFIG_HPP_
