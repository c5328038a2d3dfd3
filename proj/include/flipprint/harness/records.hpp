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


#ifndef FLIPPRINT_HARNESS_RECORDS_HPP_
#define FLIPPRINT_HARNESS_RECORDS_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/hammering/fingerprint.hpp"
#include "flipprint/matching/store.hpp"

namespace flipprint::harness {

// Line-delimited JSON records. Every line carries the schema version "v"
// and a "kind". Observations are written as one header line per chunk
// followed by one line per repeat with the sorted flip indices.

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline nlohmann::json sweep_config_json(const hammering::SweepConfig& c) {
  return {{"repeats", c.repeats},
          {"activations", c.activations},
          {"row_subset", hammering::to_string(c.row_subset)},
          {"explicit_pairs", c.explicit_pairs},
          {"bank", c.bank},
          {"secondaries_per_pair", c.secondaries_per_pair}};
}

inline hammering::SweepConfig sweep_config_from(const nlohmann::json& j) {
  hammering::SweepConfig c;
  c.repeats = j.at("repeats").get<std::uint32_t>();
  c.activations = j.at("activations").get<std::uint64_t>();
  c.row_subset = hammering::row_subset_from_string(j.at("row_subset").get<std::string>());
  c.explicit_pairs = j.at("explicit_pairs").get<std::vector<std::uint64_t>>();
  c.bank = j.at("bank").get<std::uint64_t>();
  c.secondaries_per_pair = j.at("secondaries_per_pair").get<bool>();
  return c;
}

inline nlohmann::json counts_json(const BitFlipDistribution& d) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [i, c] : d.entries()) a.push_back({i, c});
  return a;
}

inline BitFlipDistribution counts_from(const nlohmann::json& j) {
  std::vector<BitFlipDistribution::Entry> e;
  for (const auto& pair : j) e.emplace_back(pair.at(0).get<std::uint64_t>(), pair.at(1).get<std::uint64_t>());
  return BitFlipDistribution(std::move(e));
}

inline void write_line(std::ostream& os, nlohmann::json j) {
  j["v"] = kSchemaVersion;
  os << j.dump() << '\n';
}

/// Parse all non-empty lines, checking the version and wrapping any
/// failure in a RecordError that names the 1-based line.
template <typename F>
void read_lines(std::istream& is, F&& on_record) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("v")) throw ConfigError("record has no schema version");
      const int v = j.at("v").get<int>();
      if (v != kSchemaVersion)
        throw ConfigError("schema version " + std::to_string(v) + " is not supported (expected " +
                          std::to_string(kSchemaVersion) + ")");
      on_record(j);
    } catch (const RecordError&) {
      throw;
    } catch (const std::exception& e) {
      throw RecordError(n, e.what());
    }
  }
}

}  // namespace detail

// --- observations ------------------------------------------------------------

inline void write_observations(std::ostream& os, const std::vector<hammering::ChunkObservation>& observations) {
  for (const auto& o : observations) {
    detail::write_line(os, {{"kind", "observation"},
                            {"device", o.device_id},
                            {"chunk", o.chunk_id},
                            {"epoch", o.seat_epoch},
                            {"capacitors", o.capacitors},
                            {"cells_per_row", o.cells_per_row},
                            {"repeats", o.sweeps.size()},
                            {"config", detail::sweep_config_json(o.config)}});
    for (std::size_t r = 0; r < o.sweeps.size(); ++r)
      detail::write_line(os, {{"kind", "sweep"},
                              {"device", o.device_id},
                              {"chunk", o.chunk_id},
                              {"repeat", r},
                              {"flips", o.sweeps[r]}});
  }
}

inline std::vector<hammering::ChunkObservation> read_observations(std::istream& is) {
  std::vector<hammering::ChunkObservation> out;
  std::size_t expected = 0;
  detail::read_lines(is, [&](const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "observation") {
      if (!out.empty() && out.back().sweeps.size() != expected)
        throw ConfigError("previous observation is missing sweep records");
      hammering::ChunkObservation o;
      o.device_id = j.at("device").get<std::uint32_t>();
      o.chunk_id = j.at("chunk").get<std::uint64_t>();
      o.seat_epoch = j.at("epoch").get<std::uint32_t>();
      o.capacitors = j.at("capacitors").get<std::uint64_t>();
      o.cells_per_row = j.at("cells_per_row").get<std::uint32_t>();
      o.config = detail::sweep_config_from(j.at("config"));
      expected = j.at("repeats").get<std::size_t>();
      out.push_back(std::move(o));
    } else if (kind == "sweep") {
      if (out.empty()) throw ConfigError("sweep record before any observation");
      auto& o = out.back();
      if (j.at("device").get<std::uint32_t>() != o.device_id || j.at("chunk").get<std::uint64_t>() != o.chunk_id ||
          j.at("repeat").get<std::size_t>() != o.sweeps.size())
        throw ConfigError("sweep record out of order");
      auto flips = j.at("flips").get<std::vector<std::uint64_t>>();
      for (std::size_t i = 0; i < flips.size(); ++i) {
        if (flips[i] >= o.capacitors) throw ConfigError("flip index outside the chunk");
        if (i && flips[i] <= flips[i - 1]) throw ConfigError("flip indices must be strictly increasing");
      }
      o.sweeps.push_back(std::move(flips));
    } else {
      throw ConfigError("unexpected record kind '" + kind + "'");
    }
  });
  if (!out.empty() && out.back().sweeps.size() != expected)
    throw ConfigError("last observation is missing sweep records");
  return out;
}

// --- fingerprints ------------------------------------------------------------

inline void write_fingerprint(std::ostream& os, const hammering::Fingerprint& fp) {
  nlohmann::json head = {{"kind", "fingerprint"},
                         {"session", fp.session_id},
                         {"chunks", fp.chunks.size()},
                         {"work_units", fp.work_units},
                         {"config", detail::sweep_config_json(fp.config)}};
  head["device_hint"] = fp.device_hint ? nlohmann::json(*fp.device_hint) : nlohmann::json(nullptr);
  detail::write_line(os, head);
  for (const auto& c : fp.chunks)
    detail::write_line(os, {{"kind", "fingerprint_chunk"},
                            {"session", fp.session_id},
                            {"chunk", c.chunk_id},
                            {"counts", detail::counts_json(c.distribution)}});
}

inline std::vector<hammering::Fingerprint> read_fingerprints(std::istream& is) {
  std::vector<hammering::Fingerprint> out;
  detail::read_lines(is, [&](const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fingerprint") {
      hammering::Fingerprint fp;
      fp.session_id = j.at("session").get<std::string>();
      if (!j.at("device_hint").is_null()) fp.device_hint = j.at("device_hint").get<std::uint32_t>();
      fp.work_units = j.at("work_units").get<std::uint64_t>();
      fp.config = detail::sweep_config_from(j.at("config"));
      out.push_back(std::move(fp));
    } else if (kind == "fingerprint_chunk") {
      if (out.empty() || out.back().session_id != j.at("session").get<std::string>())
        throw ConfigError("fingerprint chunk without its fingerprint header");
      out.back().chunks.push_back({j.at("chunk").get<std::uint64_t>(), detail::counts_from(j.at("counts"))});
    } else {
      throw ConfigError("unexpected record kind '" + kind + "'");
    }
  });
  return out;
}

// --- reference store ---------------------------------------------------------

inline void write_store(std::ostream& os, const matching::ReferenceStore& store) {
  detail::write_line(os, {{"kind", "store"}, {"next_id", store.next_id()}, {"references", store.size()}});
  for (const auto& [id, ref] : store.references()) {
    nlohmann::json r = {{"kind", "reference"}, {"id", id}, {"chunks", ref.chunks.size()}};
    r["label"] = ref.device_label ? nlohmann::json(*ref.device_label) : nlohmann::json(nullptr);
    detail::write_line(os, r);
    for (const auto& c : ref.chunks)
      detail::write_line(os, {{"kind", "reference_chunk"},
                              {"reference", id},
                              {"chunk", c.chunk_id},
                              {"counts", detail::counts_json(c.distribution)}});
  }
  for (const auto& e : store.merge_log())
    detail::write_line(os, {{"kind", "merge"}, {"into", e.into}, {"absorbed", e.absorbed}, {"session", e.session_id}});
}

inline matching::ReferenceStore read_store(std::istream& is) {
  std::map<std::uint64_t, matching::Reference> refs;
  std::vector<matching::MergeEvent> log;
  std::uint64_t next_id = 0;
  bool header = false;
  std::uint64_t last_ref = 0;
  detail::read_lines(is, [&](const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "store") {
      if (header) throw ConfigError("duplicate store header");
      header = true;
      next_id = j.at("next_id").get<std::uint64_t>();
      return;
    }
    if (!header) throw ConfigError("store header must come first");
    if (kind == "reference") {
      matching::Reference r;
      r.id = j.at("id").get<std::uint64_t>();
      if (!j.at("label").is_null()) r.device_label = j.at("label").get<std::uint32_t>();
      if (r.id >= next_id || refs.count(r.id)) throw ConfigError("bad reference id");
      last_ref = r.id;
      refs[r.id] = std::move(r);
    } else if (kind == "reference_chunk") {
      const auto id = j.at("reference").get<std::uint64_t>();
      if (refs.empty() || id != last_ref) throw ConfigError("reference chunk without its reference");
      auto& chunks = refs[id].chunks;
      const auto chunk = j.at("chunk").get<std::uint64_t>();
      if (!chunks.empty() && chunk <= chunks.back().chunk_id) throw ConfigError("reference chunks out of order");
      chunks.push_back({chunk, detail::counts_from(j.at("counts"))});
    } else if (kind == "merge") {
      log.push_back({j.at("into").get<std::uint64_t>(), j.at("absorbed").get<std::vector<std::uint64_t>>(),
                     j.at("session").get<std::string>()});
    } else {
      throw ConfigError("unexpected record kind '" + kind + "'");
    }
  });
  if (!header) throw ConfigError("empty store file");
  matching::ReferenceStore store;
  store.restore(std::move(refs), std::move(log), next_id);
  return store;
}

}  // namespace flipprint::harness

#endif  // FLIPPRINT_HARNESS_RECORDS_HPP_
