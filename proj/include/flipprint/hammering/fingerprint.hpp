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


#ifndef FLIPPRINT_HAMMERING_FINGERPRINT_HPP_
#define FLIPPRINT_HAMMERING_FINGERPRINT_HPP_

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flipprint/hammering/sweep.hpp"

namespace flipprint::hammering {

struct ChunkDistribution {
  std::uint64_t chunk_id = 0;
  BitFlipDistribution distribution;

  friend bool operator==(const ChunkDistribution&, const ChunkDistribution&) = default;
};

struct SessionConfig {
  std::uint64_t total_chunks = 64;     // N: chunks the allocator draws from
  std::uint64_t chunks_per_session = 8;  // d
  SweepConfig sweep;
  /// Seed for chunk allocation; when unset it is derived from the session seed.
  std::optional<std::uint64_t> allocator_seed;

  void validate() const {
    sweep.validate();
    if (chunks_per_session < 1 || chunks_per_session > total_chunks)
      throw UsageError("session: need 1 <= chunks_per_session <= total_chunks");
  }
};

struct Fingerprint {
  std::string session_id;
  std::optional<std::uint32_t> device_hint;  // empty in blind mode
  std::vector<ChunkDistribution> chunks;
  SweepConfig config;
  std::uint64_t work_units = 0;  // pairs x activations x repeats, summed over chunks
  double wall_seconds = 0.0;

  [[nodiscard]] bool has_signal() const {
    for (const auto& c : chunks)
      if (c.distribution.total() > 0) return true;
    return false;
  }
};

/// Work units one chunk sweep costs.
inline std::uint64_t sweep_work_units(std::uint64_t pairs, const SweepConfig& config) {
  return pairs * config.activations * config.repeats;
}

/// Raw observations of one session: the allocator hands out d chunks and
/// each is swept with the session's configuration.
inline std::vector<ChunkObservation> observe_session(const dram::DimmDevice& device,
                                                     const templating::HammeringPattern& pattern,
                                                     const SessionConfig& session, const dram::Environment& env,
                                                     std::uint64_t seed) {
  session.validate();
  const std::uint64_t alloc = session.allocator_seed.value_or(derive_seed(seed, {detail::kAllocTag}));
  std::vector<ChunkObservation> out;
  for (std::uint64_t id : sample_chunks(session.total_chunks, session.chunks_per_session, alloc))
    out.push_back(hammering_sweep(device, addrmap::ChunkHandle::from_index(id), pattern, session.sweep, env,
                                  derive_seed(seed, {detail::kChunkTag, id})));
  return out;
}

/// One distribution per observed chunk. Work units count pairs x activations
/// x repeats for every chunk.
inline Fingerprint fingerprint_from_observations(const std::vector<ChunkObservation>& observations,
                                                 std::string session_id,
                                                 std::optional<std::uint32_t> device_hint = std::nullopt) {
  Fingerprint fp;
  fp.session_id = std::move(session_id);
  fp.device_hint = device_hint;
  for (const auto& obs : observations) {
    fp.config = obs.config;
    const std::uint64_t rows = obs.capacitors / std::max<std::uint64_t>(1, obs.cells_per_row);
    fp.work_units += sweep_work_units(sweep_pairs(rows, obs.config).size(), obs.config);
    fp.chunks.push_back({obs.chunk_id, extract_distribution(obs)});
  }
  return fp;
}

/// Sample d chunks, sweep each, and keep one distribution per chunk. Chunks
/// with no flips stay in the fingerprint with total 0.
inline Fingerprint extract_fingerprint(const dram::DimmDevice& device, const templating::HammeringPattern& pattern,
                                       const SessionConfig& session, const dram::Environment& env,
                                       std::uint64_t seed, std::string session_id = {}) {
  const auto start = std::chrono::steady_clock::now();
  Fingerprint fp = fingerprint_from_observations(observe_session(device, pattern, session, env, seed),
                                                 session_id.empty() ? "session-" + std::to_string(seed)
                                                                    : std::move(session_id),
                                                 device.id);
  fp.config = session.sweep;
  fp.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return fp;
}

}  // namespace flipprint::hammering

#endif  // FLIPPRINT_HAMMERING_FINGERPRINT_HPP_
