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

#ifndef FLIPPRINT_HAMMERING_SWEEP_HPP_
#define FLIPPRINT_HAMMERING_SWEEP_HPP_

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "flipprint/addrmap/chunk.hpp"
#include "flipprint/common/distribution.hpp"
#include "flipprint/dram/hammer.hpp"

namespace flipprint::hammering {

enum class RowSubset : std::uint8_t { kAll, kFirstHalf, kExplicit };

struct SweepConfig {
  std::uint32_t repeats = 8;
  std::uint64_t activations = 1'000'000;
  RowSubset row_subset = RowSubset::kAll;
  std::vector<std::uint64_t> explicit_pairs;  // relative low rows, for kExplicit
  std::uint64_t bank = 0;                     // flat bank
  bool secondaries_per_pair = true;           // false: one draw per repeat

  void validate() const {
    if (repeats < 1) throw UsageError("sweep: repeats must be >= 1");
    if (activations < 1) throw UsageError("sweep: activations must be >= 1");
    if (row_subset == RowSubset::kExplicit && explicit_pairs.empty())
      throw UsageError("sweep: explicit row subset needs at least one pair");
  }

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

inline const char* to_string(RowSubset s) {
  switch (s) {
    case RowSubset::kAll: return "all";
    case RowSubset::kFirstHalf: return "first-half";
    case RowSubset::kExplicit: return "explicit";
  }
  return "all";
}

inline RowSubset row_subset_from_string(const std::string& s) {
  if (s == "all") return RowSubset::kAll;
  if (s == "first-half") return RowSubset::kFirstHalf;
  if (s == "explicit") return RowSubset::kExplicit;
  throw ConfigError("unknown row subset '" + s + "'");
}

/// Where one chunk lands in one bank of a device.
struct ChunkView {
  std::uint64_t flat_bank = 0;
  std::uint64_t base_row = 0;      // absolute row of relative row 0
  std::uint64_t rows = 0;          // rows reachable in the bank
  std::uint32_t cells_per_row = 0;

  [[nodiscard]] std::uint64_t capacitors() const noexcept { return rows * cells_per_row; }
  [[nodiscard]] bool holds_row(std::uint64_t abs_row) const noexcept {
    return abs_row >= base_row && abs_row < base_row + rows;
  }
  [[nodiscard]] std::uint64_t local_index(std::uint64_t abs_row, std::uint64_t cell) const noexcept {
    return (abs_row - base_row) * cells_per_row + cell;
  }
};

inline ChunkView chunk_view(const dram::DimmDevice& device, const addrmap::ChunkHandle& chunk,
                            std::uint64_t flat_bank) {
  const auto rows = addrmap::chunk_rows_in_bank(chunk, flat_bank, device.mapping());
  return {flat_bank, device.mapping().decompose(rows.front().address).row, rows.size(),
          device.geometry().cells_per_row};
}

/// Relative low rows of the primary pairs (r, r + 2) a sweep visits.
inline std::vector<std::uint64_t> sweep_pairs(std::uint64_t rows, const SweepConfig& config) {
  const std::uint64_t all = rows >= 3 ? rows - 2 : 0;
  std::vector<std::uint64_t> pairs;
  switch (config.row_subset) {
    case RowSubset::kAll:
      for (std::uint64_t r = 0; r < all; ++r) pairs.push_back(r);
      break;
    case RowSubset::kFirstHalf:
      for (std::uint64_t r = 0; r < (all + 1) / 2; ++r) pairs.push_back(r);
      break;
    case RowSubset::kExplicit:
      pairs = config.explicit_pairs;
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      for (std::uint64_t r : pairs)
        if (r + 2 >= rows) throw UsageError("sweep: explicit pair outside the chunk");
      break;
  }
  return pairs;
}

/// Sorted chunk-local capacitor indices that flipped in one sweep.
using LocalFlips = std::vector<std::uint64_t>;

struct ChunkObservation {
  std::uint32_t device_id = 0;
  std::uint64_t chunk_id = 0;
  std::uint32_t seat_epoch = 0;
  std::uint64_t capacitors = 0;  // size of the chunk-local index space
  std::uint32_t cells_per_row = 0;
  std::vector<LocalFlips> sweeps;
  SweepConfig config;

  friend bool operator==(const ChunkObservation&, const ChunkObservation&) = default;
};

namespace detail {
inline constexpr std::uint64_t kSecondaryTag = 0x736563;
inline constexpr std::uint64_t kFlipTag = 0x666c70;
inline constexpr std::uint64_t kAllocTag = 0x616c63;
inline constexpr std::uint64_t kChunkTag = 0x63686b;

/// `count` distinct rows of the bank, uniform, avoiding the primary pair.
inline std::vector<std::uint64_t> draw_secondaries(RngStream& rng, std::size_t count, std::uint64_t rows_per_bank,
                                                   std::uint64_t row_low) {
  const std::uint64_t available = rows_per_bank - 2;
  count = static_cast<std::size_t>(std::min<std::uint64_t>(count, available));
  std::vector<std::uint64_t> out;
  out.reserve(count);
  while (out.size() < count) {
    std::uint64_t r = uniform_below(rng, available);
    if (r >= row_low) ++r;
    if (r >= row_low + 2) ++r;
    if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
  }
  return out;
}
}  // namespace detail

/// One hammering sweep per repeat over the configured primary pairs in one
/// bank of the chunk. Randomness comes from streams keyed by (seed, repeat,
/// pair), so the result does not depend on evaluation order.
inline ChunkObservation hammering_sweep(const dram::DimmDevice& device, const addrmap::ChunkHandle& chunk,
                                        const templating::HammeringPattern& pattern, const SweepConfig& config,
                                        const dram::Environment& env, std::uint64_t seed) {
  config.validate();
  const ChunkView view = chunk_view(device, chunk, config.bank);
  const dram::DimmGeometry g = device.geometry();
  const auto pairs = sweep_pairs(view.rows, config);
  const std::size_t decoys = pattern.secondary_slot_count();

  ChunkObservation obs;
  obs.device_id = device.id;
  obs.chunk_id = chunk.index();
  obs.seat_epoch = device.seat_epoch;
  obs.capacitors = view.capacitors();
  obs.cells_per_row = view.cells_per_row;
  obs.config = config;
  obs.sweeps.reserve(config.repeats);

  for (std::uint32_t rep = 0; rep < config.repeats; ++rep) {
    LocalFlips flips;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      dram::HammerTarget target{config.bank, view.base_row + pairs[i], {}};
      RngStream sec = make_stream(seed, {detail::kSecondaryTag, rep, config.secondaries_per_pair ? i : 0});
      target.secondary_rows = detail::draw_secondaries(sec, decoys, g.rows_per_bank, target.row_low);
      RngStream rng = make_stream(seed, {detail::kFlipTag, rep, i});
      for (const dram::Flip& f : dram::hammer_execute(device, pattern, target, config.activations, env, rng).flips) {
        const std::uint64_t row = g.row_of(f.index);
        if (view.holds_row(row)) flips.push_back(view.local_index(row, g.cell_of(f.index)));
      }
    }
    std::sort(flips.begin(), flips.end());
    flips.erase(std::unique(flips.begin(), flips.end()), flips.end());
    obs.sweeps.push_back(std::move(flips));
  }
  return obs;
}

/// Per-index flip counts over all repeats.
inline BitFlipDistribution extract_distribution(const ChunkObservation& obs) {
  std::vector<BitFlipDistribution::Entry> entries;
  for (const auto& sweep : obs.sweeps)
    for (std::uint64_t i : sweep) entries.emplace_back(i, 1);
  return BitFlipDistribution(std::move(entries));
}

/// Chunk ids the allocator hands out for one session: d of N uniformly
/// without replacement, returned sorted.
inline std::vector<std::uint64_t> sample_chunks(std::uint64_t total_chunks, std::uint64_t session_size,
                                                std::uint64_t allocator_seed) {
  if (session_size < 1 || session_size > total_chunks)
    throw UsageError("sample_chunks: need 1 <= d <= N");
  RngStream rng = make_stream(allocator_seed, {detail::kAllocTag});
  std::vector<std::uint64_t> ids(total_chunks);
  for (std::uint64_t i = 0; i < total_chunks; ++i) ids[i] = i;
  for (std::uint64_t i = 0; i < session_size; ++i) std::swap(ids[i], ids[i + uniform_below(rng, total_chunks - i)]);
  ids.resize(session_size);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace flipprint::hammering

#endif  // FLIPPRINT_HAMMERING_SWEEP_HPP_
