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

#ifndef FLIPPRINT_ADDRMAP_CHUNK_HPP_
#define FLIPPRINT_ADDRMAP_CHUNK_HPP_

#include <cstdint>
#include <vector>

#include "flipprint/addrmap/mapping.hpp"

namespace flipprint::addrmap {

inline constexpr unsigned kChunkBits = 21;
inline constexpr std::uint64_t kChunkBytes = std::uint64_t{1} << kChunkBits;

/// A 2 MB transparent huge page. Only the low 21 bits of an address inside
/// it are under the caller's control.
class ChunkHandle {
 public:
  explicit ChunkHandle(std::uint64_t base) : base_(base) {
    if ((base & (kChunkBytes - 1)) != 0) throw UsageError("chunk base must be 2 MB aligned");
  }

  static ChunkHandle from_index(std::uint64_t index) { return ChunkHandle(index << kChunkBits); }

  [[nodiscard]] std::uint64_t base() const noexcept { return base_; }
  [[nodiscard]] std::uint64_t index() const noexcept { return base_ >> kChunkBits; }
  [[nodiscard]] bool contains(std::uint64_t addr) const noexcept {
    return (addr >> kChunkBits) == (base_ >> kChunkBits);
  }

 private:
  std::uint64_t base_;
};

/// Row positions a chunk can reach in one bank; 2^(21 - row_bit_lsb) of them.
inline std::uint64_t rows_per_chunk(const AddressMapping& mapping) noexcept {
  const unsigned lsb = mapping.row_bit_lsb();
  return lsb >= kChunkBits ? 1 : std::uint64_t{1} << (kChunkBits - lsb);
}

struct ChunkRow {
  std::uint64_t relative_row;
  std::uint64_t address;
};

/// Rows of `flat_bank` inside the chunk, as offsets from the chunk's first row
/// (the absolute row is not observable from the low 21 bits). Each address is
/// the first byte of that row in that bank.
inline std::vector<ChunkRow> chunk_rows_in_bank(const ChunkHandle& chunk, std::uint64_t flat_bank,
                                                const AddressMapping& mapping) {
  const std::uint64_t flat_limit = std::uint64_t{1}
                                   << (mapping.bank_bits() + mapping.rank_bits() + mapping.channel_bits());
  if (flat_bank >= flat_limit) throw UsageError("chunk_rows_in_bank: bank index out of range");
  if (chunk.base() >= mapping.address_limit()) throw UsageError("chunk_rows_in_bank: chunk beyond address space");

  AddressComponents c = mapping.unflatten_bank(flat_bank);
  const std::uint64_t base_row = mapping.decompose(chunk.base()).row;
  const std::uint64_t count = rows_per_chunk(mapping);

  std::vector<ChunkRow> rows;
  rows.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    c.row = base_row + r;
    const std::uint64_t addr = mapping.compose(c);
    if (!chunk.contains(addr))
      throw UsageError("chunk_rows_in_bank: bank not addressable within the chunk's 21 bits");
    rows.push_back({r, addr});
  }
  return rows;
}

/// Row walk inside the chunk that never changes the decomposed channel: row
/// bits that feed a channel function are held at the chunk base's value, and
/// the remaining owned bits are re-solved so bank and column stay put.
inline std::vector<ChunkRow> channel_safe_row_walk(const ChunkHandle& chunk, const AddressMapping& mapping) {
  const AddressComponents base = mapping.decompose(chunk.base());
  const unsigned lsb = mapping.row_bit_lsb();
  const std::uint64_t count = rows_per_chunk(mapping);

  std::uint64_t channel_row_bits = 0;  // in relative-row bit positions
  for (std::uint64_t m : mapping.definition().channel_fn_masks)
    channel_row_bits |= (m >> lsb) & (count - 1);

  std::vector<ChunkRow> walk;
  AddressComponents c = base;
  for (std::uint64_t r = 0; r < count; ++r) {
    if ((r & channel_row_bits) != 0) continue;
    c.row = base.row + r;
    walk.push_back({r, mapping.compose(c)});
  }
  return walk;
}

}  // namespace flipprint::addrmap

#endif  // FLIPPRINT_ADDRMAP_CHUNK_HPP_
