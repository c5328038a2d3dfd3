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

#ifndef FLIPPRINT_DRAM_GEOMETRY_HPP_
#define FLIPPRINT_DRAM_GEOMETRY_HPP_

#include <cstdint>
#include <string>

#include "flipprint/common/error.hpp"

namespace flipprint::dram {

/// Organisation of one simulated module. Banks are addressed "flat" across
/// channels and ranks: flat = (channel * ranks + rank) * banks_per_rank + bank.
struct DimmGeometry {
  std::uint32_t ranks = 1;
  std::uint32_t width_bits = 8;
  std::uint32_t banks_per_rank = 16;
  std::uint64_t rows_per_bank = 1;
  std::uint32_t cells_per_row = 65536;
  std::uint32_t channels = 1;

  void validate() const {
    if (ranks < 1 || banks_per_rank < 1 || rows_per_bank < 1 || cells_per_row < 1 || channels < 1)
      throw ConfigError("geometry: all counts must be >= 1");
    if (width_bits != 8 && width_bits != 16)
      throw ConfigError("geometry: width_bits must be 8 or 16, got " + std::to_string(width_bits));
  }

  [[nodiscard]] std::uint64_t flat_banks() const noexcept {
    return std::uint64_t{channels} * ranks * banks_per_rank;
  }

  [[nodiscard]] std::uint64_t total_capacitors() const noexcept {
    return flat_banks() * rows_per_bank * cells_per_row;
  }

  [[nodiscard]] std::uint64_t capacity_bytes() const noexcept { return total_capacitors() / 8; }

  /// Global capacitor index of (flat bank, row, cell-in-row).
  [[nodiscard]] std::uint64_t capacitor_index(std::uint64_t flat_bank, std::uint64_t row,
                                              std::uint64_t cell) const noexcept {
    return (flat_bank * rows_per_bank + row) * cells_per_row + cell;
  }

  [[nodiscard]] std::uint64_t bank_of(std::uint64_t capacitor) const noexcept {
    return capacitor / cells_per_row / rows_per_bank;
  }
  [[nodiscard]] std::uint64_t row_of(std::uint64_t capacitor) const noexcept {
    return (capacitor / cells_per_row) % rows_per_bank;
  }
  [[nodiscard]] std::uint64_t cell_of(std::uint64_t capacitor) const noexcept {
    return capacitor % cells_per_row;
  }

  /// Short label such as "2Rx8".
  [[nodiscard]] std::string label() const {
    return std::to_string(ranks) + "Rx" + std::to_string(width_bits);
  }

  friend bool operator==(const DimmGeometry&, const DimmGeometry&) = default;
};

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_GEOMETRY_HPP_
