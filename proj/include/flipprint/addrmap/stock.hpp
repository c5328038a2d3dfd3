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

#ifndef FLIPPRINT_ADDRMAP_STOCK_HPP_
#define FLIPPRINT_ADDRMAP_STOCK_HPP_

#include <string>
#include <vector>

#include "flipprint/addrmap/mapping.hpp"

namespace flipprint::addrmap {

/// A module layout known to the workbench: the mapping a Kaby-Lake-class
/// memory controller applies to it, and the device width.
struct Layout {
  std::string name;
  std::uint32_t width_bits = 8;
  AddressMapping mapping;

  [[nodiscard]] dram::DimmGeometry geometry() const { return mapping.geometry(width_bits); }
};

namespace detail {

inline std::vector<unsigned> low_column_bits(unsigned count) {
  std::vector<unsigned> bits(count);
  for (unsigned i = 0; i < count; ++i) bits[i] = i;
  return bits;
}

}  // namespace detail

// Single-channel Kaby Lake bank functions:
//   bank0 = 0x2040, bank1 = 0x24000 / 0x44000, bank2 = 0x48000 / 0x88000,
//   bank3 = 0x90000 / 0x110000 and, for two ranks, 0x220000.
inline Layout layout_1rx8() {
  return {"1Rx8", 8,
          AddressMapping({"1Rx8", 34, {0x2040, 0x24000, 0x48000, 0x90000}, {}, {},
                          detail::low_column_bits(13), 17})};
}

inline Layout layout_2rx8() {
  return {"2Rx8", 8,
          AddressMapping({"2Rx8", 34, {0x2040, 0x44000, 0x88000, 0x110000}, {0x220000}, {},
                          detail::low_column_bits(13), 18})};
}

// x16 parts carry 8 banks per rank, so the row bits start one position lower
// than for the x8 part with the same rank count.
inline Layout layout_1rx16() {
  return {"1Rx16", 16,
          AddressMapping({"1Rx16", 33, {0x2040, 0x14000, 0x28000}, {}, {},
                          detail::low_column_bits(13), 16})};
}

// Rows start at bit 17 exactly as for 1Rx8. The rank function pairs bit 16
// with bit 20, which is the only in-chunk difference from 1Rx8.
inline Layout layout_2rx16() {
  return {"2Rx16", 16,
          AddressMapping({"2Rx16", 34, {0x2040, 0x24000, 0x48000}, {0x110000}, {},
                          detail::low_column_bits(13), 17})};
}

/// Dual-channel 1Rx8: channel = parity of bits 7, 9, 14 and 17. Bit 7 moves
/// out of the column to become the channel-owned bit.
inline Layout layout_1rx8_dual_channel() {
  std::vector<unsigned> cols;
  for (unsigned b = 0; b < 13; ++b)
    if (b != 7) cols.push_back(b);
  return {"1Rx8-2ch", 8,
          AddressMapping({"1Rx8-2ch", 34, {0x2040, 0x24000, 0x48000, 0x90000}, {}, {0x24280},
                          cols, 17})};
}

inline std::vector<Layout> stock_layouts() {
  return {layout_1rx8(), layout_2rx8(), layout_1rx16(), layout_2rx16()};
}

inline Layout stock_layout(const std::string& name) {
  if (name == "1Rx8") return layout_1rx8();
  if (name == "2Rx8") return layout_2rx8();
  if (name == "1Rx16") return layout_1rx16();
  if (name == "2Rx16") return layout_2rx16();
  if (name == "1Rx8-2ch") return layout_1rx8_dual_channel();
  throw ConfigError("unknown layout '" + name + "'");
}

}  // namespace flipprint::addrmap

#endif  // FLIPPRINT_ADDRMAP_STOCK_HPP_
