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

#ifndef FLIPPRINT_ADDRMAP_MAPPING_HPP_
#define FLIPPRINT_ADDRMAP_MAPPING_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "flipprint/common/error.hpp"
#include "flipprint/dram/geometry.hpp"

namespace flipprint::addrmap {

struct AddressComponents {
  std::uint64_t channel = 0;
  std::uint64_t rank = 0;
  std::uint64_t bank = 0;
  std::uint64_t row = 0;
  std::uint64_t column = 0;

  friend bool operator==(const AddressComponents&, const AddressComponents&) = default;
};

inline bool parity(std::uint64_t x) noexcept { return (std::popcount(x) & 1) != 0; }

/// Physical address <-> DRAM coordinates.
///
/// Every bank, rank and channel bit is the parity of the address masked by
/// one function mask. Column bits are taken verbatim from `column_bits`
/// (column bit i = address bit column_bits[i]); the row is every bit from
/// `row_bit_lsb` upward. The remaining bits below `row_bit_lsb` are "owned"
/// by the XOR functions; the construction requires that the functions,
/// restricted to the owned bits, form an invertible GF(2) system, which is
/// exactly the condition for decompose/compose to be a bijection.
class AddressMapping {
 public:
  struct Definition {
    std::string name;
    unsigned address_width = 34;
    std::vector<std::uint64_t> bank_fn_masks;
    std::vector<std::uint64_t> rank_fn_masks;
    std::vector<std::uint64_t> channel_fn_masks;
    std::vector<unsigned> column_bits;
    unsigned row_bit_lsb = 17;
  };

  explicit AddressMapping(Definition def) : def_(std::move(def)) { build(); }

  [[nodiscard]] const Definition& definition() const noexcept { return def_; }
  [[nodiscard]] const std::string& name() const noexcept { return def_.name; }
  [[nodiscard]] unsigned address_width() const noexcept { return def_.address_width; }
  [[nodiscard]] unsigned row_bit_lsb() const noexcept { return def_.row_bit_lsb; }
  [[nodiscard]] std::size_t bank_bits() const noexcept { return def_.bank_fn_masks.size(); }
  [[nodiscard]] std::size_t rank_bits() const noexcept { return def_.rank_fn_masks.size(); }
  [[nodiscard]] std::size_t channel_bits() const noexcept { return def_.channel_fn_masks.size(); }
  [[nodiscard]] std::size_t column_bit_count() const noexcept { return def_.column_bits.size(); }
  [[nodiscard]] std::uint64_t row_count() const noexcept {
    return std::uint64_t{1} << (def_.address_width - def_.row_bit_lsb);
  }
  [[nodiscard]] std::uint64_t address_limit() const noexcept {
    return std::uint64_t{1} << def_.address_width;
  }

  [[nodiscard]] AddressComponents decompose(std::uint64_t addr) const {
    if (addr >= address_limit())
      throw UsageError("decompose: address exceeds " + std::to_string(def_.address_width) + " bits");
    AddressComponents c;
    for (std::size_t i = 0; i < def_.column_bits.size(); ++i)
      c.column |= ((addr >> def_.column_bits[i]) & 1U) << i;
    c.row = addr >> def_.row_bit_lsb;
    c.bank = apply(def_.bank_fn_masks, addr);
    c.rank = apply(def_.rank_fn_masks, addr);
    c.channel = apply(def_.channel_fn_masks, addr);
    return c;
  }

  [[nodiscard]] std::uint64_t compose(const AddressComponents& c) const {
    check_range(c.channel, channel_bits(), "channel");
    check_range(c.rank, rank_bits(), "rank");
    check_range(c.bank, bank_bits(), "bank");
    check_range(c.column, column_bit_count(), "column");
    if (c.row >= row_count()) throw UsageError("compose: row out of range");

    std::uint64_t addr = c.row << def_.row_bit_lsb;
    for (std::size_t i = 0; i < def_.column_bits.size(); ++i)
      addr |= ((c.column >> i) & 1U) << def_.column_bits[i];

    // Residual parity each function still needs from the owned bits.
    std::uint64_t residual = 0;
    std::size_t j = 0;
    auto fold = [&](const std::vector<std::uint64_t>& masks, std::uint64_t want) {
      for (std::size_t i = 0; i < masks.size(); ++i, ++j)
        if ((((want >> i) & 1U) != 0) != parity(masks[i] & addr)) residual |= std::uint64_t{1} << j;
    };
    fold(def_.bank_fn_masks, c.bank);
    fold(def_.rank_fn_masks, c.rank);
    fold(def_.channel_fn_masks, c.channel);

    for (std::size_t k = 0; k < owned_bits_.size(); ++k)
      if (parity(inverse_[k] & residual)) addr |= std::uint64_t{1} << owned_bits_[k];
    return addr;
  }

  /// Flat bank index across channel and rank, matching dram::DimmGeometry.
  [[nodiscard]] std::uint64_t flat_bank(const AddressComponents& c) const noexcept {
    return ((c.channel << rank_bits()) + c.rank) * (std::uint64_t{1} << bank_bits()) + c.bank;
  }

  [[nodiscard]] AddressComponents unflatten_bank(std::uint64_t flat) const noexcept {
    AddressComponents c;
    const std::uint64_t banks = std::uint64_t{1} << bank_bits();
    const std::uint64_t ranks = std::uint64_t{1} << rank_bits();
    c.bank = flat % banks;
    c.rank = (flat / banks) % ranks;
    c.channel = flat / banks / ranks;
    return c;
  }

  /// Geometry implied by the mapping for a module of the given device width.
  [[nodiscard]] dram::DimmGeometry geometry(std::uint32_t width_bits) const {
    dram::DimmGeometry g;
    g.width_bits = width_bits;
    g.ranks = 1U << rank_bits();
    g.channels = 1U << channel_bits();
    g.banks_per_rank = 1U << bank_bits();
    g.rows_per_bank = row_count();
    g.cells_per_row = 8U << column_bit_count();
    g.validate();
    return g;
  }

 private:
  static std::uint64_t apply(const std::vector<std::uint64_t>& masks, std::uint64_t addr) noexcept {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < masks.size(); ++i)
      v |= static_cast<std::uint64_t>(parity(masks[i] & addr)) << i;
    return v;
  }

  static void check_range(std::uint64_t v, std::size_t bits, const char* what) {
    if (bits < 64 && v >= (std::uint64_t{1} << bits))
      throw UsageError(std::string("compose: ") + what + " not reachable under this mapping");
  }

  void build() {
    const auto& d = def_;
    if (d.address_width == 0 || d.address_width > 62)
      throw ConfigError("mapping " + d.name + ": address_width must be in [1, 62]");
    if (d.row_bit_lsb >= d.address_width)
      throw ConfigError("mapping " + d.name + ": row_bit_lsb must lie below address_width");

    const std::uint64_t limit = std::uint64_t{1} << d.address_width;
    std::vector<std::uint64_t> functions;
    for (const auto* set : {&d.bank_fn_masks, &d.rank_fn_masks, &d.channel_fn_masks})
      for (std::uint64_t m : *set) {
        if (m == 0 || m >= limit)
          throw ConfigError("mapping " + d.name + ": function mask outside address width");
        functions.push_back(m);
      }

    std::uint64_t column_mask = 0;
    for (unsigned b : d.column_bits) {
      if (b >= d.row_bit_lsb) throw ConfigError("mapping " + d.name + ": column bit overlaps row bits");
      if ((column_mask >> b) & 1U) throw ConfigError("mapping " + d.name + ": duplicate column bit");
      column_mask |= std::uint64_t{1} << b;
    }
    owned_bits_.clear();
    for (unsigned b = 0; b < d.row_bit_lsb; ++b)
      if (((column_mask >> b) & 1U) == 0) owned_bits_.push_back(b);
    if (owned_bits_.size() != functions.size())
      throw ConfigError("mapping " + d.name + ": " + std::to_string(functions.size()) +
                        " XOR functions but " + std::to_string(owned_bits_.size()) +
                        " non-column bits below the row bits");
    if (functions.size() > 63) throw ConfigError("mapping " + d.name + ": too many functions");

    // Gauss-Jordan over GF(2). Row k of `system` = which owned bits function k
    // touches, augmented with the identity so the inverse falls out.
    const std::size_t n = functions.size();
    std::vector<std::uint64_t> system(n), inv(n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t o = 0; o < n; ++o)
        if ((functions[k] >> owned_bits_[o]) & 1U) system[k] |= std::uint64_t{1} << o;
      inv[k] = std::uint64_t{1} << k;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      while (pivot < n && ((system[pivot] >> col) & 1U) == 0) ++pivot;
      if (pivot == n)
        throw ConfigError("mapping " + d.name + ": XOR functions are not invertible on the owned bits");
      std::swap(system[pivot], system[col]);
      std::swap(inv[pivot], inv[col]);
      for (std::size_t r = 0; r < n; ++r)
        if (r != col && ((system[r] >> col) & 1U)) {
          system[r] ^= system[col];
          inv[r] ^= inv[col];
        }
    }
    // After elimination system is the identity: owned bit k = parity(inv[k] & residual).
    inverse_ = std::move(inv);
  }

  Definition def_;
  std::vector<unsigned> owned_bits_;
  std::vector<std::uint64_t> inverse_;
};

}  // namespace flipprint::addrmap

#endif  // FLIPPRINT_ADDRMAP_MAPPING_HPP_
