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

#ifndef FLIPPRINT_DRAM_FIELD_HPP_
#define FLIPPRINT_DRAM_FIELD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "flipprint/common/error.hpp"
#include "flipprint/common/rng.hpp"

namespace flipprint::dram {

enum class FlipDirection : std::uint8_t { kZeroToOne = 0, kOneToZero = 1 };

/// Generative law for per-cell flip susceptibility: each cell is susceptible
/// with probability `density`, and a susceptible cell draws s log-uniformly
/// over [s_min, s_max].
struct SusceptibilityParams {
  double density = 5e-4;
  double s_min = 1e-10;
  double s_max = 1e-4;

  void validate() const {
    if (!(density > 0.0 && density <= 1.0)) throw ConfigError("susceptibility density must lie in (0, 1]");
    if (!(s_min > 0.0 && s_min <= s_max && s_max <= 1.0))
      throw ConfigError("susceptibility range must satisfy 0 < s_min <= s_max <= 1");
  }

  friend bool operator==(const SusceptibilityParams&, const SusceptibilityParams&) = default;
};

/// One re-seating event. Survivors are jittered multiplicatively; a
/// `perturbation` fraction of entries is dropped and replaced by fresh cells.
struct ReseatEpoch {
  std::uint64_t seed = 0;
  double perturbation = 0.0;
  double jitter = 0.0;

  friend bool operator==(const ReseatEpoch&, const ReseatEpoch&) = default;
};

struct Cell {
  std::uint32_t cell;  // index within the row
  double s;
  FlipDirection direction;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Hidden ground truth of a module. Rows are materialised on demand from
/// (seed, bank, row), so a 16 GB module costs nothing until it is hammered and
/// a device serialises to its seeds alone.
class SusceptibilityField {
 public:
  SusceptibilityField() = default;
  SusceptibilityField(SusceptibilityParams params, std::uint64_t seed, std::uint32_t cells_per_row)
      : params_(params), seed_(seed), cells_per_row_(cells_per_row) {
    params_.validate();
  }

  [[nodiscard]] const SusceptibilityParams& params() const noexcept { return params_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::vector<ReseatEpoch>& epochs() const noexcept { return epochs_; }
  [[nodiscard]] std::uint32_t cells_per_row() const noexcept { return cells_per_row_; }

  /// Susceptible cells of one row, sorted by cell index.
  [[nodiscard]] std::vector<Cell> row_cells(std::uint64_t flat_bank, std::uint64_t row) const {
    std::vector<Cell> cells = generate(seed_, params_.density, flat_bank, row);
    for (const ReseatEpoch& e : epochs_) apply(e, flat_bank, row, cells);
    return cells;
  }

  /// Field after one more re-seating event. perturbation == 0 leaves every
  /// entry untouched.
  [[nodiscard]] SusceptibilityField reseated(const ReseatEpoch& epoch) const {
    if (!(epoch.perturbation >= 0.0 && epoch.perturbation <= 1.0))
      throw UsageError("reseat: perturbation must lie in [0, 1]");
    if (epoch.jitter < 0.0 || epoch.jitter >= 1.0) throw UsageError("reseat: jitter must lie in [0, 1)");
    SusceptibilityField out = *this;
    out.epochs_.push_back(epoch);
    return out;
  }

  friend bool operator==(const SusceptibilityField&, const SusceptibilityField&) = default;

 private:
  static constexpr std::uint64_t kRowTag = 0x726f77;
  static constexpr std::uint64_t kDirTag = 0x646972;

  [[nodiscard]] FlipDirection direction_of(std::uint64_t bank, std::uint64_t row, std::uint64_t cell) const {
    return hash01(seed_, {kDirTag, bank, row, cell}) < 0.5 ? FlipDirection::kZeroToOne
                                                           : FlipDirection::kOneToZero;
  }

  [[nodiscard]] std::vector<Cell> generate(std::uint64_t seed, double density, std::uint64_t bank,
                                           std::uint64_t row) const {
    std::vector<Cell> cells;
    if (density <= 0.0) return cells;
    RngStream rng = make_stream(seed, {kRowTag, bank, row});
    const double log_skip = std::log1p(-std::min(density, 1.0 - 1e-16));
    const double lo = std::log(params_.s_min);
    const double span = std::log(params_.s_max) - lo;
    // Bernoulli(density) per cell via geometric gaps.
    std::uint64_t pos = 0;
    for (;;) {
      const double u = uniform01(rng);
      const double gap = density >= 1.0 ? 0.0 : std::floor(std::log1p(-u) / log_skip);
      if (gap >= static_cast<double>(cells_per_row_)) break;
      pos += static_cast<std::uint64_t>(gap);
      if (pos >= cells_per_row_) break;
      const double s = std::exp(lo + span * uniform01(rng));
      cells.push_back({static_cast<std::uint32_t>(pos), std::min(s, 1.0), direction_of(bank, row, pos)});
      ++pos;
    }
    return cells;
  }

  void apply(const ReseatEpoch& e, std::uint64_t bank, std::uint64_t row, std::vector<Cell>& cells) const {
    if (e.perturbation <= 0.0) return;
    std::vector<Cell> kept;
    kept.reserve(cells.size());
    for (Cell c : cells) {
      if (hash01(e.seed, {1, bank, row, c.cell}) < e.perturbation) continue;
      const double noise = 1.0 + e.jitter * (2.0 * hash01(e.seed, {2, bank, row, c.cell}) - 1.0);
      c.s = std::clamp(c.s * noise, params_.s_min * 1e-3, 1.0);
      kept.push_back(c);
    }
    std::vector<Cell> fresh = generate(e.seed, params_.density * e.perturbation, bank, row);
    std::vector<Cell> merged;
    merged.reserve(kept.size() + fresh.size());
    auto k = kept.begin();
    for (const Cell& f : fresh) {
      while (k != kept.end() && k->cell < f.cell) merged.push_back(*k++);
      if (k != kept.end() && k->cell == f.cell) continue;  // occupied by a survivor
      merged.push_back(f);
    }
    merged.insert(merged.end(), k, kept.end());
    cells = std::move(merged);
  }

  SusceptibilityParams params_;
  std::uint64_t seed_ = 0;
  std::uint32_t cells_per_row_ = 65536;
  std::vector<ReseatEpoch> epochs_;
};

}  // namespace flipprint::dram

#endif  // FLIPPRINT_DRAM_FIELD_HPP_
