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

#ifndef FLIPPRINT_ADDRMAP_TIMING_HPP_
#define FLIPPRINT_ADDRMAP_TIMING_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "flipprint/addrmap/chunk.hpp"
#include "flipprint/addrmap/stock.hpp"
#include "flipprint/common/rng.hpp"

namespace flipprint::addrmap {

struct TimingParams {
  double t_hit = 80.0;
  double t_conflict = 200.0;
  double jitter = 5.0;       // uniform +/- cycles
  double margin = 1.5;       // conflict iff latency > margin * measured t_hit
  unsigned calibration_probes = 8;
};

/// Synthetic row-buffer timing for a hidden layout. A probe is a pure
/// function of (seed, a, b, nonce), so concurrent probes need no locking.
class TimingOracle {
 public:
  TimingOracle(Layout hidden, TimingParams params, std::uint64_t seed)
      : hidden_(std::move(hidden)), params_(params), seed_(seed) {}

  [[nodiscard]] bool same_bank_different_row(std::uint64_t a, std::uint64_t b) const {
    const auto& m = hidden_.mapping;
    const AddressComponents ca = m.decompose(a);
    const AddressComponents cb = m.decompose(b);
    return ca.channel == cb.channel && ca.rank == cb.rank && ca.bank == cb.bank && ca.row != cb.row;
  }

  [[nodiscard]] double probe(std::uint64_t a, std::uint64_t b, std::uint64_t nonce = 0) const {
    const double base = same_bank_different_row(a, b) ? params_.t_conflict : params_.t_hit;
    if (params_.jitter == 0.0) return base;
    const double u = hash01(seed_, {a, b, nonce});
    return base + params_.jitter * (2.0 * u - 1.0);
  }

  [[nodiscard]] const TimingParams& params() const noexcept { return params_; }

 private:
  Layout hidden_;
  TimingParams params_;
  std::uint64_t seed_;
};

struct GeometryInference {
  std::vector<std::string> candidates;  // surviving layout names, in candidate order
  bool ambiguous = false;
  double measured_t_hit = 0.0;
  std::vector<std::pair<std::uint64_t, bool>> probes;  // (address probed against 0x0, conflict?)
};

/// Address-pair tests that confirm a layout hypothesis from inside a 2 MB
/// chunk starting at 0x0: the first row step (lowest row bit plus whatever
/// XOR partners keep the bank unchanged, e.g. 0x24000 for 1Rx8, 0x44000 for
/// 2Rx8) and, for multi-rank layouts, each rank function that fits in the
/// 21 controllable bits.
inline std::vector<std::uint64_t> hypothesis_probes(const AddressMapping& m) {
  std::vector<std::uint64_t> probes;
  AddressComponents step;
  step.row = 1;
  probes.push_back(m.compose(step));
  for (std::uint64_t mask : m.definition().rank_fn_masks) {
    if (mask >= kChunkBytes) continue;
    const AddressComponents c = m.decompose(mask);
    if (c.bank == 0 && c.rank == 0 && c.channel == 0 && c.row != 0) probes.push_back(mask);
  }
  return probes;
}

/// Decide which candidate layouts are consistent with the oracle. A candidate
/// survives iff every one of its hypothesis probes shows a row conflict.
/// When more than one survives, the result is flagged ambiguous (the
/// 1Rx8 / 2Rx16 pair shares its row-start probe and is resolved later by
/// trying patterns).
inline GeometryInference infer_geometry(const TimingOracle& oracle, const std::vector<Layout>& candidates) {
  if (candidates.empty()) throw UsageError("infer_geometry: no candidates");
  const TimingParams& p = oracle.params();

  GeometryInference out;
  double sum = 0.0;
  const unsigned n = p.calibration_probes == 0 ? 1 : p.calibration_probes;
  for (unsigned i = 0; i < n; ++i) sum += oracle.probe(0x0, 0x1, i);
  out.measured_t_hit = sum / n;
  const double threshold = p.margin * out.measured_t_hit;

  auto conflict = [&](std::uint64_t addr) {
    for (const auto& [a, verdict] : out.probes)
      if (a == addr) return verdict;
    const bool verdict = oracle.probe(0x0, addr, 1000 + out.probes.size()) > threshold;
    out.probes.emplace_back(addr, verdict);
    return verdict;
  };

  for (const Layout& cand : candidates) {
    bool ok = true;
    for (std::uint64_t addr : hypothesis_probes(cand.mapping)) ok = conflict(addr) && ok;
    if (ok) out.candidates.push_back(cand.name);
  }
  if (out.candidates.empty()) throw InferenceError("infer_geometry: no candidate consistent with the probes");
  out.ambiguous = out.candidates.size() > 1;
  return out;
}

}  // namespace flipprint::addrmap

#endif  // FLIPPRINT_ADDRMAP_TIMING_HPP_
