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


#ifndef FLIPPRINT_MATCHING_STORE_HPP_
#define FLIPPRINT_MATCHING_STORE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flipprint/hammering/fingerprint.hpp"
#include "flipprint/matching/jsd.hpp"

namespace flipprint::matching {

inline constexpr double kDefaultThreshold = 0.8;

struct Reference {
  std::uint64_t id = 0;
  std::optional<std::uint32_t> device_label;
  std::vector<hammering::ChunkDistribution> chunks;  // sorted by chunk_id

  /// Add a chunk distribution; an existing chunk with the same id has its
  /// counts summed.
  void absorb(const hammering::ChunkDistribution& c) {
    auto it = std::lower_bound(chunks.begin(), chunks.end(), c.chunk_id,
                               [](const hammering::ChunkDistribution& x, std::uint64_t id) { return x.chunk_id < id; });
    if (it != chunks.end() && it->chunk_id == c.chunk_id)
      it->distribution = it->distribution.merged(c.distribution);
    else
      chunks.insert(it, c);
  }

  friend bool operator==(const Reference&, const Reference&) = default;
};

struct MergeEvent {
  std::uint64_t into = 0;
  std::vector<std::uint64_t> absorbed;
  std::string session_id;

  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

class ReferenceStore {
 public:
  [[nodiscard]] const std::map<std::uint64_t, Reference>& references() const noexcept { return refs_; }
  [[nodiscard]] const std::vector<MergeEvent>& merge_log() const noexcept { return log_; }
  [[nodiscard]] std::size_t size() const noexcept { return refs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return refs_.empty(); }
  [[nodiscard]] std::uint64_t next_id() const noexcept { return next_id_; }

  [[nodiscard]] const Reference& at(std::uint64_t id) const {
    auto it = refs_.find(id);
    if (it == refs_.end()) throw UsageError("reference " + std::to_string(id) + " not in store");
    return it->second;
  }

  std::uint64_t create(std::optional<std::uint32_t> label) {
    const std::uint64_t id = next_id_++;
    refs_[id] = Reference{id, label, {}};
    return id;
  }

  Reference& mutable_ref(std::uint64_t id) {
    auto it = refs_.find(id);
    if (it == refs_.end()) throw UsageError("reference " + std::to_string(id) + " not in store");
    return it->second;
  }

  /// Fold every reference in `others` into `into` and log it.
  void collapse(std::uint64_t into, const std::vector<std::uint64_t>& others, const std::string& session_id) {
    Reference& target = mutable_ref(into);
    MergeEvent ev{into, {}, session_id};
    for (std::uint64_t id : others) {
      if (id == into) continue;
      Reference& src = mutable_ref(id);
      for (const auto& c : src.chunks) target.absorb(c);
      if (!target.device_label) target.device_label = src.device_label;
      ev.absorbed.push_back(id);
      refs_.erase(id);
    }
    if (!ev.absorbed.empty()) log_.push_back(std::move(ev));
  }

  /// Restore from persisted state.
  void restore(std::map<std::uint64_t, Reference> refs, std::vector<MergeEvent> log, std::uint64_t next_id) {
    refs_ = std::move(refs);
    log_ = std::move(log);
    next_id_ = next_id;
  }

  friend bool operator==(const ReferenceStore&, const ReferenceStore&) = default;

 private:
  std::map<std::uint64_t, Reference> refs_;
  std::vector<MergeEvent> log_;
  std::uint64_t next_id_ = 0;
};

enum class Verdict : std::uint8_t { kMatched, kNewDevice };

struct MatchDecision {
  Verdict verdict = Verdict::kNewDevice;
  std::optional<std::uint64_t> reference_id;  // matched reference; filled for new devices by update_references
  std::optional<double> min_divergence;       // unset when the store holds no comparable chunk
  std::optional<std::uint64_t> probe_chunk;
  std::optional<std::uint64_t> reference_chunk;
  double threshold = kDefaultThreshold;
  /// Every reference whose minimum divergence is within the threshold, by id.
  std::vector<std::uint64_t> within_threshold;
};

/// Minimum JSD of a fingerprint against one reference, over all pairs of
/// non-empty chunks.
struct PairMinimum {
  double divergence = std::numeric_limits<double>::infinity();
  std::uint64_t probe_chunk = 0;
  std::uint64_t reference_chunk = 0;
};

inline PairMinimum min_divergence(const std::vector<hammering::ChunkDistribution>& probe,
                                  const std::vector<hammering::ChunkDistribution>& reference) {
  PairMinimum best;
  for (const auto& a : probe) {
    if (a.distribution.total() == 0) continue;
    for (const auto& b : reference) {
      if (b.distribution.total() == 0) continue;
      const double v = js_divergence(a.distribution, b.distribution);
      if (v < best.divergence) best = {v, a.chunk_id, b.chunk_id};
    }
  }
  return best;
}

/// Match on the global minimum divergence; ties go to the lowest reference id.
inline MatchDecision match_fingerprints(const hammering::Fingerprint& fp, const ReferenceStore& store,
                                        double threshold = kDefaultThreshold) {
  if (!fp.has_signal()) throw UndefinedInputError("match: fingerprint has no non-empty chunk");
  MatchDecision d;
  d.threshold = threshold;
  std::optional<std::uint64_t> best_ref;
  PairMinimum best;
  for (const auto& [id, ref] : store.references()) {
    const PairMinimum m = min_divergence(fp.chunks, ref.chunks);
    if (m.divergence <= threshold) d.within_threshold.push_back(id);
    if (m.divergence < best.divergence) {
      best = m;
      best_ref = id;
    }
  }
  if (best_ref) {
    d.min_divergence = best.divergence;
    d.probe_chunk = best.probe_chunk;
    d.reference_chunk = best.reference_chunk;
  }
  if (best_ref && best.divergence <= threshold) {
    d.verdict = Verdict::kMatched;
    d.reference_id = best_ref;
  }
  return d;
}

/// Apply a decision. A new device gets a fresh reference. A match extends the
/// matched reference with the fingerprint's chunks, summing counts on chunk
/// ids it already holds. When the fingerprint is within threshold of several
/// references they are collapsed into the lowest id first. Returns the id
/// that now holds the fingerprint.
inline std::uint64_t update_references(ReferenceStore& store, const hammering::Fingerprint& fp,
                                       MatchDecision& decision) {
  std::uint64_t target = 0;
  if (decision.verdict == Verdict::kNewDevice) {
    target = store.create(fp.device_hint);
  } else {
    target = decision.within_threshold.front();
    store.collapse(target, decision.within_threshold, fp.session_id);
  }
  Reference& ref = store.mutable_ref(target);
  for (const auto& c : fp.chunks)
    if (c.distribution.total() > 0) ref.absorb(c);
  decision.reference_id = target;
  return target;
}

}  // namespace flipprint::matching

#endif  // FLIPPRINT_MATCHING_STORE_HPP_
