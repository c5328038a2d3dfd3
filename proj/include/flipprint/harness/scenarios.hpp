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


#ifndef FLIPPRINT_HARNESS_SCENARIOS_HPP_
#define FLIPPRINT_HARNESS_SCENARIOS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipprint/analysis/entropy.hpp"
#include "flipprint/analysis/metrics.hpp"
#include "flipprint/dram/ground_truth.hpp"
#include "flipprint/harness/config.hpp"
#include "flipprint/harness/csv.hpp"
#include "flipprint/harness/records.hpp"
#include "flipprint/matching/birthday.hpp"

namespace flipprint::harness {

struct ScenarioResult {
  std::string scenario;
  std::map<std::string, CsvTable> tables;      // file stem -> table
  std::map<std::string, std::string> records;  // file name -> line-delimited records
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> failures;           // per-device failures, scenario continued

  [[nodiscard]] bool partial() const noexcept { return !failures.empty(); }
};

namespace detail {

inline constexpr std::uint64_t kSessionTag = 0x73657373;
inline constexpr std::uint64_t kAllocatorTag = 0x616c6c6f;
inline constexpr std::uint64_t kReseatTag = 0x72736174;
inline constexpr std::uint64_t kMonteCarloTag = 0x6d6f6e74;
inline constexpr std::uint64_t kGeometryTag = 0x67656f6d;

inline constexpr double kNoPair = std::numeric_limits<double>::infinity();

/// Default pattern: exactly as many decoys as the device's tracker follows.
inline templating::HammeringPattern pattern_for(const ScenarioConfig& c, const dram::DimmDevice& d) {
  if (c.pattern) return *c.pattern;
  return templating::decoy_pattern(d.trr.enabled ? d.trr.tracker_capacity : 0);
}

inline hammering::SessionConfig session_for(const ScenarioConfig& c, const hammering::SessionConfig& base,
                                            const dram::DimmDevice& d, std::uint32_t session) {
  hammering::SessionConfig s = base;
  s.allocator_seed = c.allocation == Allocation::kStable ? derive_seed(c.seed, {kAllocatorTag, d.id})
                                                         : derive_seed(c.seed, {kAllocatorTag, d.id, session});
  return s;
}

inline std::uint64_t session_seed(const ScenarioConfig& c, const dram::DimmDevice& d, std::uint32_t session,
                                  std::uint64_t variant = 0) {
  return derive_seed(c.seed, {kSessionTag, d.id, d.seat_epoch, session, variant});
}

struct Capture {
  std::vector<hammering::Fingerprint> fingerprints;                // one per device, in device order
  std::vector<std::vector<hammering::ChunkObservation>> observations;
};

struct CaptureOptions {
  std::uint32_t session = 0;
  dram::Environment env;
  std::optional<hammering::SessionConfig> session_config;
  std::optional<templating::HammeringPattern> pattern;
  std::uint64_t variant = 0;
};

inline CaptureOptions options(std::uint32_t session, dram::Environment env = {},
                              std::optional<hammering::SessionConfig> config = std::nullopt,
                              std::optional<templating::HammeringPattern> pattern = std::nullopt,
                              std::uint64_t variant = 0) {
  return {session, std::move(env), std::move(config), std::move(pattern), variant};
}

/// One session on every device. A device that fails is logged and gets an
/// empty fingerprint so positions stay aligned with the device list.
inline Capture capture(const ScenarioConfig& c, const std::vector<dram::DimmDevice>& devices, const CaptureOptions& o,
                       ScenarioResult& result) {
  Capture cap;
  for (const auto& d : devices) {
    const auto session = session_for(c, o.session_config.value_or(c.session), d, o.session);
    const auto pattern = o.pattern.value_or(pattern_for(c, d));
    const std::string id = "d" + std::to_string(d.id) + "-s" + std::to_string(o.session) + "-e" +
                           std::to_string(d.seat_epoch) + "-v" + std::to_string(o.variant);
    try {
      auto obs = hammering::observe_session(d, pattern, session, o.env, session_seed(c, d, o.session, o.variant));
      auto fp = hammering::fingerprint_from_observations(obs, id, d.id);
      fp.config = session.sweep;
      cap.fingerprints.push_back(std::move(fp));
      cap.observations.push_back(std::move(obs));
    } catch (const std::exception& e) {
      result.failures.push_back("device " + std::to_string(d.id) + " session " + std::to_string(o.session) + ": " +
                                e.what());
      hammering::Fingerprint empty;
      empty.session_id = id;
      empty.device_hint = d.id;
      cap.fingerprints.push_back(std::move(empty));
      cap.observations.emplace_back();
    }
  }
  return cap;
}

struct Pairs {
  std::vector<double> same;
  std::vector<double> cross;
};

/// Minimum chunk-pair JSD between every reference and every probe.
inline Pairs pair_divergences(const std::vector<hammering::Fingerprint>& refs,
                              const std::vector<hammering::Fingerprint>& probes, CsvTable* table = nullptr) {
  Pairs p;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const auto m = matching::min_divergence(probes[j].chunks, refs[i].chunks);
      const double v = std::isfinite(m.divergence) ? m.divergence : kNoPair;
      (i == j ? p.same : p.cross).push_back(v);
      if (table) table->add(static_cast<std::uint64_t>(*refs[i].device_hint),
                            static_cast<std::uint64_t>(*probes[j].device_hint), i == j, v);
    }
  }
  return p;
}

/// The same comparison with the single-sweep Jaccard baseline, reported as
/// the distance 1 - J so that "match iff distance <= tau" reads the same.
inline Pairs pair_jaccard_distances(const std::vector<std::vector<hammering::ChunkObservation>>& refs,
                                    const std::vector<std::vector<hammering::ChunkObservation>>& probes) {
  auto best = [](const std::vector<hammering::ChunkObservation>& a, const std::vector<hammering::ChunkObservation>& b) {
    double top = -1.0;
    for (const auto& x : a) {
      for (const auto& y : b) {
        if (x.sweeps.empty() || y.sweeps.empty()) continue;
        if (x.sweeps.front().empty() && y.sweeps.front().empty()) continue;
        top = std::max(top, analysis::jaccard(x.sweeps.front(), y.sweeps.front()));
      }
    }
    return top < 0.0 ? kNoPair : 1.0 - top;
  };
  Pairs p;
  for (std::size_t i = 0; i < refs.size(); ++i)
    for (std::size_t j = 0; j < probes.size(); ++j) (i == j ? p.same : p.cross).push_back(best(refs[i], probes[j]));
  return p;
}

inline std::vector<std::string> metric_columns() {
  return {"tau", "accuracy", "precision", "recall", "tp", "fp", "tn", "fn"};
}

inline std::vector<std::string> with_metrics(std::vector<std::string> head) {
  for (auto& m : metric_columns()) head.push_back(m);
  return head;
}

inline nlohmann::json metrics_json(const analysis::MetricsReport& r) {
  return {{"tau", r.threshold}, {"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall},
          {"tp", r.tp},         {"fp", r.fp},             {"tn", r.tn},               {"fn", r.fn},
          {"precision_degenerate", r.precision_degenerate}};
}

inline double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

/// Mean flips per sweep per chunk over a capture.
inline double mean_flips_per_sweep(const Capture& cap) {
  double flips = 0.0;
  double sweeps = 0.0;
  for (const auto& obs : cap.observations)
    for (const auto& o : obs)
      for (const auto& s : o.sweeps) {
        flips += static_cast<double>(s.size());
        sweeps += 1.0;
      }
  return sweeps == 0.0 ? 0.0 : flips / sweeps;
}

inline std::string fingerprint_records(const std::vector<hammering::Fingerprint>& fps) {
  std::ostringstream os;
  for (const auto& fp : fps) write_fingerprint(os, fp);
  return os.str();
}

/// Enroll every reference fingerprint as its own reference, then identify
/// each probe against the store.
inline analysis::MetricsReport identify(const std::vector<hammering::Fingerprint>& refs,
                                        const std::vector<hammering::Fingerprint>& probes, double tau,
                                        const std::string& scenario, matching::ReferenceStore& store) {
  for (const auto& r : refs) {
    const auto id = store.create(r.device_hint);
    for (const auto& ch : r.chunks)
      if (ch.distribution.total() > 0) store.mutable_ref(id).absorb(ch);
  }
  std::vector<analysis::IdentificationOutcome> outcomes;
  for (const auto& p : probes) {
    analysis::IdentificationOutcome o;
    o.truth = *p.device_hint;
    if (p.has_signal()) {
      const auto d = matching::match_fingerprints(p, store, tau);
      if (d.verdict == matching::Verdict::kMatched) o.predicted = store.at(*d.reference_id).device_label;
    }
    outcomes.push_back(o);
  }
  return analysis::classification_metrics(outcomes, tau, scenario);
}

/// Activation scale that cuts the expected flips of the reference chunks by
/// `ratio`, found by bisection on the closed-form expectation.
inline double solve_frequency_scale(const ScenarioConfig& c, const std::vector<dram::DimmDevice>& devices) {
  struct Group {
    std::vector<dram::Exposed> cells;
    double exposure;
  };
  std::vector<Group> groups;
  for (const auto& d : devices) {
    const auto session = session_for(c, c.session, d, 0);
    const auto pattern = pattern_for(c, d);
    Group g{{}, dram::effective_exposure(pattern, d.trr, session.sweep.activations, dram::Environment{})};
    if (!dram::evades_trr(pattern, d.trr)) continue;
    for (std::uint64_t id : hammering::sample_chunks(session.total_chunks, session.chunks_per_session,
                                                     *session.allocator_seed)) {
      auto cells = dram::exposed_cells(d, addrmap::ChunkHandle::from_index(id), session.sweep);
      g.cells.insert(g.cells.end(), cells.begin(), cells.end());
    }
    groups.push_back(std::move(g));
  }
  auto expected = [&](double scale) {
    double sum = 0.0;
    for (const auto& g : groups) sum += dram::expected_sweep_flips(g.cells, g.exposure * scale);
    return sum;
  };
  const double target = c.freq_flip_ratio * expected(1.0);
  if (!(target > 0.0)) throw ConfigError("frequency: the reference configuration produces no flips");
  double lo = std::log(1e-12);
  double hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (expected(std::exp(mid)) < target ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

inline double frequency_scale(const ScenarioConfig& c, const std::vector<dram::DimmDevice>& devices) {
  return c.freq_scale ? *c.freq_scale : solve_frequency_scale(c, devices);
}

inline std::vector<dram::DimmDevice> population(const ScenarioConfig& c) {
  return dram::create_population(c.population_or_default(), c.seed);
}

}  // namespace detail

// --- scenarios ---------------------------------------------------------------

/// Two fingerprints per device: the first is the reference, the second the probe.
inline ScenarioResult run_uniqueness(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-UNIQ";
  const auto devices = detail::population(c);
  const auto refs = detail::capture(c, devices, detail::options(0), r);
  const auto probes = detail::capture(c, devices, detail::options(1), r);

  CsvTable pairs({"reference_device", "probe_device", "same_device", "min_jsd"});
  const auto p = detail::pair_divergences(refs.fingerprints, probes.fingerprints, &pairs);
  const auto sweep = analysis::threshold_sweep(p.same, p.cross, r.scenario);
  CsvTable table(detail::with_metrics({}));
  for (const auto& row : sweep.rows)
    table.add(row.threshold, row.accuracy, row.precision, row.recall, row.tp, row.fp, row.tn, row.fn);

  const auto at_tau = analysis::verification_metrics(p.same, p.cross, c.tau, r.scenario);
  matching::ReferenceStore store;
  const auto ident = detail::identify(refs.fingerprints, probes.fingerprints, c.tau, r.scenario, store);
  CsvTable metrics(detail::with_metrics({"mode"}));
  for (const auto& [mode, m] : {std::pair{"verification", at_tau}, std::pair{"identification", ident}})
    metrics.add(mode, m.threshold, m.accuracy, m.precision, m.recall, m.tp, m.fp, m.tn, m.fn);

  r.tables["pairs"] = std::move(pairs);
  r.tables["threshold_sweep"] = std::move(table);
  r.tables["metrics"] = std::move(metrics);
  std::ostringstream store_records;
  write_store(store_records, store);
  r.records["store.jsonl"] = store_records.str();
  r.records["fingerprints.jsonl"] =
      detail::fingerprint_records(refs.fingerprints) + detail::fingerprint_records(probes.fingerprints);
  r.summary = {{"devices", devices.size()},
               {"perfect_separation", sweep.perfect_separation},
               {"max_same", detail::finite_or(sweep.max_same, 1e300)},
               {"min_cross", detail::finite_or(sweep.min_cross, 1e300)},
               {"best", detail::metrics_json(sweep.rows[sweep.best])},
               {"verification", detail::metrics_json(at_tau)},
               {"identification", detail::metrics_json(ident)}};
  return r;
}

/// Reference at session 0, then `sessions` further sessions matched at a fixed tau.
inline ScenarioResult run_stability(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-STABLE";
  const auto devices = detail::population(c);
  const auto refs = detail::capture(c, devices, detail::options(0), r);
  CsvTable table(detail::with_metrics({"session"}));
  nlohmann::json recalls = nlohmann::json::array();
  for (std::uint32_t s = 1; s <= c.sessions; ++s) {
    const auto probes = detail::capture(c, devices, detail::options(s), r);
    const auto p = detail::pair_divergences(refs.fingerprints, probes.fingerprints);
    const auto m = analysis::verification_metrics(p.same, p.cross, c.tau, r.scenario);
    table.add(s, m.threshold, m.accuracy, m.precision, m.recall, m.tp, m.fp, m.tn, m.fn);
    recalls.push_back(m.recall);
  }
  r.tables["sessions"] = std::move(table);
  r.summary = {{"devices", devices.size()}, {"sessions", c.sessions}, {"tau", c.tau}, {"recall", recalls}};
  return r;
}

/// Paired runs from the same reference: probe without and with a re-seat.
inline ScenarioResult run_reseat(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-RESEAT";
  const auto devices = detail::population(c);
  std::vector<dram::DimmDevice> reseated;
  for (const auto& d : devices)
    reseated.push_back(dram::reseat(d, c.reseat_perturbation, derive_seed(c.seed, {detail::kReseatTag, d.id}),
                                    c.reseat_jitter));
  const auto refs = detail::capture(c, devices, detail::options(0), r);
  const auto plain = detail::capture(c, devices, detail::options(1), r);
  const auto moved = detail::capture(c, reseated, detail::options(1), r);

  CsvTable table(detail::with_metrics({"condition"}));
  nlohmann::json conditions = nlohmann::json::object();
  for (const auto& [name, cap] : {std::pair{"no-reseat", &plain}, std::pair{"reseat", &moved}}) {
    const auto p = detail::pair_divergences(refs.fingerprints, cap->fingerprints);
    const auto m = analysis::verification_metrics(p.same, p.cross, c.tau, r.scenario);
    table.add(name, m.threshold, m.accuracy, m.precision, m.recall, m.tp, m.fp, m.tn, m.fn);
    conditions[name] = detail::metrics_json(m);
  }
  r.tables["reseat"] = std::move(table);
  const double a = conditions["no-reseat"]["recall"].get<double>();
  const double b = conditions["reseat"]["recall"].get<double>();
  r.summary = {{"devices", devices.size()},
               {"perturbation", c.reseat_perturbation},
               {"jitter", c.reseat_jitter},
               {"conditions", conditions},
               {"recall_drop", a - b}};
  return r;
}

/// Accuracy against work over the activations x repeats grid, plus the
/// half-rows variant.
inline ScenarioResult run_efficiency(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-EFF";
  const auto devices = detail::population(c);
  CsvTable table({"activations", "repeats", "rows", "work_units", "perfect_separation", "best_tau",
                  "best_accuracy", "best_precision", "best_recall", "tau", "accuracy", "precision", "recall"});
  std::vector<hammering::SweepConfig> grid;
  for (auto a : c.eff_activations)
    for (auto rep : c.eff_repeats) {
      hammering::SweepConfig s = c.session.sweep;
      s.activations = a;
      s.repeats = rep;
      s.row_subset = hammering::RowSubset::kAll;
      grid.push_back(s);
    }
  if (c.eff_half_rows) {
    hammering::SweepConfig s = c.session.sweep;
    s.row_subset = hammering::RowSubset::kFirstHalf;
    grid.push_back(s);
  }
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    hammering::SessionConfig session = c.session;
    session.sweep = grid[i];
    const auto o0 = detail::options(0, {}, session, std::nullopt, i);
    const auto o1 = detail::options(1, {}, session, std::nullopt, i);
    const auto refs = detail::capture(c, devices, o0, r);
    const auto probes = detail::capture(c, devices, o1, r);
    const auto p = detail::pair_divergences(refs.fingerprints, probes.fingerprints);
    const auto sweep = analysis::threshold_sweep(p.same, p.cross, r.scenario);
    const auto& best = sweep.rows[sweep.best];
    const auto m = analysis::verification_metrics(p.same, p.cross, c.tau, r.scenario);
    const std::uint64_t work = refs.fingerprints.front().work_units;
    table.add(grid[i].activations, grid[i].repeats, hammering::to_string(grid[i].row_subset), work,
              sweep.perfect_separation, best.threshold, best.accuracy, best.precision, best.recall, m.threshold,
              m.accuracy, m.precision, m.recall);
    cells.push_back({{"activations", grid[i].activations},
                     {"repeats", grid[i].repeats},
                     {"rows", hammering::to_string(grid[i].row_subset)},
                     {"work_units", work},
                     {"best_accuracy", best.accuracy},
                     {"accuracy", m.accuracy}});
  }
  r.tables["grid"] = std::move(table);
  r.summary = {{"devices", devices.size()}, {"cells", cells}};
  return r;
}

/// Reference at nominal activation scale, probe at a scale with about
/// `freq_flip_ratio` of the expected flips; once with the default pattern
/// and once with the low-flip pattern.
inline ScenarioResult run_frequency(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-FREQ";
  const auto devices = detail::population(c);
  const double scale = detail::frequency_scale(c, devices);
  dram::Environment low;
  low.activation_scale = scale;
  low.temperature_tag = "ambient";

  CsvTable table(detail::with_metrics(
      {"pattern", "activation_scale", "reference_flips_per_sweep", "probe_flips_per_sweep", "max_same", "min_cross"}));
  nlohmann::json patterns = nlohmann::json::object();
  const std::pair<const char*, std::optional<templating::HammeringPattern>> kinds[] = {
      {"high-flip", c.pattern}, {"low-flip", c.low_flip_pattern}};
  std::uint64_t variant = 0;
  for (const auto& [name, pattern] : kinds) {
    const auto refs = detail::capture(c, devices, detail::options(0, dram::Environment{}, std::nullopt, pattern, variant), r);
    const auto probes = detail::capture(c, devices, detail::options(1, low, std::nullopt, pattern, variant), r);
    ++variant;
    const auto p = detail::pair_divergences(refs.fingerprints, probes.fingerprints);
    const auto m = analysis::verification_metrics(p.same, p.cross, c.tau, r.scenario);
    const auto sweep = analysis::threshold_sweep(p.same, p.cross, r.scenario);
    const double ref_flips = detail::mean_flips_per_sweep(refs);
    const double probe_flips = detail::mean_flips_per_sweep(probes);
    table.add(name, scale, ref_flips, probe_flips, sweep.max_same, sweep.min_cross, m.threshold, m.accuracy,
              m.precision, m.recall, m.tp, m.fp, m.tn, m.fn);
    patterns[name] = detail::metrics_json(m);
    patterns[name]["reference_flips_per_sweep"] = ref_flips;
    patterns[name]["probe_flips_per_sweep"] = probe_flips;
  }
  r.tables["frequency"] = std::move(table);
  r.summary = {{"devices", devices.size()},
               {"activation_scale", scale},
               {"target_flip_ratio", c.freq_flip_ratio},
               {"patterns", patterns}};
  return r;
}

/// JSD over R sweeps against Jaccard of a single sweep, on the very same
/// observations, at nominal and at the shifted activation scale.
inline ScenarioResult run_baseline(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-BASELINE";
  const auto devices = detail::population(c);
  const double scale = detail::frequency_scale(c, devices);
  dram::Environment low;
  low.activation_scale = scale;

  const auto refs = detail::capture(c, devices, detail::options(0), r);
  CsvTable table(detail::with_metrics({"condition", "method"}));
  nlohmann::json conditions = nlohmann::json::object();
  for (const auto& [cond, env] : {std::pair{"nominal", dram::Environment{}}, std::pair{"frequency-shift", low}}) {
    const auto probes = detail::capture(c, devices, detail::options(1, env), r);
    const auto js = detail::pair_divergences(refs.fingerprints, probes.fingerprints);
    const auto jac = detail::pair_jaccard_distances(refs.observations, probes.observations);
    const auto mj = analysis::verification_metrics(js.same, js.cross, c.tau, r.scenario);
    const auto mk = analysis::verification_metrics(jac.same, jac.cross, c.tau, r.scenario);
    table.add(cond, "jsd", mj.threshold, mj.accuracy, mj.precision, mj.recall, mj.tp, mj.fp, mj.tn, mj.fn);
    table.add(cond, "jaccard-single-sweep", mk.threshold, mk.accuracy, mk.precision, mk.recall, mk.tp, mk.fp, mk.tn,
              mk.fn);
    conditions[cond] = {{"jsd", detail::metrics_json(mj)},
                        {"jaccard", detail::metrics_json(mk)},
                        {"recall_gap", mj.recall - mk.recall}};
  }
  r.tables["baseline"] = std::move(table);
  r.summary = {{"devices", devices.size()},
               {"activation_scale", scale},
               {"jaccard_similarity_threshold", 1.0 - c.tau},
               {"conditions", conditions}};
  return r;
}

/// Timing-channel geometry inference over every stock layout.
inline ScenarioResult run_geometry(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-GEOM";
  const auto candidates = addrmap::stock_layouts();
  CsvTable table({"hidden", "jitter", "repetition", "inferred", "ambiguous", "outcome", "measured_t_hit"});
  auto outcome = [](const std::string& hidden, const addrmap::GeometryInference& g) -> std::string {
    if (g.candidates.size() == 1 && g.candidates.front() == hidden) return "exact";
    const std::set<std::string> got(g.candidates.begin(), g.candidates.end());
    if (hidden == "2Rx16" && g.ambiguous && got == std::set<std::string>{"1Rx8", "2Rx16"}) return "flagged";
    return "wrong";
  };
  std::map<std::string, std::uint64_t> zero_counts;
  std::uint64_t jitter_ok = 0;
  std::uint64_t jitter_runs = 0;
  for (const auto& hidden : candidates) {
    for (int pass = 0; pass < 2; ++pass) {
      addrmap::TimingParams params = c.timing;
      if (pass == 0) params.jitter = 0.0;
      const std::uint32_t reps = pass == 0 ? 1 : c.geom_repetitions;
      for (std::uint32_t rep = 0; rep < reps; ++rep) {
        addrmap::TimingOracle oracle(hidden, params, derive_seed(c.seed, {detail::kGeometryTag, rep}));
        std::string inferred;
        std::string verdict;
        bool ambiguous = false;
        double t_hit = 0.0;
        try {
          const auto g = addrmap::infer_geometry(oracle, candidates);
          for (const auto& n : g.candidates) inferred += (inferred.empty() ? "" : "|") + n;
          ambiguous = g.ambiguous;
          t_hit = g.measured_t_hit;
          verdict = outcome(hidden.name, g);
        } catch (const InferenceError&) {
          verdict = "wrong";
          inferred = "none";
        }
        table.add(hidden.name, params.jitter, rep, inferred, ambiguous, verdict, t_hit);
        if (pass == 0) ++zero_counts[verdict];
        if (pass == 1) {
          ++jitter_runs;
          jitter_ok += verdict != "wrong";
        }
      }
    }
  }
  r.tables["geometry"] = std::move(table);
  r.summary = {{"zero_jitter", zero_counts}, {"jittered_correct", jitter_ok}, {"jittered_runs", jitter_runs}};
  return r;
}

/// Overlap and required-sample-size curves with a Monte-Carlo check.
inline ScenarioResult run_birthday(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-BIRTHDAY";
  const std::uint64_t n = c.birthday_chunks;
  CsvTable overlap({"N", "d", "probability"});
  for (std::uint64_t d = 1; d <= n / 2 + 1 && d <= n; ++d) overlap.add(n, d, matching::overlap_probability(n, d));

  CsvTable required({"N", "S", "target", "d"});
  bool monotone = true;
  std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t s = 1; s < n; ++s) {
    const std::uint64_t d = matching::required_sample_size(n, s, c.birthday_target);
    monotone = monotone && d <= prev;
    prev = d;
    required.add(n, s, c.birthday_target, d);
  }

  CsvTable mc({"N", "d", "trials", "hits", "p_monte_carlo", "p_exact", "sigma", "z"});
  bool within = true;
  for (std::uint64_t d : c.birthday_mc_sizes) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < c.birthday_trials; ++t) {
      const auto a = hammering::sample_chunks(n, d, derive_seed(c.seed, {detail::kMonteCarloTag, d, t, 0}));
      const auto b = hammering::sample_chunks(n, d, derive_seed(c.seed, {detail::kMonteCarloTag, d, t, 1}));
      std::size_t i = 0, j = 0;
      bool hit = false;
      while (!hit && i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else hit = true;
      }
      hits += hit;
    }
    const double p = matching::overlap_probability(n, d);
    const double trials = static_cast<double>(c.birthday_trials);
    const double pm = static_cast<double>(hits) / trials;
    const double sigma = std::sqrt(p * (1.0 - p) / trials);
    const double z = sigma > 0.0 ? (pm - p) / sigma : (pm == p ? 0.0 : detail::kNoPair);
    within = within && std::fabs(z) <= 3.0;
    mc.add(n, d, c.birthday_trials, hits, pm, p, sigma, z);
  }
  r.tables["overlap"] = std::move(overlap);
  r.tables["required_sample_size"] = std::move(required);
  r.tables["monte_carlo"] = std::move(mc);
  r.summary = {{"N", n},
               {"overlap_at_64", n >= 64 ? matching::overlap_probability(n, 64) : 0.0},
               {"required_monotone", monotone},
               {"monte_carlo_within_3_sigma", within}};
  return r;
}

/// Theoretical entropy curves and the empirical entropy of a chunk corpus.
inline ScenarioResult run_entropy(const ScenarioConfig& c) {
  ScenarioResult r;
  r.scenario = "S-ENTROPY";
  CsvTable theory({"cells", "flips", "bits"});
  for (std::uint64_t cells : c.entropy_regions)
    for (std::uint64_t k = 1; k <= c.entropy_max_flips && k <= cells; ++k)
      theory.add(cells, k, analysis::theoretical_entropy_bits(cells, k));
  CsvTable needed({"population", "bits"});
  for (double pop : c.entropy_populations) needed.add(pop, analysis::required_entropy_bits(pop));

  const auto devices = detail::population(c);
  hammering::SweepConfig one = c.session.sweep;
  one.repeats = 1;
  std::vector<std::vector<std::uint64_t>> sets;
  std::uint64_t flips = 0;
  std::uint64_t nonempty = 0;
  for (const auto& d : devices) {
    const auto pattern = detail::pattern_for(c, d);
    for (std::uint64_t id = 0; id < c.session.total_chunks; ++id) {
      try {
        auto obs = hammering::hammering_sweep(d, addrmap::ChunkHandle::from_index(id), pattern, one, {},
                                              derive_seed(c.seed, {detail::kSessionTag, d.id, id}));
        flips += obs.sweeps.front().size();
        nonempty += !obs.sweeps.front().empty();
        sets.push_back(std::move(obs.sweeps.front()));
      } catch (const std::exception& e) {
        r.failures.push_back("device " + std::to_string(d.id) + " chunk " + std::to_string(id) + ": " + e.what());
      }
    }
  }
  CsvTable empirical({"chunks", "nonempty_chunks", "mean_flips", "classes", "bits", "max_bits", "normalized"});
  nlohmann::json emp = nullptr;
  if (!sets.empty()) {
    const auto e = analysis::empirical_entropy(sets);
    const double mean = static_cast<double>(flips) / static_cast<double>(sets.size());
    const double max_bits = std::log2(static_cast<double>(e.chunks));
    empirical.add(e.chunks, nonempty, mean, e.classes, e.bits, max_bits, e.normalized);
    emp = {{"chunks", e.chunks}, {"classes", e.classes}, {"bits", e.bits}, {"normalized", e.normalized}};
  }
  r.tables["theoretical_entropy"] = std::move(theory);
  r.tables["required_entropy"] = std::move(needed);
  r.tables["empirical_entropy"] = std::move(empirical);
  r.summary = {{"empirical", emp},
               {"bits_65536_5", analysis::theoretical_entropy_bits(65'536, 5)},
               {"bits_524288_4", analysis::theoretical_entropy_bits(524'288, 4)},
               {"bits_16777216_3", analysis::theoretical_entropy_bits(16'777'216, 3)},
               {"required_1e18", analysis::required_entropy_bits(1e18)}};
  return r;
}

inline ScenarioResult run_scenario(const ScenarioConfig& c) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult r;
  if (c.scenario == "S-UNIQ") r = run_uniqueness(c);
  else if (c.scenario == "S-STABLE") r = run_stability(c);
  else if (c.scenario == "S-RESEAT") r = run_reseat(c);
  else if (c.scenario == "S-EFF") r = run_efficiency(c);
  else if (c.scenario == "S-FREQ") r = run_frequency(c);
  else if (c.scenario == "S-BASELINE") r = run_baseline(c);
  else if (c.scenario == "S-GEOM") r = run_geometry(c);
  else if (c.scenario == "S-BIRTHDAY") r = run_birthday(c);
  else r = run_entropy(c);
  r.summary["scenario"] = c.scenario;
  r.summary["seed"] = c.seed;
  r.summary["failures"] = r.failures;
  r.summary["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

/// Tables as <stem>.csv, records as given, summary.json last. Only the
/// summary carries wall-clock time, so CSVs are byte-identical across reruns.
inline std::vector<std::string> write_result(const ScenarioResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  for (const auto& [stem, table] : r.tables) {
    const auto path = (std::filesystem::path(dir) / (stem + ".csv")).string();
    table.write(path);
    written.push_back(path);
  }
  for (const auto& [name, text] : r.records) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
    written.push_back(path);
  }
  const auto path = (std::filesystem::path(dir) / "summary.json").string();
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << r.summary.dump(2) << '\n';
  written.push_back(path);
  return written;
}

}  // namespace flipprint::harness

#endif  // FLIPPRINT_HARNESS_SCENARIOS_HPP_
