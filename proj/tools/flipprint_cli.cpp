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


// Command-line front end: one subcommand per evaluation scenario, plus
// population export and reference-store inspection.
//
// Exit codes: 0 success, 1 invalid configuration or usage, 2 partial or
// runtime failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "flipprint/harness/scenarios.hpp"

namespace fh = flipprint::harness;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kFailure = 2;

struct ScenarioFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> tau;
  std::string preset;
};

int run_scenario_command(const std::string& scenario, const ScenarioFlags& f) {
  fh::ScenarioConfig c;
  if (!f.config.empty()) c = fh::load_config(f.config);
  c.scenario = scenario;
  if (f.seed) c.seed = *f.seed;
  if (f.tau) c.tau = *f.tau;
  if (!f.preset.empty()) c.population = flipprint::dram::population_preset(f.preset);
  if (!f.out.empty()) c.output_dir = f.out;
  c.validate();

  const fh::ScenarioResult r = fh::run_scenario(c);
  for (const auto& path : fh::write_result(r, c.output_dir)) std::cout << "wrote " << path << '\n';
  for (const auto& failure : r.failures) std::cerr << "failure: " << failure << '\n';
  return r.partial() ? kFailure : kOk;
}

int inspect_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw flipprint::ConfigError("cannot open " + path);
  const auto store = fh::read_store(in);
  std::cout << "references: " << store.size() << "  next id: " << store.next_id() << '\n';
  for (const auto& [id, ref] : store.references()) {
    std::uint64_t flips = 0;
    for (const auto& c : ref.chunks) flips += c.distribution.total();
    std::cout << "  ref " << id << "  label "
              << (ref.device_label ? std::to_string(*ref.device_label) : std::string("-")) << "  chunks "
              << ref.chunks.size() << "  flips " << flips << '\n';
  }
  std::cout << "merges: " << store.merge_log().size() << '\n';
  for (const auto& e : store.merge_log()) {
    std::cout << "  into " << e.into << " <-";
    for (auto a : e.absorbed) std::cout << ' ' << a;
    std::cout << "  (" << e.session_id << ")\n";
  }
  return kOk;
}

int export_population(const std::string& preset, const std::string& config, std::uint64_t seed,
                      const std::string& out) {
  flipprint::dram::PopulationSpec spec;
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw flipprint::ConfigError("cannot open " + config);
    spec = flipprint::dram::population_from_json(nlohmann::json::parse(in, nullptr, true, true));
  } else {
    spec = flipprint::dram::population_preset(preset);
  }
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : flipprint::dram::create_population(spec, seed)) devices.push_back(flipprint::dram::to_json(d));
  const std::string text = nlohmann::json{{"seed", seed}, {"devices", devices}}.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out);
    if (!f) throw flipprint::ConfigError("cannot write " + out);
    f << text;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flipprint: Rowhammer bit-flip fingerprinting workbench"};
  app.require_subcommand(1);

  struct Entry {
    const char* command;
    const char* scenario;
    const char* help;
  };
  const Entry entries[] = {
      {"uniq", "S-UNIQ", "two fingerprints per device, threshold sweep"},
      {"stable", "S-STABLE", "repeated sessions at a fixed threshold"},
      {"reseat", "S-RESEAT", "paired runs with and without a re-seat"},
      {"eff", "S-EFF", "activations x repeats grid with work units"},
      {"freq", "S-FREQ", "probe at reduced activation scale"},
      {"baseline", "S-BASELINE", "JSD against single-sweep Jaccard"},
      {"geom", "S-GEOM", "timing-channel geometry inference"},
      {"birthday", "S-BIRTHDAY", "chunk overlap and sample-size curves"},
      {"entropy", "S-ENTROPY", "theoretical and empirical entropy"},
  };

  ScenarioFlags flags;
  std::string selected;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.command, std::string(e.help) + " (" + e.scenario + ")");
    sub->alias(e.scenario);
    sub->add_option("-c,--config", flags.config, "scenario config file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("-s,--seed", flags.seed, "override the root seed");
    sub->add_option("-o,--out", flags.out, "output directory");
    sub->add_option("-t,--tau", flags.tau, "JSD match threshold")->check(CLI::Range(0.0, 1.0));
    sub->add_option("-p,--preset", flags.preset, "population preset");
    sub->callback([&selected, s = std::string(e.scenario)] { selected = s; });
  }

  std::string store_path;
  CLI::App* store = app.add_subcommand("store", "reference store tools");
  store->require_subcommand(1);
  CLI::App* inspect = store->add_subcommand("inspect", "summarise a persisted reference store");
  inspect->add_option("file", store_path, "store records (.jsonl)")->required()->check(CLI::ExistingFile);

  std::string pop_preset = "2rx8-36";
  std::string pop_config;
  std::string pop_out;
  std::uint64_t pop_seed = 1;
  CLI::App* pop = app.add_subcommand("population", "write a population as geometry and seeds");
  pop->add_option("-p,--preset", pop_preset, "population preset");
  pop->add_option("-c,--config", pop_config, "population spec file (JSON)")->check(CLI::ExistingFile);
  pop->add_option("-s,--seed", pop_seed, "population seed");
  pop->add_option("-o,--out", pop_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (!selected.empty()) return run_scenario_command(selected, flags);
    if (inspect->parsed()) return inspect_store(store_path);
    if (pop->parsed()) return export_population(pop_preset, pop_config, pop_seed, pop_out);
  } catch (const flipprint::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kValidation;
  } catch (const flipprint::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kValidation;
  } catch (const flipprint::RecordError& e) {
    std::cerr << "record error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kValidation;
}
