// Copyright 2026 The qlab Authors
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

// qlab command-line driver.
//
//   qlab list
//   qlab validate --config FILE
//   qlab run EXPERIMENT --config FILE [--out DIR] [--seed N] [--verbose]
//
// Exit status: 0 when every check passes, 1 when any check fails,
// 2 for usage and configuration errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qlab/config.hpp"
#include "qlab/lab.hpp"
#include "qlab/warnings.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void print_registered(std::ostream& os) {
  for (const auto& e : qlab::lab::registered_experiments()) os << e.id << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherent-state field theory lab"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Print the registered experiment ids");

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
  validate->add_option("--config", config_path, "Config file")->required();

  std::string experiment;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("experiment", experiment, "Experiment id")->required();
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (created if missing)");
  run->add_option("--seed", seed, "Override run.seed");
  run->add_flag("--verbose", verbose, "Print every check and record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (list->parsed()) {
    print_registered(std::cout);
    return kExitPass;
  }

  try {
    if (validate->parsed()) {
      const auto cfg = qlab::config::Config::load(config_path);
      qlab::lab::validate_config(cfg);
      std::cout << config_path << ": ok (" << qlab::lab::experiment_id(cfg) << ")\n";
      return kExitPass;
    }

    if (!qlab::lab::is_registered(experiment)) {
      std::cerr << "error: unknown experiment '" << experiment << "'; registered ids:\n";
      print_registered(std::cerr);
      return kExitUsage;
    }
    const auto cfg = qlab::config::Config::load(config_path);
    if (cfg.has("experiment.id") && cfg.get_string("experiment.id") != experiment) {
      std::cerr << "error: " << config_path << " configures '" << cfg.get_string("experiment.id")
                << "', not '" << experiment << "'\n";
      return kExitUsage;
    }
    qlab::config::Config with_id = cfg;
    with_id.set("experiment.id", experiment);
    if (!verbose) {
      qlab::set_warning_handler([](const std::string&) {});
    }

    const auto result = qlab::lab::run_experiment(with_id, seed);
    qlab::lab::write_outputs(result, out_dir);

    const auto& manifest = result.manifest;
    for (const auto& c : manifest.checks()) {
      if (verbose || !c.passed) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << qlab::lab::format_double(c.measured) << ' '
                  << qlab::lab::to_string(c.comparator) << ' ' << qlab::lab::format_double(c.tolerance) << '\n';
      }
    }
    if (verbose) {
      for (const auto& [k, v] : manifest.records()) std::cout << "  " << k << " = " << v << '\n';
    }
    std::cout << manifest.experiment() << ": " << (manifest.all_passed() ? "all checks passed" : "checks failed")
              << " (seed " << manifest.seed() << ", manifest in " << out_dir << ")\n";
    return manifest.all_passed() ? kExitPass : kExitFail;
  } catch (const qlab::config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
