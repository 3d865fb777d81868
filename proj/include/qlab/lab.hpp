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

#ifndef QLAB_LAB_HPP
#define QLAB_LAB_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qlab/config.hpp"
#include "qlab/manifest.hpp"

namespace qlab::lab {

struct ExperimentInfo {
  std::string id;
  std::string summary;
};

const std::vector<ExperimentInfo>& registered_experiments();
bool is_registered(const std::string& id);

// Reads `experiment.id`; throws ConfigError when missing or unknown.
std::string experiment_id(const config::Config& config);

// Parses every parameter of the configured experiment without running it
// and rejects unknown fields.
void validate_config(const config::Config& config);

struct RunResult {
  RunManifest manifest;
  std::vector<CsvTable> tables;
};

// Runs the configured experiment. A seed override replaces `run.seed`
// before parsing and is echoed in the manifest.
RunResult run_experiment(const config::Config& config, std::optional<std::uint64_t> seed_override = {});

// Writes manifest.json and the CSV tables, creating the directory.
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

// Stream `stream` of the run seed; distinct streams are independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace qlab::lab

#endif  // QLAB_LAB_HPP
