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

#ifndef QLAB_MANIFEST_HPP
#define QLAB_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qlab/config.hpp"
#include "qlab/report.hpp"

namespace qlab::lab {

enum class Comparator { less_equal, less, greater_equal, greater, equal };

std::string to_string(Comparator c);

// One pass/fail line: passed iff `measured <comparator> tolerance`. A NaN
// measurement never passes.
struct Check {
  std::string name;
  double measured = 0.0;
  Comparator comparator = Comparator::less_equal;
  double tolerance = 0.0;
  bool passed = false;
};

struct CsvTable {
  std::string file;  // name inside the output directory
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string render() const;
};

// Round-trip formatting for doubles in CSV and manifest output.
std::string format_double(double v);

class RunManifest {
 public:
  RunManifest(std::string experiment, const config::Config& config, std::uint64_t seed);

  const Check& add_check(const std::string& name, double measured, Comparator comparator, double tolerance);
  void add_record(const std::string& name, double value) { records_.emplace_back(name, value); }
  void add_records(const std::string& prefix, const Records& records);
  void add_file(const std::string& name) { files_.push_back(name); }
  void set_timing(std::string started_at, double wall_clock_seconds);

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Check>& checks() const { return checks_; }
  const Records& records() const { return records_; }
  bool all_passed() const;

  // JSON text. Without timing the output depends only on (config, seed).
  std::string to_json(bool include_timing = true) const;

 private:
  std::string experiment_;
  config::Config config_;
  std::uint64_t seed_;
  std::vector<Check> checks_;
  Records records_;
  std::vector<std::string> files_;
  std::string started_at_;
  double wall_clock_seconds_ = 0.0;
};

const char* code_version();

}  // namespace qlab::lab

#endif  // QLAB_MANIFEST_HPP
