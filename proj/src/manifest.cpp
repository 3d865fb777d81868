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

#include "qlab/manifest.hpp"

#include <cmath>
#include <charconv>
#include <sstream>

#include "json.hpp"

#ifndef QLAB_VERSION
#define QLAB_VERSION "unknown"
#endif

namespace qlab::lab {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  // JSON has no NaN or infinity; keep them readable as strings.
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json value_json(const config::Value& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::vector<double>>) {
          ordered_json arr = ordered_json::array();
          for (double d : x) arr.push_back(number(d));
          return arr;
        } else if constexpr (std::is_same_v<T, double>) {
          return number(x);
        } else {
          return x;
        }
      },
      v);
}

}  // namespace

const char* code_version() { return QLAB_VERSION; }

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::less_equal: return "<=";
    case Comparator::less: return "<";
    case Comparator::greater_equal: return ">=";
    case Comparator::greater: return ">";
    case Comparator::equal: return "==";
  }
  return "?";
}

std::string format_double(double v) {
  // Shortest text that round-trips.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string CsvTable::render() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

RunManifest::RunManifest(std::string experiment, const config::Config& config, std::uint64_t seed)
    : experiment_(std::move(experiment)), config_(config), seed_(seed) {}

const Check& RunManifest::add_check(const std::string& name, double measured, Comparator comparator,
                                    double tolerance) {
  Check c{name, measured, comparator, tolerance, false};
  if (!std::isnan(measured)) {
    switch (comparator) {
      case Comparator::less_equal: c.passed = measured <= tolerance; break;
      case Comparator::less: c.passed = measured < tolerance; break;
      case Comparator::greater_equal: c.passed = measured >= tolerance; break;
      case Comparator::greater: c.passed = measured > tolerance; break;
      case Comparator::equal: c.passed = measured == tolerance; break;
    }
  }
  checks_.push_back(c);
  return checks_.back();
}

void RunManifest::add_records(const std::string& prefix, const Records& records) {
  for (const auto& [k, v] : records) records_.emplace_back(prefix + "." + k, v);
}

void RunManifest::set_timing(std::string started_at, double wall_clock_seconds) {
  started_at_ = std::move(started_at);
  wall_clock_seconds_ = wall_clock_seconds;
}

bool RunManifest::all_passed() const {
  for (const auto& c : checks_) {
    if (!c.passed) return false;
  }
  return true;
}

std::string RunManifest::to_json(bool include_timing) const {
  ordered_json j;
  j["experiment"] = experiment_;
  j["code_version"] = code_version();
  j["seed"] = seed_;
  ordered_json cfg = ordered_json::object();
  for (const auto& [key, entry] : config_.entries()) cfg[key] = value_json(entry.value);
  j["config"] = cfg;
  ordered_json checks = ordered_json::array();
  for (const auto& c : checks_) {
    checks.push_back({{"name", c.name},
                      {"measured", number(c.measured)},
                      {"comparator", to_string(c.comparator)},
                      {"tolerance", number(c.tolerance)},
                      {"passed", c.passed}});
  }
  j["checks"] = checks;
  ordered_json rec = ordered_json::object();
  for (const auto& [k, v] : records_) rec[k] = number(v);
  j["records"] = rec;
  j["files"] = files_;
  j["all_passed"] = all_passed();
  if (include_timing) {
    j["started_at"] = started_at_;
    j["wall_clock_seconds"] = wall_clock_seconds_;
  }
  return j.dump(2) + "\n";
}

}  // namespace qlab::lab
