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

#ifndef QLAB_CONFIG_HPP
#define QLAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Flat-section key/value configuration in a TOML subset:
//
//   # comment
//   [section]
//   key = 1.5            # integer, float, true/false, "string"
//   list = [1, 2, 3.5]   # single-line numeric arrays
//
// Keys are addressed as "section.key". Nested tables, inline tables,
// multi-line values and dates are not supported.
namespace qlab::config {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0, std::string field = {});

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

using Value = std::variant<bool, std::int64_t, double, std::string, std::vector<double>>;

struct Entry {
  Value value;
  std::size_t line = 0;  // 0 for programmatic overrides
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  // Typed getters; missing keys and type mismatches raise ConfigError
  // naming the field and its line.
  bool get_bool(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key, std::size_t min = 0, std::size_t max = SIZE_MAX) const;
  double get_double(const std::string& key) const;
  double get_positive(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  void set(const std::string& key, Value value);

  const std::map<std::string, Entry>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  // Keys that no getter has read so far, in sorted order.
  std::vector<std::string> unused_keys() const;
  // Throws on the first unused key.
  void reject_unused() const;

 private:
  const Entry& require(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace qlab::config

#endif  // QLAB_CONFIG_HPP
