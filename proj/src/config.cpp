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

#include "qlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qlab::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_bare_key(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return line.substr(0, i);
    }
  }
  return line;
}

bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const char* first = s.data() + (s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_float(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data() + (s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out, std::chars_format::general);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string parse_string(const std::string& s, std::size_t line) {
  if (s.size() < 2 || s.back() != '"') throw ConfigError("unterminated string", line);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '\\') {
      if (i + 2 >= s.size()) throw ConfigError("dangling escape in string", line);
      const char e = s[++i];
      switch (e) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case '"': c = '"'; break;
        case '\\': c = '\\'; break;
        default: throw ConfigError(std::string("unsupported escape \\") + e, line);
      }
    } else if (c == '"') {
      throw ConfigError("unexpected quote inside string", line);
    }
    out.push_back(c);
  }
  return out;
}

Value parse_value(const std::string& raw, std::size_t line) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("missing value", line);
  if (s.front() == '"') return parse_string(s, line);
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated array (arrays must fit on one line)", line);
    std::vector<double> values;
    const std::string body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return values;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      double v = 0.0;
      if (t.empty() && ss.eof()) break;  // trailing comma
      if (!parse_float(t, v)) throw ConfigError("array element '" + t + "' is not a finite number", line);
      values.push_back(v);
    }
    return values;
  }
  std::int64_t i = 0;
  if (parse_int(s, i)) return i;
  double d = 0.0;
  if (parse_float(s, d)) return d;
  throw ConfigError("cannot parse value '" + s + "'", line);
}

const char* type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    default: return "array";
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::size_t line, std::string field)
    : std::runtime_error([&] {
        std::string m;
        if (line > 0) m += "line " + std::to_string(line) + ": ";
        if (!field.empty()) m += field + ": ";
        return m + message;
      }()),
      line_(line),
      field_(std::move(field)) {}

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!is_bare_key(name)) throw ConfigError("invalid section name '" + name + "'", line_no);
      section = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    if (!is_bare_key(key)) throw ConfigError("invalid key '" + key + "'", line_no);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.entries_.count(full)) throw ConfigError("duplicate key", line_no, full);
    try {
      cfg.entries_[full] = Entry{parse_value(line.substr(eq + 1), line_no), line_no};
    } catch (const ConfigError& e) {
      // Re-raise with the field attached.
      std::string msg = e.what();
      const auto colon = msg.find(": ");
      throw ConfigError(colon == std::string::npos ? msg : msg.substr(colon + 2), line_no, full);
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const Entry& Config::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("required field is missing", 0, key);
  used_.insert(key);
  return it->second;
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  throw ConfigError(message, it == entries_.end() ? 0 : it->second.line, key);
}

bool Config::get_bool(const std::string& key) const {
  const Entry& e = require(key);
  if (const auto* b = std::get_if<bool>(&e.value)) return *b;
  fail(key, std::string("expected boolean, found ") + type_name(e.value));
}

std::int64_t Config::get_int(const std::string& key) const {
  const Entry& e = require(key);
  if (const auto* i = std::get_if<std::int64_t>(&e.value)) return *i;
  fail(key, std::string("expected integer, found ") + type_name(e.value));
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::int64_t v = get_int(key);
  if (v < 0) fail(key, "must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::size_t Config::get_size(const std::string& key, std::size_t min, std::size_t max) const {
  const std::uint64_t v = get_u64(key);
  if (v < min || v > max) {
    fail(key, "must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "], got " + std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

double Config::get_double(const std::string& key) const {
  const Entry& e = require(key);
  if (const auto* d = std::get_if<double>(&e.value)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&e.value)) return static_cast<double>(*i);
  fail(key, std::string("expected number, found ") + type_name(e.value));
}

double Config::get_positive(const std::string& key) const {
  const double v = get_double(key);
  if (!(v > 0.0)) fail(key, "must be positive");
  return v;
}

std::string Config::get_string(const std::string& key) const {
  const Entry& e = require(key);
  if (const auto* s = std::get_if<std::string>(&e.value)) return *s;
  fail(key, std::string("expected string, found ") + type_name(e.value));
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const Entry& e = require(key);
  if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
  fail(key, std::string("expected array, found ") + type_name(e.value));
}

std::vector<std::size_t> Config::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  for (double v : get_doubles(key)) {
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) fail(key, "array entries must be non-negative integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void Config::set(const std::string& key, Value value) { entries_[key] = Entry{std::move(value), 0}; }

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries_) {
    if (!used_.count(key)) out.push_back(key);
  }
  return out;
}

void Config::reject_unused() const {
  const auto unused = unused_keys();
  if (!unused.empty()) fail(unused.front(), "unknown field for this experiment");
}

}  // namespace qlab::config
