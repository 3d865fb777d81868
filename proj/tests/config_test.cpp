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


#include <string>

#include "doctest.h"
#include "qlab/config.hpp"

using qlab::config::Config;
using qlab::config::ConfigError;

namespace {

const char* kSample = R"(# comment
[run]
seed = 42   # trailing comment
name = "a \"quoted\" name"
verbose = true

[grid]
spacing = 2.5e-2
sizes = [1, 2, 3]
weights = [0.5, -1e3]
)";

}  // namespace

TEST_CASE("typed values") {
  const Config c = Config::parse(kSample);
  CHECK(c.get_int("run.seed") == 42);
  CHECK(c.get_u64("run.seed") == 42);
  CHECK(c.get_string("run.name") == "a \"quoted\" name");
  CHECK(c.get_bool("run.verbose"));
  CHECK(c.get_double("grid.spacing") == 0.025);
  CHECK(c.get_double("run.seed") == 42.0);
  CHECK(c.get_sizes("grid.sizes") == std::vector<std::size_t>{1, 2, 3});
  CHECK(c.get_doubles("grid.weights") == std::vector<double>{0.5, -1000.0});
  CHECK(c.entries().at("grid.spacing").line == 8);
}

TEST_CASE("errors name the line and field") {
  const Config c = Config::parse(kSample);
  try {
    (void)c.get_int("grid.spacing");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 8);
    CHECK(e.field() == "grid.spacing");
    CHECK(std::string(e.what()).find("line 8") != std::string::npos);
  }
  CHECK_THROWS_AS(c.get_double("grid.missing"), ConfigError);
  CHECK_THROWS_AS(c.get_positive("grid.weights"), ConfigError);
  CHECK_THROWS_AS(c.get_size("run.seed", 0, 10), ConfigError);
  CHECK_THROWS_AS(c.get_sizes("grid.weights"), ConfigError);
}

TEST_CASE("syntax errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      (void)Config::parse(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  CHECK(line_of("[a]\nx = 1\nx = 2\n") == 3);
  CHECK(line_of("[a]\n\ny = \n") == 3);
  CHECK(line_of("[a\n") == 1);
  CHECK(line_of("[a]\nz = \"open\n") == 2);
  CHECK(line_of("[a]\nw = [1, 2\n") == 2);
  CHECK(line_of("[a]\nv = 1.2.3\n") == 2);
}

TEST_CASE("unused keys are reported") {
  const Config c = Config::parse("[a]\nx = 1\ny = 2\n");
  (void)c.get_int("a.x");
  CHECK(c.unused_keys() == std::vector<std::string>{"a.y"});
  try {
    c.reject_unused();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "a.y");
    CHECK(e.line() == 3);
  }
  (void)c.get_int("a.y");
  CHECK_NOTHROW(c.reject_unused());
}

TEST_CASE("programmatic overrides") {
  Config c = Config::parse("[run]\nseed = 1\n");
  c.set("run.seed", std::int64_t{7});
  CHECK(c.get_u64("run.seed") == 7);
  CHECK(c.entries().at("run.seed").line == 0);
  CHECK_THROWS_AS(Config::load("/nonexistent/qlab.toml"), ConfigError);
}
