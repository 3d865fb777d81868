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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "qlab/lab.hpp"

using namespace qlab::lab;
using qlab::config::Config;
using qlab::config::ConfigError;

namespace {

std::filesystem::path config_dir() { return QLAB_CONFIG_DIR; }

}  // namespace

TEST_CASE("six experiments are registered") {
  const auto& exps = registered_experiments();
  CHECK(exps.size() == 6);
  for (const char* id : {"exp_energy_equivalence", "exp_reachability_gap", "exp_q_gaussian", "exp_soliton_mass",
                         "exp_mrf_vs_mp", "exp_noise_ensemble"}) {
    CHECK(is_registered(id));
  }
  CHECK_FALSE(is_registered("exp_unknown"));
}

TEST_CASE("shipped configs validate") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(config_dir())) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    const Config c = Config::load(entry.path());
    CHECK_NOTHROW(validate_config(c));
    CHECK(is_registered(experiment_id(c)));
    ++count;
  }
  CHECK(count == 6);
}

TEST_CASE("validation rejects unknown and malformed fields") {
  std::ifstream in(config_dir() / "soliton_mass.toml");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK_NOTHROW(validate_config(Config::parse(text)));
  CHECK_THROWS_AS(validate_config(Config::parse(text + "[extra]\nbogus = 3\n")), ConfigError);
  CHECK_THROWS_AS(validate_config(Config::parse("[experiment]\nid = \"exp_soliton_mass\"\n")), ConfigError);
  CHECK_THROWS_AS(validate_config(Config::parse("[experiment]\nid = \"nope\"\n[run]\nseed = 1\n")), ConfigError);
  std::string negative = text;
  const auto pos = negative.find("coupling = 1.0");
  REQUIRE(pos != std::string::npos);
  negative.replace(pos, 14, "coupling = -1.0");
  try {
    validate_config(Config::parse(negative));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 9);
    CHECK(e.field() == "sine_gordon.coupling");
  }
}

TEST_CASE("manifests are reproducible for a fixed seed") {
  const Config c = Config::load(config_dir() / "soliton_mass.toml");
  const RunResult a = run_experiment(c);
  const RunResult b = run_experiment(c);
  CHECK(a.manifest.to_json(false) == b.manifest.to_json(false));
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].render() == b.tables[i].render());
  CHECK(a.manifest.all_passed());
  const RunResult other = run_experiment(c, 43);
  CHECK(other.manifest.seed() == 43);
}

TEST_CASE("outputs are written to a fresh directory") {
  const Config c = Config::load(config_dir() / "reachability_gap.toml");
  const RunResult r = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "qlab_lab_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_outputs(r, dir);
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  for (const auto& t : r.tables) CHECK(std::filesystem::exists(dir / t.file));
  std::ifstream in(dir / "manifest.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"started_at\"") != std::string::npos);
  CHECK(text.find("\"all_passed\": true") != std::string::npos);
  std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("derived seeds differ per stream") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s) seen.insert(derive_seed(42, s));
  CHECK(seen.size() == 100);
  CHECK(derive_seed(42, 3) == derive_seed(42, 3));
  CHECK(derive_seed(42, 3) != derive_seed(43, 3));
}

TEST_CASE("check comparators") {
  const Config c = Config::parse("[run]\nseed = 1\n");
  RunManifest m("x", c, 1);
  CHECK(m.add_check("a", 1.0, Comparator::less_equal, 1.0).passed);
  CHECK_FALSE(m.add_check("b", 1.0, Comparator::less, 1.0).passed);
  CHECK_FALSE(m.add_check("c", std::nan(""), Comparator::greater_equal, 0.0).passed);
  CHECK_FALSE(m.all_passed());
  CHECK(format_double(0.0025) == "0.0025");
}
