// Copyright 2026 The qmon Authors
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

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "qmon/experiments.hpp"

namespace qmon {
namespace {

ExperimentConfig parse(const char* text) { return ExperimentConfig::from_json(json::parse(text)); }

TEST(Registry, ScenariosAreUniqueAndHaveDefaults) {
  std::set<std::string> names;
  for (const auto& s : registered_scenarios()) {
    EXPECT_TRUE(names.insert(s.name).second) << s.name;
    EXPECT_NO_THROW(scenario_defaults(s.name));
    EXPECT_FALSE(s.backends.empty());
  }
  EXPECT_EQ(names.size(), 10u);
  EXPECT_THROW(scenario_info("nope"), std::invalid_argument);
}

TEST(Config, DefaultsAndOverrides) {
  const ExperimentConfig c =
      parse(R"({"scenario": "finite_time_Z_pulse", "lattice": {"sites": 6}, "params": {"strength": 0.3}})");
  EXPECT_EQ(c.backend, Backend::state_vector);
  EXPECT_EQ(c.param<double>("strength"), 0.3);
  EXPECT_EQ(c.param<int>("plateau_from"), 4);
  EXPECT_EQ(c.output, std::filesystem::path("results/finite_time_Z_pulse"));
}

TEST(Config, RejectsUnknownParameters) {
  EXPECT_THROW(parse(R"({"scenario": "finite_time_Z_pulse", "params": {"strenght": 0.3}})"), std::invalid_argument);
}

TEST(Config, RejectsIncompatibleBackendsAndSizes) {
  EXPECT_THROW(parse(R"({"scenario": "finite_time_Z_pulse", "backend": "gaussian"})"), std::invalid_argument);
  EXPECT_THROW(parse(R"({"scenario": "lindblad_Z_dephasing", "lattice": {"sites": 12}})"), CapacityError);
  EXPECT_THROW(parse(R"({"scenario": "finite_time_X_pulse", "lattice": {"sites": 30}})"), CapacityError);
  EXPECT_THROW(parse(R"({"scenario": "finite_time_Z_pulse", "trajectories": 0})"), std::invalid_argument);
}

TEST(Config, HashIsStable) {
  const char* text = R"({"scenario": "rg_slow_drift", "backend": "rg"})";
  EXPECT_EQ(parse(text).hash(), parse(text).hash());
  EXPECT_NE(parse(text).hash(), parse(R"({"scenario": "rg_slow_drift", "seed": 2})").hash());
}

TEST(Config, ShippedConfigsValidate) {
  const std::filesystem::path dir = QMON_CONFIG_DIR;
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    EXPECT_NO_THROW(ExperimentConfig::load(e.path())) << e.path();
    ++count;
  }
  EXPECT_GE(count, 10);
}

TEST(Run, SmallGroundStateScaling) {
  const RunResult r = run(parse(R"({"scenario": "ground_state_scaling", "lattice": {"sites": 100}})"), false);
  EXPECT_TRUE(r.invariants_passed());
  EXPECT_NEAR(r.headline.at("central_charge").get<double>(), 0.5, 0.02);
}

TEST(Run, SameSeedSameResult) {
  const char* text = R"({"scenario": "finite_time_Z_pulse", "lattice": {"sites": 8}, "trajectories": 20,
                         "seed": 4, "params": {"plateau_from": 2}})";
  const RunResult a = run(parse(text), false);
  const RunResult b = run(parse(text), false);
  EXPECT_EQ(a.headline, b.headline);
  ASSERT_EQ(a.gates.size(), b.gates.size());
  for (std::size_t k = 0; k < a.gates.size(); ++k) EXPECT_EQ(a.gates[k].value, b.gates[k].value);
}

TEST(Run, UngatedScenarioKeepsOnlyInvariants) {
  const RunResult r = run(parse(R"({"scenario": "lindblad_Z_dephasing", "lattice": {"sites": 6},
                                    "params": {"horizon": 0.5}})"),
                          false);
  EXPECT_TRUE(r.gates.empty());
  EXPECT_FALSE(r.invariants.empty());
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(exit_code(r), 0);
}

TEST(Run, WritesSummaryAndReport) {
  const auto dir = std::filesystem::temp_directory_path() / "qmon_run_test";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = parse(R"({"scenario": "rg_slow_drift"})");
  c.output = dir;
  const RunResult r = run(c, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  const std::string text = report(dir);
  EXPECT_NE(text.find("rg_slow_drift"), std::string::npos);
  EXPECT_NE(text.find(r.passed() ? "PASS" : "FAIL"), std::string::npos);
  const json s = json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(s.at("config_hash").get<std::string>(), c.hash());
  std::filesystem::remove_all(dir);
}

TEST(Checks, Relations) {
  EXPECT_TRUE(check_below("x", 1.0, 2.0).passed);
  EXPECT_FALSE(check_below("x", 2.0, 2.0).passed);
  EXPECT_TRUE(check_above("x", 3.0, 2.0).passed);
  RunResult r;
  r.gates.push_back(check_below("x", 3.0, 2.0));
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Io, GitBlobHash) {
  // git hash-object of an empty blob and of "hello\n"
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  EXPECT_EQ(git_blob_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

}  // namespace
}  // namespace qmon
