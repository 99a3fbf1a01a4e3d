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


// qmon command line: run, list-scenarios, validate, report.
//
// Exit codes: 0 all gates and invariant checks passed, 2 some failed,
// 1 execution or configuration error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qmon/experiments.hpp"

namespace {

constexpr int kExecutionError = 1;

int cmd_run(const std::string& config, const std::string& output_override) {
  qmon::ExperimentConfig cfg = qmon::ExperimentConfig::load(config);
  if (!output_override.empty()) cfg.output = output_override;
  std::cerr << "running " << cfg.scenario << " (" << qmon::to_string(cfg.backend) << ", L=" << cfg.lattice.sites
            << ", N=" << cfg.trajectories << ", workers=" << qmon::worker_count() << ")\n";
  const qmon::RunResult r = qmon::run(cfg);
  std::cout << qmon::report(cfg.output);
  return qmon::exit_code(r);
}

int cmd_list() {
  for (const auto& s : qmon::registered_scenarios()) {
    std::string backends;
    for (auto b : s.backends) backends += (backends.empty() ? "" : ",") + qmon::to_string(b);
    std::printf("%-26s %-28s %s%s\n", s.name.c_str(), backends.c_str(), s.summary.c_str(),
                s.gated ? "" : " [ungated]");
  }
  return 0;
}

int cmd_validate(const std::string& config) {
  const qmon::ExperimentConfig cfg = qmon::ExperimentConfig::load(config);
  std::cout << cfg.to_json().dump(2) << "\nconfig_hash " << cfg.hash() << "\nvalid\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  std::cout << qmon::report(dir);
  const auto s = qmon::json::parse(qmon::read_file(std::filesystem::path(dir) / "summary.json"));
  return s.at("passed").get<bool>() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qmon: monitored transverse-field Ising chain experiments"};
  app.require_subcommand(1);

  std::string config, output, dir;
  auto* run = app.add_subcommand("run", "run the scenario described by a config file");
  run->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "override the output directory");
  auto* list = app.add_subcommand("list-scenarios", "list registered scenarios");
  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
  auto* report = app.add_subcommand("report", "summarize a result directory");
  report->add_option("dir", dir, "result directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExecutionError;
  }

  try {
    if (*run) return cmd_run(config, output);
    if (*list) return cmd_list();
    if (*validate) return cmd_validate(config);
    if (*report) return cmd_report(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExecutionError;
  }
  return kExecutionError;
}
