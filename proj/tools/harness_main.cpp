// Copyright 2026 The Striplab Authors
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
// striplab-harness run --scenario {naive|enforced|http-only} [--keep-artifacts]
//
// Exit status 0 iff every scenario assertion passed.

#include <CLI11.hpp>

#include <iostream>

#include "striplab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Loopback HTTPS-stripping testbed"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  std::string scenario;
  bool keep_artifacts = false;
  std::string run_dir;
  run->add_option("--scenario", scenario, "Scenario to run")
      ->required()
      ->check(CLI::IsMember({"naive", "enforced", "http-only"}));
  run->add_flag("--keep-artifacts", keep_artifacts, "Keep the run directory");
  run->add_option("--run-dir", run_dir, "Use this directory instead of a fresh temp dir");
  CLI11_PARSE(app, argc, argv);

  namespace harness = striplab::harness;
  harness::ScenarioConfig config = harness::make_scenario(scenario);
  if (!run_dir.empty()) {
    config.run_dir = run_dir;
    keep_artifacts = true;
  }
  const harness::ScenarioReport report = harness::run_scenario(config);
  std::cout << report.summary();

  if (!report.run_dir.empty()) {
    if (keep_artifacts) {
      std::cout << "  artifacts kept in " << report.run_dir.string() << '\n';
    } else {
      std::error_code ec;
      std::filesystem::remove_all(report.run_dir, ec);
    }
  }
  return report.passed() ? 0 : 1;
}
