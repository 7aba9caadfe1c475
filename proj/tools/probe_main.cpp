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
// striplab-probe <host-or-url> [--timeout-ms N] [--strict-tls]
//
// Exit status: 0 https available, 1 http only, 2 unreachable, 3 bad input.

#include <CLI11.hpp>

#include <iostream>

#include "striplab/prober.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Probe ports 80 and 443 of a host and report HTTPS availability"};
  std::string target;
  int timeout_ms = 1000;
  bool strict_tls = false;
  std::string port_map;
  app.add_option("target", target, "Host name, IP literal or URL")->required();
  app.add_option("--timeout-ms", timeout_ms, "Per-port connect timeout")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict-tls", strict_tls, "Require a TLS handshake on port 443");
  app.add_option("--port-map", port_map, "Test-only port override, e.g. 80=8080,443=8443");
  CLI11_PARSE(app, argc, argv);

  striplab::CanonicalUrl url;
  striplab::ProbeOptions options;
  try {
    url = striplab::canonicalize(target);
    options.port_map = striplab::PortMap::parse(port_map);
  } catch (const std::exception& e) {
    std::cerr << "striplab-probe: " << e.what() << '\n';
    return 3;
  }
  options.timeout = striplab::Millis{timeout_ms};
  options.strict_tls = strict_tls;

  striplab::ProbeReport report;
  try {
    report = striplab::probe_host(url, options);
  } catch (const striplab::ResolutionFailure& e) {
    std::cout << "host " << url.host << ": " << e.what() << '\n'
              << "counter 0\nverdict unreachable\n";
    return 2;
  }

  auto print = [](const striplab::PortProbe& p) {
    std::cout << "port " << p.port << ' ' << striplab::outcome_name(p.outcome) << ' '
              << p.latency.count() << "ms\n";
  };
  std::cout << "host " << report.host << " (" << report.resolved_address << ")\n";
  print(report.probe80);
  print(report.probe443);
  if (report.probe21) print(*report.probe21);
  const striplab::Verdict verdict = striplab::decide(report);
  std::cout << "counter " << report.counter << '\n'
            << "verdict " << striplab::verdict_name(verdict) << '\n';
  switch (verdict) {
    case striplab::Verdict::kHttpsAvailable:
      return 0;
    case striplab::Verdict::kHttpOnly:
      return 1;
    case striplab::Verdict::kUnreachable:
      break;
  }
  return 2;
}
