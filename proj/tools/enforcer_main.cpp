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
// striplab-enforcer --listen <addr:port> [--timeout-ms N] [--cache-ttl-s N]
//                   [--strict-tls]

#include <CLI11.hpp>

#include <iostream>

#include "cli_common.hpp"
#include "striplab/enforcer.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTPS upgrade check service"};
  std::string listen = "127.0.0.1:8765";
  int timeout_ms = 1000;
  int cache_ttl_s = 60;
  bool strict_tls = false;
  std::string port_map;
  app.add_option("--listen", listen, "Listen address, addr:port")->capture_default_str();
  app.add_option("--timeout-ms", timeout_ms, "Per-port probe timeout")
      ->check(CLI::PositiveNumber);
  app.add_option("--cache-ttl-s", cache_ttl_s, "Verdict cache lifetime")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--strict-tls", strict_tls, "Require a TLS handshake on port 443");
  app.add_option("--port-map", port_map, "Test-only port override, e.g. 80=8080,443=8443");
  CLI11_PARSE(app, argc, argv);

  striplab::Enforcer::Options options;
  std::pair<std::string, std::uint16_t> endpoint;
  try {
    endpoint = striplab::cli::parse_listen(listen);
    options.probe.port_map = striplab::PortMap::parse(port_map);
  } catch (const std::exception& e) {
    std::cerr << "striplab-enforcer: " << e.what() << '\n';
    return 2;
  }
  options.probe.timeout = striplab::Millis{timeout_ms};
  options.probe.strict_tls = strict_tls;
  options.cache_ttl = std::chrono::seconds{cache_ttl_s};

  const sigset_t signals = striplab::cli::block_shutdown_signals();
  try {
    striplab::Enforcer enforcer(options);
    striplab::EnforcerServer server(enforcer);
    server.start(endpoint.first, endpoint.second);
    std::cout << "striplab-enforcer listening on " << endpoint.first << ':' << server.port()
              << std::endl;
    striplab::cli::wait_for_shutdown(signals);
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "striplab-enforcer: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
