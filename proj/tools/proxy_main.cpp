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
// striplab-proxy --listen <addr:port> --capture-log <path>
//                [--trust-root <pem>] [--record-dump <path>]
//
// Runs until SIGINT/SIGTERM, then writes the record dump.

#include <CLI11.hpp>

#include <iostream>

#include "cli_common.hpp"
#include "striplab/strip_proxy.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTPS-stripping forward proxy"};
  std::string listen;
  std::string capture_log;
  std::string trust_root;
  std::string record_dump;
  std::string port_map;
  bool capture_all = false;
  app.add_option("--listen", listen, "Listen address, addr:port")->required();
  app.add_option("--capture-log", capture_log, "Capture log path")->required();
  app.add_option("--trust-root", trust_root, "PEM trust root for upstream TLS");
  app.add_option("--record-dump", record_dump, "Write the tamper record here on shutdown");
  app.add_option("--port-map", port_map, "Test-only port override, e.g. 80=8080,443=8443");
  app.add_flag("--capture-all", capture_all, "Capture every request, not only POST");
  CLI11_PARSE(app, argc, argv);

  striplab::StripProxyOptions options;
  try {
    std::tie(options.listen_address, options.listen_port) = striplab::cli::parse_listen(listen);
    options.port_map = striplab::PortMap::parse(port_map);
  } catch (const std::exception& e) {
    std::cerr << "striplab-proxy: " << e.what() << '\n';
    return 2;
  }
  options.capture_log = capture_log;
  if (!trust_root.empty()) options.trust_root = trust_root;
  if (!record_dump.empty()) options.record_dump = record_dump;
  options.capture_all = capture_all;

  const sigset_t signals = striplab::cli::block_shutdown_signals();
  try {
    striplab::StripProxy proxy(std::move(options));
    proxy.start();
    std::cout << "striplab-proxy listening on " << listen.substr(0, listen.rfind(':')) << ':'
              << proxy.port() << std::endl;
    striplab::cli::wait_for_shutdown(signals);
    proxy.stop();
    if (const std::string failures = proxy.failures(); !failures.empty()) {
      std::cerr << "striplab-proxy: " << failures << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "striplab-proxy: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
