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

// HTTPS availability detection by TCP connect probes on ports 80 and 443.
//
// A host's counter is the number of those two ports that accept a
// connection: 2 means both schemes are served, 1 means one of them, 0 means
// the address is wrong or the host is down. The verdict prefers 443 over
// 80, so a host that answers on 443 is always reported as HTTPS-capable.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "striplab/net.hpp"
#include "striplab/url.hpp"

namespace striplab {

enum class ProbeOutcome { kOpen, kClosed, kTimeout };

std::string_view outcome_name(ProbeOutcome outcome);  // "open" / "closed" / "timeout"

struct PortProbe {
  std::uint16_t port = 0;  // logical port, before any PortMap is applied
  ProbeOutcome outcome = ProbeOutcome::kClosed;
  // Wall time spent on the probe. For kTimeout this is never below the
  // configured timeout.
  Millis latency{0};
};

struct ProbeReport {
  std::string host;
  std::string resolved_address;
  PortProbe probe80;
  PortProbe probe443;
  std::optional<PortProbe> probe21;
  int counter = 0;  // Open outcomes among probe80 and probe443
};

enum class Verdict { kHttpsAvailable, kHttpOnly, kUnreachable };

std::string_view verdict_name(Verdict verdict);  // "https_available" ...

struct ProbeOptions {
  Millis timeout{1000};
  // After a successful connect on 443, also require a TLS handshake.
  bool strict_tls = false;
  PortMap port_map;
};

// Throws ResolutionFailure.
std::string resolve(std::string_view host);

// Connects to address:port and closes without sending application data.
// Requires timeout > 0 (throws std::invalid_argument otherwise).
PortProbe probe_port(const std::string& address, std::uint16_t port, Millis timeout,
                     bool strict_tls = false);

// Resolves the host once, then probes 80 and 443 concurrently (plus 21 for
// ftp URLs). Throws ResolutionFailure.
ProbeReport probe_host(const CanonicalUrl& url, const ProbeOptions& options = {});

int count_open(const PortProbe& probe80, const PortProbe& probe443);

// 443 open -> HttpsAvailable; else 80 open -> HttpOnly; else Unreachable.
Verdict decide(const ProbeReport& report);

}  // namespace striplab
