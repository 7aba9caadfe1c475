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

#include "striplab/prober.hpp"

#include <future>
#include <stdexcept>

namespace striplab {
namespace {

using Clock = std::chrono::steady_clock;

Millis elapsed_since(Clock::time_point start) {
  return std::chrono::duration_cast<Millis>(Clock::now() - start);
}

// TLS handshake within whatever is left of the probe budget. Certificates
// are not checked: the question is whether the port speaks TLS at all.
bool handshake_succeeds(Socket socket, const std::string& address, Millis budget) {
  if (budget <= Millis{0}) return false;
  socket.set_io_timeout(budget);
  static const TlsClientContext context(std::nullopt, /*verify=*/false);
  try {
    TlsStream::connect(std::move(socket), context, address);
    return true;
  } catch (const NetError&) {
    return false;
  }
}

}  // namespace

std::string_view outcome_name(ProbeOutcome outcome) {
  switch (outcome) {
    case ProbeOutcome::kOpen:
      return "open";
    case ProbeOutcome::kClosed:
      return "closed";
    case ProbeOutcome::kTimeout:
      return "timeout";
  }
  return "closed";
}

std::string_view verdict_name(Verdict verdict) {
  switch (verdict) {
    case Verdict::kHttpsAvailable:
      return "https_available";
    case Verdict::kHttpOnly:
      return "http_only";
    case Verdict::kUnreachable:
      return "unreachable";
  }
  return "unreachable";
}

std::string resolve(std::string_view host) { return resolve_first(host); }

PortProbe probe_port(const std::string& address, std::uint16_t port, Millis timeout,
                     bool strict_tls) {
  if (timeout <= Millis{0}) throw std::invalid_argument("probe timeout must be positive");
  PortProbe probe;
  probe.port = port;
  const auto start = Clock::now();
  ConnectAttempt attempt = try_connect(address, port, timeout);
  switch (attempt.status) {
    case ConnectStatus::kConnected:
      probe.outcome = ProbeOutcome::kOpen;
      if (strict_tls &&
          !handshake_succeeds(std::move(attempt.socket), address,
                              timeout - elapsed_since(start))) {
        probe.outcome = ProbeOutcome::kClosed;
      }
      break;
    case ConnectStatus::kRefused:
      probe.outcome = ProbeOutcome::kClosed;
      break;
    case ConnectStatus::kTimedOut:
      probe.outcome = ProbeOutcome::kTimeout;
      break;
  }
  probe.latency = elapsed_since(start);
  return probe;
}

int count_open(const PortProbe& probe80, const PortProbe& probe443) {
  return (probe80.outcome == ProbeOutcome::kOpen ? 1 : 0) +
         (probe443.outcome == ProbeOutcome::kOpen ? 1 : 0);
}

ProbeReport probe_host(const CanonicalUrl& url, const ProbeOptions& options) {
  ProbeReport report;
  report.host = url.host;
  report.resolved_address = resolve(url.host);

  auto launch = [&](std::uint16_t logical, bool strict) {
    return std::async(std::launch::async, [address = report.resolved_address,
                                           physical = options.port_map.apply(logical),
                                           timeout = options.timeout, logical, strict] {
      PortProbe probe = probe_port(address, physical, timeout, strict);
      probe.port = logical;
      return probe;
    });
  };

  auto http = launch(80, false);
  auto https = launch(443, options.strict_tls);
  std::optional<std::future<PortProbe>> ftp;
  if (url.scheme == Scheme::kFtp) ftp = launch(21, false);

  report.probe80 = http.get();
  report.probe443 = https.get();
  if (ftp) report.probe21 = ftp->get();
  report.counter = count_open(report.probe80, report.probe443);
  return report;
}

Verdict decide(const ProbeReport& report) {
  if (report.probe443.outcome == ProbeOutcome::kOpen) return Verdict::kHttpsAvailable;
  if (report.probe80.outcome == ProbeOutcome::kOpen) return Verdict::kHttpOnly;
  return Verdict::kUnreachable;
}

}  // namespace striplab
