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

// HTTPS upgrade check service.
//
//   GET /check?url=<percent-encoded url>
//
// 200: {"verdict": "https_available"|"http_only"|"unreachable",
//       "upgrade_url": string|null, "counter": 0|1|2,
//       "port80": "open"|"closed"|"timeout",
//       "port443": "open"|"closed"|"timeout", "cached": bool,
//       "latency80_ms": int, "latency443_ms": int}
// 400: {"error": "invalid_url"}

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include <nlohmann/json.hpp>

#include "striplab/prober.hpp"
#include "striplab/url.hpp"

namespace httplib {
class Server;
}

namespace striplab {

struct CheckResponse {
  Verdict verdict = Verdict::kUnreachable;
  // Set iff verdict is HttpsAvailable and the queried URL was http.
  std::optional<CanonicalUrl> upgrade_url;
  ProbeReport report;
  bool cached = false;
};

nlohmann::json to_json(const CheckResponse& response);

// Verdict + upgrade URL for an already-probed query. Shared by fresh and
// cached replies so both obey the same upgrade_url rule.
CheckResponse make_check_response(const CanonicalUrl& query, const ProbeReport& report,
                                  bool cached);

class Enforcer {
 public:
  using Clock = std::chrono::steady_clock;
  using ProbeFn = std::function<ProbeReport(const CanonicalUrl&)>;
  using NowFn = std::function<Clock::time_point()>;

  struct Options {
    ProbeOptions probe;
    std::chrono::seconds cache_ttl{60};
  };

  explicit Enforcer(Options options);
  // Tests substitute the prober and the clock.
  Enforcer(ProbeFn probe, std::chrono::seconds cache_ttl, NowFn now = Clock::now);

  // canonicalize -> cache -> probe_host -> decide. Throws InvalidUrl. A
  // name that does not resolve yields verdict Unreachable.
  CheckResponse handle_check(std::string_view raw_url);

  // Cached report for `host` younger than the TTL, if any.
  std::optional<ProbeReport> cache_lookup(const std::string& host) const;

 private:
  struct CacheEntry {
    ProbeReport report;
    Clock::time_point stored;
  };

  ProbeFn probe_;
  std::chrono::seconds ttl_;
  NowFn now_;
  mutable std::mutex mutex_;
  std::map<std::string, CacheEntry> cache_;
};

// HTTP front end for an Enforcer.
class EnforcerServer {
 public:
  explicit EnforcerServer(Enforcer& enforcer);
  ~EnforcerServer();
  EnforcerServer(const EnforcerServer&) = delete;
  EnforcerServer& operator=(const EnforcerServer&) = delete;

  // Port 0 picks an ephemeral port. Throws BindFailure.
  void start(const std::string& address, std::uint16_t port);
  void stop();
  // Blocks serving on the calling thread until stop() is called elsewhere.
  void run(const std::string& address, std::uint16_t port);
  std::uint16_t port() const { return port_; }

 private:
  void bind(const std::string& address, std::uint16_t port);

  Enforcer& enforcer_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::uint16_t port_ = 0;
};

}  // namespace striplab
