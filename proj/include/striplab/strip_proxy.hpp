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

// Explicit forward proxy that performs the https -> http downgrade.
//
// Responses travelling to the victim have their https links, Location
// redirects and Secure cookie flags stripped; every stripped address goes
// into a TamperRecord. Later plaintext requests for a recorded address are
// relayed to the origin over TLS, so the victim talks plain HTTP while the
// origin still sees HTTPS. Request bodies are written to a CaptureLog.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "striplab/capture.hpp"
#include "striplab/http_message.hpp"
#include "striplab/net.hpp"
#include "striplab/rewrite.hpp"

namespace striplab {

struct StripProxyOptions {
  std::string listen_address = "127.0.0.1";
  std::uint16_t listen_port = 0;
  std::filesystem::path capture_log;
  std::optional<std::filesystem::path> trust_root;
  std::optional<std::filesystem::path> record_dump;
  PortMap port_map;
  bool capture_all = false;  // capture every request, not just POST
  Millis upstream_timeout{5000};
  Millis client_timeout{10000};
};

class StripProxy {
 public:
  explicit StripProxy(StripProxyOptions options);
  ~StripProxy();
  StripProxy(const StripProxy&) = delete;
  StripProxy& operator=(const StripProxy&) = delete;

  // Binds and starts accepting. Throws BindFailure.
  void start();
  // Stops accepting, waits for in-flight connections, writes the record
  // dump. Idempotent.
  void stop();

  std::uint16_t port() const;

  // Relays one victim request and returns the rewritten response. Upstream
  // connect and TLS failures become a 502 response.
  HttpMessageView forward_request(const HttpMessageView& request);

  TamperRecord& record() { return record_; }
  const TamperRecord& record() const { return record_; }
  CaptureLog& capture_log() { return capture_; }

  // Capture-log or record-dump failures seen so far; empty when none.
  std::string failures() const;

 private:
  void accept_loop();
  void serve(Socket client);
  HttpMessageView fetch_upstream(const HttpMessageView& upstream_request,
                                 const CanonicalUrl& target, bool secure,
                                 bool head_request);
  void reap_finished();

  StripProxyOptions options_;
  TamperRecord record_;
  CaptureLog capture_;
  TlsClientContext tls_;
  std::unique_ptr<Listener> listener_;
  std::thread acceptor_;
  std::atomic<bool> stopping_{false};

  struct Worker {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::mutex workers_mutex_;
  std::list<Worker> workers_;

  mutable std::mutex failure_mutex_;
  std::string dump_failure_;
  bool stopped_ = false;
};

// Finalizes a response for the victim: location, cookie and body
// rewrites, hop-by-hop headers dropped, Content-Length recomputed.
HttpMessageView downgrade_response(HttpMessageView response, TamperRecord& record);

}  // namespace striplab
