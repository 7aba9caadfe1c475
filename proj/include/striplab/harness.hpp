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

// Loopback testbed: a login origin, a scripted victim, and the scenario
// runner that wires them through the strip proxy and the enforcer.
//
// Everything listens on 127.0.0.1 under high ports. URLs in the testbed
// keep the well-known ports implicit ("https://localhost/submit"), and a
// PortMap translates 80/443 to the real listeners.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "striplab/net.hpp"
#include "striplab/prober.hpp"
#include "striplab/url.hpp"

namespace httplib {
class Server;
}

namespace striplab::harness {

constexpr std::string_view kOriginHost = "localhost";
constexpr std::string_view kLoopback = "127.0.0.1";

// ---------------------------------------------------------------------------
// Certificates

struct TestCertificate {
  std::filesystem::path trust_root;  // CA certificate, PEM
  std::filesystem::path leaf_cert;   // PEM, signed by the CA
  std::filesystem::path leaf_key;    // PEM, unencrypted
};

// Self-signed CA plus a leaf for `host` (DNS or IP subjectAltName),
// written under `dir`. Throws GenerationFailure.
TestCertificate generate_test_certificate(std::string_view host,
                                          const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Origin

enum class OriginMode { kDual, kHttpOnly };
std::string_view origin_mode_name(OriginMode mode);

struct ReceivedPost {
  bool tls = false;
  std::string path;
  std::string body;
};

// Login site. Dual mode: the plaintext listener answers every request with
// a 301 to the https root; the TLS listener serves a login form posting to
// an absolute https URL and sets a Secure cookie on submit. HTTP-only mode
// runs only the plaintext listener with a plaintext form.
class Origin {
 public:
  Origin(OriginMode mode, std::optional<TestCertificate> certificate);
  ~Origin();
  Origin(const Origin&) = delete;
  Origin& operator=(const Origin&) = delete;

  // Ports of 0 pick ephemeral ports. Throws BindFailure.
  void start(std::uint16_t http_port = 0, std::uint16_t https_port = 0);
  void stop();

  std::uint16_t http_port() const { return http_port_; }
  // 0 in HTTP-only mode.
  std::uint16_t https_port() const { return https_port_; }
  // 80 -> http_port, 443 -> https_port (or a closed port in HTTP-only mode).
  PortMap port_map() const;

  std::vector<ReceivedPost> received_posts() const;

 private:
  void install_routes(httplib::Server& server, bool tls);

  OriginMode mode_;
  std::optional<TestCertificate> certificate_;
  std::unique_ptr<httplib::Server> http_;
  std::unique_ptr<httplib::Server> https_;
  std::thread http_thread_;
  std::thread https_thread_;
  std::uint16_t http_port_ = 0;
  std::uint16_t https_port_ = 0;
  std::uint16_t closed_port_ = 0;
  mutable std::mutex mutex_;
  std::vector<ReceivedPost> posts_;
};

// Form page body as served by the origin.
std::string login_page(std::string_view action_url);

// Picks a loopback port that currently has no listener.
std::uint16_t unused_loopback_port();

// ---------------------------------------------------------------------------
// Victim

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

struct VictimConfig {
  std::string start_address{kOriginHost};  // scheme-less, as typed
  std::optional<Endpoint> proxy;
  std::optional<Endpoint> enforcer;
  PortMap port_map;
  std::optional<std::filesystem::path> trust_root;
  std::string user = "victim@example.test";
  std::string credential;
  Millis timeout{5000};
};

struct TranscriptStep {
  std::string method;
  std::string url;
  bool via_proxy = false;
  bool tls = false;
  int status = 0;
  std::optional<std::string> location;
  std::string body;
};

struct CheckResult {
  std::string verdict;
  std::optional<std::string> upgrade_url;
  int counter = 0;
};

struct VictimTranscript {
  std::vector<TranscriptStep> steps;
  std::string form_action;
  std::optional<CheckResult> check;
  std::string submit_url;
  bool submitted_over_tls = false;
  bool submitted_via_proxy = false;
  int submit_status = 0;

  nlohmann::json to_json() const;
};

// First action="..." attribute value in an HTML body, if any.
std::optional<std::string> extract_form_action(std::string_view html);

std::string percent_encode(std::string_view text);

// Navigates to the start address, follows one redirect, extracts the form
// action, and posts Email/Passwd. With an enforcer configured, the action
// URL is checked first and an https_available verdict sends the post over
// TLS straight to the upgrade URL. Throws NavigationFailure.
VictimTranscript run_victim(const VictimConfig& config);

// ---------------------------------------------------------------------------
// Scenarios

enum class VictimMode { kNaive, kEnforced };

struct ScenarioPorts {
  std::uint16_t http = 0;
  std::uint16_t https = 0;
  std::uint16_t proxy = 0;
  std::uint16_t enforcer = 0;
};

struct ScenarioConfig {
  std::string name;
  OriginMode origin_mode = OriginMode::kDual;
  VictimMode victim_mode = VictimMode::kNaive;
  std::string credential_marker;
  ScenarioPorts ports;  // zeros are filled with free loopback ports
  bool use_proxy = true;
  std::filesystem::path run_dir;  // empty: fresh temp directory
};

// Random alphanumeric marker; at least 16 bytes.
std::string make_credential_marker(std::size_t length = 24);

// "naive", "enforced" or "http-only". Throws std::invalid_argument.
ScenarioConfig make_scenario(std::string_view name);

struct Assertion {
  std::string description;
  bool passed = false;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::vector<Assertion> assertions;
  std::filesystem::path run_dir;
  std::filesystem::path capture_log_path;
  std::filesystem::path record_dump_path;
  std::optional<std::string> verdict;
  ScenarioPorts ports;
  VictimTranscript transcript;
  std::string error;  // orchestration failure, if any
  std::chrono::milliseconds wall_time{0};

  bool passed() const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

// Orchestrates origin, proxy, enforcer and victim, then checks the
// outcome. Assertion failures are recorded in the report, not thrown.
// Writes report.json and summary.txt into the run directory.
ScenarioReport run_scenario(ScenarioConfig config);

std::filesystem::path make_run_dir();

}  // namespace striplab::harness
