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

#include <stdlib.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "striplab/capture.hpp"
#include "striplab/enforcer.hpp"
#include "striplab/harness.hpp"
#include "striplab/rewrite.hpp"
#include "striplab/strip_proxy.hpp"

namespace striplab::harness {
namespace {

using SteadyClock = std::chrono::steady_clock;

void check(ScenarioReport& report, std::string description, bool passed,
           std::string detail = {}) {
  report.assertions.push_back({std::move(description), passed, std::move(detail)});
}

bool origin_got_marker(const std::vector<ReceivedPost>& posts, std::string_view marker,
                       bool over_tls) {
  return std::any_of(posts.begin(), posts.end(), [&](const ReceivedPost& post) {
    return post.tls == over_tls && post.body.find(marker) != std::string::npos;
  });
}

std::string describe_matches(const std::vector<CaptureMatch>& matches) {
  std::string out;
  for (const auto& m : matches) {
    if (!out.empty()) out += "; ";
    out += m.timestamp + (m.secure ? " SECURE " : " ") + m.method + " Data (" + m.host + ")";
  }
  return out.empty() ? "no matching entries" : out;
}

void validate_ports(const ScenarioPorts& ports) {
  std::set<std::uint16_t> seen;
  for (const std::uint16_t port : {ports.http, ports.https, ports.proxy, ports.enforcer}) {
    if (port == 0) continue;
    if (!seen.insert(port).second) {
      throw std::invalid_argument("scenario ports must be distinct: " + std::to_string(port));
    }
  }
}

}  // namespace

std::string make_credential_marker(std::size_t length) {
  static constexpr std::string_view kAlphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::random_device device;
  std::mt19937_64 rng(
      (static_cast<std::uint64_t>(device()) << 32) ^ device() ^
      static_cast<std::uint64_t>(SteadyClock::now().time_since_epoch().count()));
  std::uniform_int_distribution<std::size_t> pick(0, kAlphabet.size() - 1);
  std::string marker;
  for (std::size_t i = 0; i < std::max<std::size_t>(length, 16); ++i) {
    marker += kAlphabet[pick(rng)];
  }
  return marker;
}

ScenarioConfig make_scenario(std::string_view name) {
  ScenarioConfig config;
  config.name = std::string(name);
  config.credential_marker = make_credential_marker();
  if (name == "naive") {
    config.origin_mode = OriginMode::kDual;
    config.victim_mode = VictimMode::kNaive;
  } else if (name == "enforced") {
    config.origin_mode = OriginMode::kDual;
    config.victim_mode = VictimMode::kEnforced;
  } else if (name == "http-only") {
    config.origin_mode = OriginMode::kHttpOnly;
    config.victim_mode = VictimMode::kEnforced;
  } else {
    throw std::invalid_argument("unknown scenario: " + std::string(name));
  }
  return config;
}

std::filesystem::path make_run_dir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "striplab-run-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) {
    throw std::runtime_error("cannot create run directory under " +
                             std::filesystem::temp_directory_path().string());
  }
  return pattern;
}

bool ScenarioReport::passed() const {
  return error.empty() && !assertions.empty() &&
         std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.passed; });
}

nlohmann::json ScenarioReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = name;
  j["passed"] = passed();
  j["error"] = error.empty() ? nlohmann::json(nullptr) : nlohmann::json(error);
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : assertions) {
    j["assertions"].push_back(
        {{"description", a.description}, {"passed", a.passed}, {"detail", a.detail}});
  }
  j["run_dir"] = run_dir.string();
  j["capture_log"] = capture_log_path.string();
  j["record_dump"] = record_dump_path.string();
  j["verdict"] = verdict ? nlohmann::json(*verdict) : nlohmann::json(nullptr);
  j["ports"] = {{"http", ports.http},
                {"https", ports.https},
                {"proxy", ports.proxy},
                {"enforcer", ports.enforcer}};
  j["transcript"] = transcript.to_json();
  j["wall_time_ms"] = wall_time.count();
  return j;
}

std::string ScenarioReport::summary() const {
  std::ostringstream out;
  out << "scenario " << name << ": " << (passed() ? "PASS" : "FAIL") << " ("
      << wall_time.count() << " ms)\n";
  if (!error.empty()) out << "  error: " << error << '\n';
  for (const auto& a : assertions) {
    out << "  [" << (a.passed ? "pass" : "FAIL") << "] " << a.description;
    if (!a.detail.empty()) out << " -- " << a.detail;
    out << '\n';
  }
  if (verdict) out << "  enforcer verdict: " << *verdict << '\n';
  out << "  capture log: " << capture_log_path.string() << '\n';
  out << "  record dump: " << record_dump_path.string() << '\n';
  return out.str();
}

ScenarioReport run_scenario(ScenarioConfig config) {
  const auto started = SteadyClock::now();
  ScenarioReport report;
  report.name = config.name;

  try {
    validate_ports(config.ports);
    if (config.credential_marker.size() < 16) {
      throw std::invalid_argument("credential marker must be at least 16 bytes");
    }
    report.run_dir = config.run_dir.empty() ? make_run_dir() : config.run_dir;
    std::filesystem::create_directories(report.run_dir);
    report.capture_log_path = report.run_dir / "capture.log";
    report.record_dump_path = report.run_dir / "records.tsv";

    const TestCertificate certificate =
        generate_test_certificate(kOriginHost, report.run_dir / "tls");
    Origin origin(config.origin_mode, config.origin_mode == OriginMode::kDual
                                          ? std::optional<TestCertificate>(certificate)
                                          : std::nullopt);
    origin.start(config.ports.http, config.ports.https);
    const PortMap port_map = origin.port_map();
    report.ports.http = origin.http_port();
    report.ports.https = origin.https_port();

    std::unique_ptr<StripProxy> proxy;
    if (config.use_proxy) {
      StripProxyOptions options;
      options.listen_address = std::string(kLoopback);
      options.listen_port = config.ports.proxy;
      options.capture_log = report.capture_log_path;
      options.record_dump = report.record_dump_path;
      options.trust_root = certificate.trust_root;
      options.port_map = port_map;
      proxy = std::make_unique<StripProxy>(std::move(options));
      proxy->start();
      report.ports.proxy = proxy->port();
    }

    std::unique_ptr<Enforcer> enforcer;
    std::unique_ptr<EnforcerServer> enforcer_server;
    if (config.victim_mode == VictimMode::kEnforced) {
      Enforcer::Options options;
      options.probe.port_map = port_map;
      enforcer = std::make_unique<Enforcer>(options);
      enforcer_server = std::make_unique<EnforcerServer>(*enforcer);
      enforcer_server->start(std::string(kLoopback), config.ports.enforcer);
      report.ports.enforcer = enforcer_server->port();
    }

    VictimConfig victim;
    if (proxy) victim.proxy = Endpoint{std::string(kLoopback), proxy->port()};
    if (enforcer_server) {
      victim.enforcer = Endpoint{std::string(kLoopback), enforcer_server->port()};
    }
    victim.port_map = port_map;
    victim.trust_root = certificate.trust_root;
    victim.credential = config.credential_marker;

    bool navigated = false;
    std::string navigation_error;
    try {
      report.transcript = run_victim(victim);
      navigated = true;
    } catch (const NavigationFailure& e) {
      navigation_error = e.what();
    }
    if (report.transcript.check) report.verdict = report.transcript.check->verdict;

    if (enforcer_server) enforcer_server->stop();
    std::string proxy_failures;
    if (proxy) {
      proxy->stop();
      proxy_failures = proxy->failures();
    } else {
      std::ofstream(report.capture_log_path, std::ios::app);
      TamperRecord{}.write_dump(report.record_dump_path);
    }
    const auto posts = origin.received_posts();
    origin.stop();

    check(report, "victim completed navigation and form submission", navigated,
          navigation_error);
    check(report, "proxy capture log and record dump written", proxy_failures.empty(),
          proxy_failures);

    const std::string& marker = config.credential_marker;
    std::vector<CaptureMatch> matches;
    std::string capture_error;
    try {
      matches = scan_for_marker(report.capture_log_path, marker);
    } catch (const MalformedLog& e) {
      capture_error = e.what();
    }
    check(report, "capture log parses in the entry format", capture_error.empty(), capture_error);

    const auto& t = report.transcript;
    if (config.origin_mode == OriginMode::kDual && config.victim_mode == VictimMode::kNaive) {
      const bool stripped_action = t.form_action.starts_with("http://");
      check(report, "form action received by the victim was downgraded to http://",
            stripped_action, t.form_action);

      bool residue = false;
      for (const auto& step : t.steps) {
        if (!step.via_proxy) continue;
        residue = residue || step.body.find("https://") != std::string::npos ||
                  (step.location && istarts_with(*step.location, "https://"));
      }
      check(report, "no https URL reached the victim through the proxy", !residue);

      const bool plaintext_post =
          std::any_of(matches.begin(), matches.end(),
                      [](const CaptureMatch& m) { return m.method == "POST"; });
      check(report, "credential marker found in a plaintext capture entry", plaintext_post,
            describe_matches(matches));

      bool recorded = false;
      std::string wanted;
      if (stripped_action) {
        try {
          const CanonicalUrl action = canonicalize(t.form_action);
          wanted = action.host + "\t" + action.path;
          const auto entries = TamperRecord::read_dump(report.record_dump_path);
          recorded = std::find(entries.begin(), entries.end(),
                               TamperRecord::Entry{action.host, action.path}) != entries.end();
        } catch (const Error& e) {
          wanted = e.what();
        }
      }
      check(report, "record dump contains the stripped form-action address", recorded, wanted);
      check(report, "origin received the credential over TLS from the proxy",
            origin_got_marker(posts, marker, true));
    } else if (config.origin_mode == OriginMode::kDual) {
      check(report, "enforcer verdict is https_available",
            t.check && t.check->verdict == "https_available",
            t.check ? t.check->verdict : "no check made");
      const bool to_upgrade = t.check && t.check->upgrade_url &&
                              t.submit_url == *t.check->upgrade_url;
      check(report, "victim submitted over TLS to the upgrade_url",
            t.submitted_over_tls && !t.submitted_via_proxy && to_upgrade, t.submit_url);
      check(report, "credential marker absent from capture", matches.empty() && navigated,
            describe_matches(matches));
      check(report, "origin received the credential over TLS",
            origin_got_marker(posts, marker, true));
    } else {
      check(report, "enforcer verdict is http_only", t.check && t.check->verdict == "http_only",
            t.check ? t.check->verdict : "no check made");
      check(report, "victim submitted over plaintext (no upgrade available)",
            navigated && !t.submitted_over_tls, t.submit_url);
      check(report, "origin received the credential over plaintext",
            origin_got_marker(posts, marker, false));
    }
  } catch (const std::exception& e) {
    report.error = e.what();
  }

  report.wall_time =
      std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - started);
  if (!report.run_dir.empty()) {
    std::ofstream(report.run_dir / "report.json") << report.to_json().dump(2) << '\n';
    std::ofstream(report.run_dir / "summary.txt") << report.summary();
  }
  return report;
}

}  // namespace striplab::harness
