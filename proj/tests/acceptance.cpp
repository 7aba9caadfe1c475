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


// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 iff
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>

#include "striplab/capture.hpp"
#include "striplab/enforcer.hpp"
#include "striplab/harness.hpp"
#include "striplab/prober.hpp"
#include "striplab/rewrite.hpp"
#include "support/fixtures.hpp"

namespace {

using namespace striplab;
using namespace std::chrono_literals;

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome scenario_criterion(const char* name) {
  const harness::ScenarioReport r = harness::run_scenario(harness::make_scenario(name));
  std::ostringstream detail;
  detail << r.assertions.size() << " assertions, wall " << r.wall_time.count() << " ms";
  if (!r.passed()) {
    detail << "; " << r.error;
    for (const auto& a : r.assertions) {
      if (!a.passed) detail << "; failed: " << a.description << " (" << a.detail << ")";
    }
  }
  const bool fast = r.wall_time < 10s;
  if (!fast) detail << "; slower than 10 s";
  std::error_code ec;
  std::filesystem::remove_all(r.run_dir, ec);
  return {r.passed() && fast, detail.str()};
}

Outcome counter_criterion() {
  testing::TempDir dir;
  ProbeOptions options;
  options.timeout = 1000ms;
  const CanonicalUrl url = canonicalize("localhost");

  harness::Origin dual(harness::OriginMode::kDual,
                       harness::generate_test_certificate("localhost", dir.path()));
  dual.start();
  options.port_map = dual.port_map();
  const int c2 = probe_host(url, options).counter;
  dual.stop();

  harness::Origin http_only(harness::OriginMode::kHttpOnly, std::nullopt);
  http_only.start();
  options.port_map = http_only.port_map();
  const int c1 = probe_host(url, options).counter;
  http_only.stop();

  PortMap none;
  none.set(80, harness::unused_loopback_port());
  none.set(443, harness::unused_loopback_port());
  options.port_map = none;
  const int c0 = probe_host(url, options).counter;

  std::ostringstream detail;
  detail << "dual=" << c2 << " http-only=" << c1 << " none=" << c0;
  return {c2 == 2 && c1 == 1 && c0 == 0, detail.str()};
}

Outcome truth_table_criterion() {
  const ProbeOutcome all[] = {ProbeOutcome::kOpen, ProbeOutcome::kClosed, ProbeOutcome::kTimeout};
  int matched = 0;
  for (const auto p80 : all) {
    for (const auto p443 : all) {
      ProbeReport r;
      r.probe80 = {80, p80, 1ms};
      r.probe443 = {443, p443, 1ms};
      r.counter = count_open(r.probe80, r.probe443);
      const Verdict expected = p443 == ProbeOutcome::kOpen  ? Verdict::kHttpsAvailable
                               : p80 == ProbeOutcome::kOpen ? Verdict::kHttpOnly
                                                            : Verdict::kUnreachable;
      if (decide(r) == expected) ++matched;
    }
  }
  return {matched == 9, std::to_string(matched) + "/9"};
}

Outcome rewrite_criterion() {
  testing::Generator gen(20260301);
  constexpr int kSamples = 1000;
  int length_failures = 0;
  int idempotence_failures = 0;
  int residue_failures = 0;
  int completeness_failures = 0;
  for (int i = 0; i < kSamples; ++i) {
    const testing::PlantedBody sample = gen.planted_body(64 * 1024, 50);
    TamperRecord record;
    const std::string once = rewrite_body(sample.body, "text/html", record);
    const std::size_t tokens = testing::count_occurrences(sample.body, "https://");
    if (once.size() != sample.body.size() - tokens) ++length_failures;
    if (testing::count_occurrences(once, "https://") != 0) ++residue_failures;
    TamperRecord again;
    if (rewrite_body(once, "text/html", again) != once) ++idempotence_failures;
    for (const auto& [host, path] : sample.planted) {
      if (!record.contains(host, path)) {
        ++completeness_failures;
        break;
      }
    }
  }
  std::ostringstream detail;
  detail << kSamples << " bodies; failures: length " << length_failures << ", idempotence "
         << idempotence_failures << ", residue " << residue_failures << ", record "
         << completeness_failures;
  return {length_failures + idempotence_failures + residue_failures + completeness_failures == 0,
          detail.str()};
}

Outcome capture_criterion() {
  testing::TempDir dir;
  testing::Generator gen(20261018);
  const auto base = WallClock::now() - 48h;
  std::vector<CaptureEntry> entries;
  for (int i = 0; i < 100; ++i) entries.push_back(gen.capture_entry(base));
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  const auto path = dir.path() / "capture.log";
  {
    CaptureLog log(path);
    for (const auto& e : entries) append_capture(e, log);
    if (log.failed()) return {false, log.failure()};
  }
  std::ifstream in(path, std::ios::binary);
  const std::string text{std::istreambuf_iterator<char>(in), {}};
  const auto parsed = parse_capture_log(text);
  int mismatched = parsed.size() == entries.size() ? 0 : 1;
  for (std::size_t i = 0; i < std::min(parsed.size(), entries.size()); ++i) {
    const auto& a = parsed[i];
    const auto& b = entries[i];
    if (a.timestamp != b.timestamp || a.secure != b.secure || a.host != b.host ||
        a.method != b.method || a.body != b.body) {
      ++mismatched;
    }
  }
  int queries = 0;
  int disagreements = 0;
  for (int q = 0; q < 100; ++q) {
    std::string marker;
    const auto& body = entries[gen.uniform(0, entries.size() - 1)].body;
    if (q % 2 == 0 && !body.empty()) {
      marker = body.substr(gen.uniform(0, body.size() - 1), gen.uniform(1, 16));
    } else {
      marker = gen.word(8, 16, "ABCDEF0123456789");
    }
    std::vector<std::pair<std::string, bool>> oracle;
    for (const auto& e : entries) {
      if (e.body.find(marker) != std::string::npos) oracle.emplace_back(e.host, e.secure);
    }
    std::vector<std::pair<std::string, bool>> got;
    for (const auto& m : scan_for_marker(path, marker)) got.emplace_back(m.host, m.secure);
    ++queries;
    if (got != oracle) ++disagreements;
  }
  std::ostringstream detail;
  detail << entries.size() << " entries, " << mismatched << " round-trip mismatches; " << queries
         << " marker queries, " << disagreements << " disagreements with the substring oracle";
  return {mismatched == 0 && disagreements == 0, detail.str()};
}

Outcome enforcer_criterion() {
  int matrix_cells = 0;
  int matrix_failures = 0;
  const ProbeOutcome all[] = {ProbeOutcome::kOpen, ProbeOutcome::kClosed, ProbeOutcome::kTimeout};
  for (const char* raw : {"http://ex.test/a?b=1", "http://ex.test:8080/", "https://ex.test/",
                          "ftp://ex.test/"}) {
    const CanonicalUrl query = canonicalize(raw);
    for (const auto p80 : all) {
      for (const auto p443 : all) {
        ProbeReport report;
        report.probe80 = {80, p80, 1ms};
        report.probe443 = {443, p443, 1ms};
        report.counter = count_open(report.probe80, report.probe443);
        const CheckResponse r = make_check_response(query, report, false);
        const bool want = r.verdict == Verdict::kHttpsAvailable && query.scheme == Scheme::kHttp;
        bool ok = r.upgrade_url.has_value() == want;
        if (ok && want) ok = *r.upgrade_url == to_https(query);
        ++matrix_cells;
        if (!ok) ++matrix_failures;
      }
    }
  }

  const auto shapes = testing::twenty_host_shapes();
  testing::MultiHostFixture fixture(shapes);
  Enforcer::Options options;
  options.probe.timeout = 500ms;
  options.probe.port_map = fixture.port_map();
  Enforcer enforcer(options);
  int pipeline_mismatches = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const std::string raw = "http://" + testing::MultiHostFixture::host(i) + "/";
    const CheckResponse r = enforcer.handle_check(raw);
    const Verdict pipeline = decide(probe_host(canonicalize(raw), options.probe));
    if (r.cached || r.verdict != pipeline) ++pipeline_mismatches;
  }
  std::ostringstream detail;
  detail << matrix_failures << "/" << matrix_cells << " matrix cells violate the upgrade rule; "
         << pipeline_mismatches << "/" << shapes.size() << " hosts differ from the pipeline";
  return {matrix_failures == 0 && pipeline_mismatches == 0, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"attack reproduction: naive scenario captures the credential (< 10 s)",
       [] { return scenario_criterion("naive"); }},
      {"defense reproduction: enforced scenario keeps the credential off the proxy (< 10 s)",
       [] { return scenario_criterion("enforced"); }},
      {"counter semantics: dual=2, http-only=1, none=0", counter_criterion},
      {"verdict truth table over 9 outcome pairs", truth_table_criterion},
      {"rewrite length law, idempotence, zero residue over 1000 bodies", rewrite_criterion},
      {"capture round-trip of 100 entries and scan agrees with oracle", capture_criterion},
      {"enforcer upgrade rule over verdict x scheme, cold cache equals pipeline on 20 hosts",
       enforcer_criterion},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.passed) ++failed;
    std::cout << (outcome.passed ? "[PASS] " : "[FAIL] ") << name << " -- " << outcome.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
