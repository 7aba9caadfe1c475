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


#include <gtest/gtest.h>
#include <httplib.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "striplab/harness.hpp"
#include "support/fixtures.hpp"

namespace striplab::harness {
namespace {

std::string run_command(const std::string& command) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(command.c_str(), "r"), pclose);
  if (!pipe) return out;
  std::array<char, 512> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe.get()) != nullptr) out += buf.data();
  return out;
}

TEST(Certificate, InspectionToolShowsHostName) {
  testing::TempDir dir;
  const TestCertificate cert = generate_test_certificate("localhost", dir.path());
  const std::string text =
      run_command("openssl x509 -noout -text -in '" + cert.leaf_cert.string() + "' 2>&1");
  EXPECT_NE(text.find("DNS:localhost"), std::string::npos) << text;
  const std::string verify = run_command("openssl verify -CAfile '" + cert.trust_root.string() +
                                         "' '" + cert.leaf_cert.string() + "' 2>&1");
  EXPECT_NE(verify.find(": OK"), std::string::npos) << verify;
}

TEST(Certificate, IpLiteralGetsIpSan) {
  testing::TempDir dir;
  const TestCertificate cert = generate_test_certificate("127.0.0.1", dir.path());
  const std::string text =
      run_command("openssl x509 -noout -text -in '" + cert.leaf_cert.string() + "' 2>&1");
  EXPECT_NE(text.find("IP Address:127.0.0.1"), std::string::npos) << text;
}

class OriginTest : public ::testing::Test {
 protected:
  testing::TempDir dir_;
};

TEST_F(OriginTest, DualModeRedirectsAndServesSecureForm) {
  const TestCertificate cert = generate_test_certificate("localhost", dir_.path());
  Origin origin(OriginMode::kDual, cert);
  origin.start();

  httplib::Client plain("127.0.0.1", origin.http_port());
  auto res = plain.Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 301);
  EXPECT_TRUE(res->get_header_value("Location").starts_with("https://"));

  httplib::SSLClient tls("localhost", origin.https_port());
  tls.set_ca_cert_path(cert.trust_root.string());
  tls.enable_server_certificate_verification(true);
  res = tls.Get("/login");
  ASSERT_TRUE(res) << httplib::to_string(res.error());
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(extract_form_action(res->body), "https://localhost/submit");

  res = tls.Post("/submit", "Email=a&Passwd=b", "application/x-www-form-urlencoded");
  ASSERT_TRUE(res);
  EXPECT_NE(res->get_header_value("Set-Cookie").find("Secure"), std::string::npos);
  const auto posts = origin.received_posts();
  ASSERT_EQ(posts.size(), 1u);
  EXPECT_TRUE(posts[0].tls);
}

TEST_F(OriginTest, HttpOnlyModeRefusesTls) {
  Origin origin(OriginMode::kHttpOnly, std::nullopt);
  origin.start();
  EXPECT_EQ(origin.https_port(), 0);
  const std::uint16_t mapped443 = origin.port_map().apply(443);
  EXPECT_EQ(probe_port("127.0.0.1", mapped443, Millis{500}).outcome, ProbeOutcome::kClosed);

  httplib::Client plain("127.0.0.1", origin.http_port());
  auto res = plain.Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(extract_form_action(res->body), "http://localhost/submit");
}

TEST(FormAction, FirstActionAttribute) {
  EXPECT_EQ(extract_form_action(R"(<form method="post" action="https://a/x"><form action="b">)"),
            "https://a/x");
  EXPECT_EQ(extract_form_action("<form action=\"/rel\">"), "/rel");
  EXPECT_EQ(extract_form_action("<p>no form</p>"), std::nullopt);
}

TEST(PercentEncode, ReservedCharacters) {
  EXPECT_EQ(percent_encode("a b&c=d/e?"), "a%20b%26c%3Dd%2Fe%3F");
  EXPECT_EQ(percent_encode("AZaz09-._~"), "AZaz09-._~");
}

TEST_F(OriginTest, VictimWithoutProxySeesSecureAction) {
  const TestCertificate cert = generate_test_certificate("localhost", dir_.path());
  Origin origin(OriginMode::kDual, cert);
  origin.start();
  VictimConfig config;
  config.port_map = origin.port_map();
  config.trust_root = cert.trust_root;
  config.credential = make_credential_marker();
  const VictimTranscript t = run_victim(config);
  EXPECT_TRUE(t.form_action.starts_with("https://"));
  EXPECT_TRUE(t.submitted_over_tls);
  EXPECT_EQ(t.submit_status, 200);
}

TEST_F(OriginTest, VictimWithoutTrustRootFailsTls) {
  const TestCertificate cert = generate_test_certificate("localhost", dir_.path());
  Origin origin(OriginMode::kDual, cert);
  origin.start();
  VictimConfig config;
  config.port_map = origin.port_map();
  config.credential = make_credential_marker();
  EXPECT_THROW(run_victim(config), NavigationFailure);
  EXPECT_TRUE(origin.received_posts().empty());
}

TEST(CredentialMarker, RandomAndLongEnough) {
  const std::string a = make_credential_marker();
  const std::string b = make_credential_marker();
  EXPECT_GE(a.size(), 16u);
  EXPECT_NE(a, b);
  EXPECT_GE(make_credential_marker(4).size(), 16u);
}

const Assertion* find_assertion(const ScenarioReport& r, std::string_view text) {
  for (const auto& a : r.assertions) {
    if (a.description.find(text) != std::string::npos) return &a;
  }
  return nullptr;
}

TEST(Scenario, NaiveCapturesTheCredential) {
  const ScenarioReport r = run_scenario(make_scenario("naive"));
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_LT(r.wall_time, std::chrono::seconds(10));
  ASSERT_TRUE(find_assertion(r, "marker found"));
  EXPECT_TRUE(std::filesystem::exists(r.run_dir / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(r.run_dir / "summary.txt"));
  for (const auto& step : r.transcript.steps) {
    if (step.via_proxy) EXPECT_EQ(step.body.find("https://"), std::string::npos) << step.url;
  }
  std::filesystem::remove_all(r.run_dir);
}

TEST(Scenario, EnforcedKeepsTheCredentialOffTheProxy) {
  const ScenarioReport r = run_scenario(make_scenario("enforced"));
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_LT(r.wall_time, std::chrono::seconds(10));
  ASSERT_TRUE(find_assertion(r, "marker absent"));
  EXPECT_EQ(r.verdict, "https_available");
  EXPECT_TRUE(r.transcript.submitted_over_tls);
  std::filesystem::remove_all(r.run_dir);
}

TEST(Scenario, HttpOnlyProceedsOverPlaintext) {
  const ScenarioReport r = run_scenario(make_scenario("http-only"));
  EXPECT_TRUE(r.passed()) << r.summary();
  EXPECT_EQ(r.verdict, "http_only");
  EXPECT_FALSE(r.transcript.submitted_over_tls);
  std::filesystem::remove_all(r.run_dir);
}

TEST(Scenario, RepeatedRunsAreIndependent) {
  const ScenarioReport a = run_scenario(make_scenario("naive"));
  const ScenarioReport b = run_scenario(make_scenario("naive"));
  EXPECT_TRUE(a.passed());
  EXPECT_TRUE(b.passed());
  EXPECT_NE(a.run_dir, b.run_dir);
  std::filesystem::remove_all(a.run_dir);
  std::filesystem::remove_all(b.run_dir);
}

TEST(Scenario, DuplicatePortsAreRejected) {
  ScenarioConfig config = make_scenario("naive");
  config.ports = {40001, 40001, 0, 0};
  const ScenarioReport r = run_scenario(config);
  EXPECT_FALSE(r.passed());
  EXPECT_NE(r.error.find("distinct"), std::string::npos);
}

TEST(Scenario, UnknownNameIsRejected) {
  EXPECT_THROW(make_scenario("bogus"), std::invalid_argument);
}

}  // namespace
}  // namespace striplab::harness
