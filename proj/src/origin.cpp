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

#include <httplib.h>

#include <random>

#include "striplab/harness.hpp"

namespace striplab::harness {
namespace {

constexpr const char* kHtml = "text/html; charset=utf-8";

std::string site_url(Scheme scheme, std::string_view path) {
  return std::string(scheme_name(scheme)) + "://" + std::string(kOriginHost) + std::string(path);
}

std::string session_id() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  return std::to_string(rng());
}

std::uint16_t bind_server(httplib::Server& server, std::uint16_t port) {
  const std::string address(kLoopback);
  if (port == 0) {
    const int bound = server.bind_to_any_port(address);
    if (bound <= 0) throw BindFailure("origin cannot bind " + address);
    return static_cast<std::uint16_t>(bound);
  }
  if (!server.bind_to_port(address, port)) {
    throw BindFailure("origin cannot bind " + address + ":" + std::to_string(port));
  }
  return port;
}

}  // namespace

std::string_view origin_mode_name(OriginMode mode) {
  return mode == OriginMode::kDual ? "dual" : "http_only";
}

std::string login_page(std::string_view action_url) {
  const auto scheme_end = action_url.find("://");
  const std::string help =
      std::string(action_url.substr(0, scheme_end)) + "://" + std::string(kOriginHost) + "/help";
  std::string page;
  page += "<!doctype html>\n<html><head><title>Sign in</title></head><body>\n";
  page += "<h1>Sign in</h1>\n";
  page += "<form method=\"post\" action=\"" + std::string(action_url) + "\">\n";
  page += "  <input name=\"Email\" type=\"text\">\n";
  page += "  <input name=\"Passwd\" type=\"password\">\n";
  page += "  <input type=\"submit\" value=\"Sign in\">\n";
  page += "</form>\n";
  page += "<p><a href=\"" + help + "\">Need help?</a></p>\n";
  page += "</body></html>\n";
  return page;
}

std::uint16_t unused_loopback_port() {
  Listener probe(std::string(kLoopback), 0);
  return probe.port();
}

Origin::Origin(OriginMode mode, std::optional<TestCertificate> certificate)
    : mode_(mode), certificate_(std::move(certificate)) {
  if (mode_ == OriginMode::kDual && !certificate_) {
    throw std::invalid_argument("dual-mode origin needs a certificate");
  }
}

Origin::~Origin() { stop(); }

void Origin::install_routes(httplib::Server& server, bool tls) {
  if (mode_ == OriginMode::kDual && !tls) {
    const auto redirect = [](const httplib::Request&, httplib::Response& res) {
      res.status = 301;
      res.set_header("Location", site_url(Scheme::kHttps, "/"));
      res.set_content("Moved to the secure site\n", "text/plain");
    };
    server.Get(".*", redirect);
    server.Post(".*", redirect);
    return;
  }

  const Scheme scheme = tls ? Scheme::kHttps : Scheme::kHttp;
  const auto form = [scheme](const httplib::Request&, httplib::Response& res) {
    res.set_content(login_page(site_url(scheme, "/submit")), kHtml);
  };
  server.Get("/", form);
  server.Get("/login", form);
  server.Get("/help", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("Ask your administrator.\n", "text/plain");
  });
  server.Post("/submit", [this, tls](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mutex_);
      posts_.push_back({tls, req.path, req.body});
    }
    std::string cookie = "sid=" + session_id() + "; Path=/; HttpOnly";
    if (tls) cookie += "; Secure";
    res.set_header("Set-Cookie", cookie);
    res.set_content("<!doctype html>\n<html><body>Welcome back.</body></html>\n", kHtml);
  });
}

void Origin::start(std::uint16_t http_port, std::uint16_t https_port) {
  http_ = std::make_unique<httplib::Server>();
  install_routes(*http_, false);
  http_port_ = bind_server(*http_, http_port);
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();

  if (mode_ == OriginMode::kDual) {
    https_ = std::make_unique<httplib::SSLServer>(certificate_->leaf_cert.c_str(),
                                                  certificate_->leaf_key.c_str());
    if (!https_->is_valid()) throw BindFailure("origin TLS setup failed");
    install_routes(*https_, true);
    https_port_ = bind_server(*https_, https_port);
    https_thread_ = std::thread([this] { https_->listen_after_bind(); });
    https_->wait_until_ready();
  } else {
    closed_port_ = https_port != 0 ? https_port : unused_loopback_port();
  }
}

void Origin::stop() {
  if (http_) http_->stop();
  if (https_) https_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  if (https_thread_.joinable()) https_thread_.join();
}

PortMap Origin::port_map() const {
  PortMap map;
  map.set(80, http_port_);
  map.set(443, https_port_ != 0 ? https_port_ : closed_port_);
  return map;
}

std::vector<ReceivedPost> Origin::received_posts() const {
  std::lock_guard lock(mutex_);
  return posts_;
}

}  // namespace striplab::harness
