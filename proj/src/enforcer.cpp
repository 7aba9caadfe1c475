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

#include "striplab/enforcer.hpp"

#include <httplib.h>

namespace striplab {
namespace {

ProbeReport unresolved_report(const std::string& host) {
  ProbeReport report;
  report.host = host;
  report.probe80 = {80, ProbeOutcome::kClosed, Millis{0}};
  report.probe443 = {443, ProbeOutcome::kClosed, Millis{0}};
  report.counter = 0;
  return report;
}

}  // namespace

nlohmann::json to_json(const CheckResponse& response) {
  nlohmann::json j;
  j["verdict"] = verdict_name(response.verdict);
  j["upgrade_url"] = response.upgrade_url ? nlohmann::json(response.upgrade_url->serialize())
                                          : nlohmann::json(nullptr);
  j["counter"] = response.report.counter;
  j["port80"] = outcome_name(response.report.probe80.outcome);
  j["port443"] = outcome_name(response.report.probe443.outcome);
  j["cached"] = response.cached;
  j["latency80_ms"] = response.report.probe80.latency.count();
  j["latency443_ms"] = response.report.probe443.latency.count();
  return j;
}

CheckResponse make_check_response(const CanonicalUrl& query, const ProbeReport& report,
                                  bool cached) {
  CheckResponse response;
  response.verdict = decide(report);
  response.report = report;
  response.cached = cached;
  if (response.verdict == Verdict::kHttpsAvailable && query.scheme == Scheme::kHttp) {
    response.upgrade_url = to_https(query);
  }
  return response;
}

Enforcer::Enforcer(Options options)
    : Enforcer([probe = options.probe](const CanonicalUrl& url) { return probe_host(url, probe); },
               options.cache_ttl) {}

Enforcer::Enforcer(ProbeFn probe, std::chrono::seconds cache_ttl, NowFn now)
    : probe_(std::move(probe)), ttl_(cache_ttl), now_(std::move(now)) {}

std::optional<ProbeReport> Enforcer::cache_lookup(const std::string& host) const {
  std::lock_guard lock(mutex_);
  const auto it = cache_.find(host);
  if (it == cache_.end()) return std::nullopt;
  if (now_() - it->second.stored >= ttl_) return std::nullopt;
  return it->second.report;
}

CheckResponse Enforcer::handle_check(std::string_view raw_url) {
  const CanonicalUrl query = canonicalize(raw_url);
  if (auto cached = cache_lookup(query.host)) {
    return make_check_response(query, *cached, /*cached=*/true);
  }

  ProbeReport report;
  try {
    report = probe_(query);
  } catch (const ResolutionFailure&) {
    report = unresolved_report(query.host);
  }
  {
    // Concurrent probes of one host may race here; the later one wins.
    std::lock_guard lock(mutex_);
    cache_[query.host] = {report, now_()};
  }
  return make_check_response(query, report, /*cached=*/false);
}

EnforcerServer::EnforcerServer(Enforcer& enforcer)
    : enforcer_(enforcer), server_(std::make_unique<httplib::Server>()) {
  server_->Get("/check", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (!req.has_param("url")) {
      res.status = 400;
      body["error"] = "invalid_url";
    } else {
      try {
        body = to_json(enforcer_.handle_check(req.get_param_value("url")));
        res.status = 200;
      } catch (const InvalidUrl&) {
        res.status = 400;
        body = nlohmann::json::object();
        body["error"] = "invalid_url";
      }
    }
    res.set_content(body.dump(), "application/json");
  });
}

EnforcerServer::~EnforcerServer() { stop(); }

void EnforcerServer::bind(const std::string& address, std::uint16_t port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(address);
    if (bound <= 0) throw BindFailure("cannot bind enforcer on " + address);
    port_ = static_cast<std::uint16_t>(bound);
  } else {
    if (!server_->bind_to_port(address, port)) {
      throw BindFailure("cannot bind enforcer on " + address + ":" + std::to_string(port));
    }
    port_ = port;
  }
}

void EnforcerServer::start(const std::string& address, std::uint16_t port) {
  bind(address, port);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void EnforcerServer::run(const std::string& address, std::uint16_t port) {
  bind(address, port);
  server_->listen_after_bind();
}

void EnforcerServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace striplab
