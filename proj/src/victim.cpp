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

#include "striplab/harness.hpp"
#include "striplab/http_message.hpp"

namespace striplab::harness {
namespace {

constexpr std::string_view kUserAgent = "striplab-victim/1.0";

struct Route {
  bool via_proxy = false;
  bool tls = false;
};

// A browser behind an explicit proxy tunnels https end to end, so only
// plaintext URLs are routed through the proxy.
Route route_for(const CanonicalUrl& url, const VictimConfig& config) {
  if (url.scheme == Scheme::kHttps) return {false, true};
  return {config.proxy.has_value(), false};
}

std::string authority(const CanonicalUrl& url) {
  return url.has_default_port() ? url.host : url.host + ":" + std::to_string(url.port);
}

TranscriptStep exchange(const std::string& method, const CanonicalUrl& url, std::string body,
                        std::string_view content_type, const VictimConfig& config,
                        const TlsClientContext& tls_context) {
  const Route route = route_for(url, config);
  TranscriptStep step;
  step.method = method;
  step.url = url.serialize();
  step.via_proxy = route.via_proxy;
  step.tls = route.tls;

  HttpMessageView request;
  request.start_line =
      method + " " + (route.via_proxy ? url.serialize() : url.path_and_query()) + " HTTP/1.1";
  request.headers.push_back({"Host", authority(url)});
  request.headers.push_back({"User-Agent", std::string(kUserAgent)});
  request.headers.push_back({"Accept", "*/*"});
  request.headers.push_back({"Connection", "close"});
  if (method == "POST") {
    request.headers.push_back({"Content-Type", std::string(content_type)});
    request.headers.push_back({"Content-Length", std::to_string(body.size())});
  }
  request.body = std::move(body);

  try {
    Socket socket =
        route.via_proxy
            ? connect_tcp(config.proxy->host, config.proxy->port, config.timeout)
            : connect_tcp(url.host, config.port_map.apply(url.port), config.timeout);
    socket.set_io_timeout(config.timeout);
    std::unique_ptr<Stream> stream;
    if (route.tls) {
      stream = TlsStream::connect(std::move(socket), tls_context, url.host);
    } else {
      stream = std::make_unique<PlainStream>(std::move(socket));
    }
    stream->write_all(request.serialize());
    BufferedReader reader(*stream);
    HttpMessageView response = read_response(reader);
    step.status = parse_status_line(response.start_line).code;
    step.location = response.header("Location");
    step.body = std::move(response.body);
  } catch (const Error& e) {
    throw NavigationFailure(method + " " + url.serialize() + " failed: " + e.what());
  }
  return step;
}

CanonicalUrl resolve_reference(std::string_view reference, const CanonicalUrl& base) {
  if (reference.find("://") != std::string_view::npos) return canonicalize(reference);
  if (reference.empty() || reference.front() != '/') {
    throw NavigationFailure("unsupported relative reference: " + std::string(reference));
  }
  CanonicalUrl resolved = base;
  const auto q = reference.find('?');
  resolved.path = std::string(reference.substr(0, q));
  resolved.query.reset();
  if (q != std::string_view::npos) resolved.query = std::string(reference.substr(q + 1));
  return resolved;
}

CheckResult query_enforcer(const Endpoint& enforcer, const CanonicalUrl& url, Millis timeout) {
  HttpMessageView request;
  request.start_line = "GET /check?url=" + percent_encode(url.serialize()) + " HTTP/1.1";
  request.headers.push_back({"Host", enforcer.host + ":" + std::to_string(enforcer.port)});
  request.headers.push_back({"Connection", "close"});
  try {
    Socket socket = connect_tcp(enforcer.host, enforcer.port, timeout);
    socket.set_io_timeout(timeout);
    PlainStream stream(std::move(socket));
    stream.write_all(request.serialize());
    BufferedReader reader(stream);
    const HttpMessageView response = read_response(reader);
    const int status = parse_status_line(response.start_line).code;
    if (status != 200) {
      throw NavigationFailure("enforcer replied " + std::to_string(status) + ": " + response.body);
    }
    const auto json = nlohmann::json::parse(response.body);
    CheckResult result;
    result.verdict = json.at("verdict").get<std::string>();
    result.counter = json.at("counter").get<int>();
    if (!json.at("upgrade_url").is_null()) {
      result.upgrade_url = json.at("upgrade_url").get<std::string>();
    }
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw NavigationFailure(std::string("enforcer reply is not valid JSON: ") + e.what());
  } catch (const NavigationFailure&) {
    throw;
  } catch (const Error& e) {
    throw NavigationFailure(std::string("enforcer check failed: ") + e.what());
  }
}

}  // namespace

nlohmann::json VictimTranscript::to_json() const {
  nlohmann::json j;
  j["steps"] = nlohmann::json::array();
  for (const auto& step : steps) {
    j["steps"].push_back({{"method", step.method},
                          {"url", step.url},
                          {"via_proxy", step.via_proxy},
                          {"tls", step.tls},
                          {"status", step.status},
                          {"location", step.location ? nlohmann::json(*step.location)
                                                     : nlohmann::json(nullptr)}});
  }
  j["form_action"] = form_action;
  if (check) {
    j["check"] = {{"verdict", check->verdict},
                  {"counter", check->counter},
                  {"upgrade_url", check->upgrade_url ? nlohmann::json(*check->upgrade_url)
                                                     : nlohmann::json(nullptr)}};
  } else {
    j["check"] = nullptr;
  }
  j["submit_url"] = submit_url;
  j["submitted_over_tls"] = submitted_over_tls;
  j["submitted_via_proxy"] = submitted_via_proxy;
  j["submit_status"] = submit_status;
  return j;
}

std::optional<std::string> extract_form_action(std::string_view html) {
  constexpr std::string_view kAttr = "action=\"";
  const auto start = html.find(kAttr);
  if (start == std::string_view::npos) return std::nullopt;
  const auto value_start = start + kAttr.size();
  const auto end = html.find('"', value_start);
  if (end == std::string_view::npos) return std::nullopt;
  return std::string(html.substr(value_start, end - value_start));
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (const char c : text) {
    const auto u = static_cast<unsigned char>(c);
    if ((u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') || u == '-' ||
        u == '.' || u == '_' || u == '~') {
      out += c;
    } else {
      out += '%';
      out += kHex[u >> 4];
      out += kHex[u & 0x0f];
    }
  }
  return out;
}

VictimTranscript run_victim(const VictimConfig& config) {
  const TlsClientContext tls_context(config.trust_root);
  VictimTranscript transcript;

  CanonicalUrl page_url = canonicalize(config.start_address);
  transcript.steps.push_back(exchange("GET", page_url, {}, {}, config, tls_context));
  if (const auto& first = transcript.steps.back();
      first.status >= 300 && first.status < 400) {
    if (!first.location) throw NavigationFailure("redirect without Location");
    page_url = resolve_reference(*first.location, page_url);
    transcript.steps.push_back(exchange("GET", page_url, {}, {}, config, tls_context));
  }
  const TranscriptStep& page = transcript.steps.back();
  if (page.status != 200) {
    throw NavigationFailure("login page fetch returned " + std::to_string(page.status));
  }

  const auto action = extract_form_action(page.body);
  if (!action) throw NavigationFailure("no form action in " + page.url);
  transcript.form_action = *action;
  CanonicalUrl submit = resolve_reference(*action, page_url);

  if (config.enforcer) {
    transcript.check = query_enforcer(*config.enforcer, submit, config.timeout);
    if (transcript.check->verdict == "https_available" && transcript.check->upgrade_url) {
      submit = canonicalize(*transcript.check->upgrade_url);
    }
  }

  const std::string form = "Email=" + percent_encode(config.user) +
                           "&Passwd=" + percent_encode(config.credential);
  transcript.steps.push_back(exchange("POST", submit, form, "application/x-www-form-urlencoded",
                                      config, tls_context));
  const TranscriptStep& post = transcript.steps.back();
  transcript.submit_url = post.url;
  transcript.submitted_over_tls = post.tls;
  transcript.submitted_via_proxy = post.via_proxy;
  transcript.submit_status = post.status;
  if (post.status != 200) {
    throw NavigationFailure("form submission returned " + std::to_string(post.status));
  }
  return transcript;
}

}  // namespace striplab::harness
