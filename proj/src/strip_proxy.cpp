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

#include "striplab/strip_proxy.hpp"

#include <algorithm>
#include <array>

namespace striplab {
namespace {

// Not forwarded upstream; the proxy sets its own framing and encoding.
constexpr std::array<std::string_view, 9> kDroppedRequestHeaders = {
    "Proxy-Connection", "Proxy-Authorization", "Connection",        "Keep-Alive",
    "TE",               "Transfer-Encoding",   "Upgrade",           "Accept-Encoding",
    "Content-Length"};

bool method_has_body(std::string_view method) {
  return method == "POST" || method == "PUT" || method == "PATCH";
}

std::string authority_of(const CanonicalUrl& url) {
  return url.has_default_port() ? url.host : url.host + ":" + std::to_string(url.port);
}

}  // namespace

HttpMessageView downgrade_response(HttpMessageView response, TamperRecord& record) {
  response.headers = rewrite_location(std::move(response.headers), record);
  response.headers = rewrite_set_cookie(std::move(response.headers));
  const std::string content_type = response.header("Content-Type").value_or("");
  response.body = rewrite_body(response.body, content_type, record);

  response.remove_header("Transfer-Encoding");
  response.remove_header("Keep-Alive");
  response.remove_header("Proxy-Connection");
  response.set_header("Content-Length", std::to_string(response.body.size()));
  response.set_header("Connection", "close");
  return response;
}

StripProxy::StripProxy(StripProxyOptions options)
    : options_(std::move(options)),
      capture_(options_.capture_log),
      tls_(options_.trust_root) {}

StripProxy::~StripProxy() { stop(); }

void StripProxy::start() {
  listener_ = std::make_unique<Listener>(options_.listen_address, options_.listen_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

std::uint16_t StripProxy::port() const { return listener_ ? listener_->port() : 0; }

void StripProxy::stop() {
  if (stopped_) return;
  stopped_ = true;
  stopping_ = true;
  if (listener_) listener_->close();
  if (acceptor_.joinable()) acceptor_.join();
  std::list<Worker> workers;
  {
    std::lock_guard lock(workers_mutex_);
    workers.swap(workers_);
  }
  for (auto& worker : workers) worker.thread.join();

  if (options_.record_dump) {
    try {
      record_.write_dump(*options_.record_dump);
    } catch (const LogWriteFailure& e) {
      std::lock_guard lock(failure_mutex_);
      dump_failure_ = e.what();
    }
  }
}

std::string StripProxy::failures() const {
  std::string out = capture_.failure();
  std::lock_guard lock(failure_mutex_);
  if (!dump_failure_.empty()) {
    if (!out.empty()) out += "; ";
    out += dump_failure_;
  }
  return out;
}

void StripProxy::reap_finished() {
  std::lock_guard lock(workers_mutex_);
  for (auto it = workers_.begin(); it != workers_.end();) {
    if (it->done->load()) {
      it->thread.join();
      it = workers_.erase(it);
    } else {
      ++it;
    }
  }
}

void StripProxy::accept_loop() {
  while (!stopping_.load()) {
    Socket client = listener_->accept(Millis{100});
    reap_finished();
    if (!client.valid()) continue;
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::lock_guard lock(workers_mutex_);
    workers_.push_back({std::thread([this, done, c = std::move(client)]() mutable {
                          serve(std::move(c));
                          done->store(true);
                        }),
                        done});
  }
}

void StripProxy::serve(Socket client) {
  client.set_io_timeout(options_.client_timeout);
  PlainStream stream(std::move(client));
  BufferedReader reader(stream);
  try {
    auto request = read_request(reader);
    if (!request) return;
    HttpMessageView response;
    if (parse_request_line(request->start_line).method == "CONNECT") {
      response = make_response(501, "Not Implemented", "CONNECT tunnels are not supported\n");
    } else {
      response = forward_request(*request);
    }
    stream.write_all(response.serialize());
  } catch (const HttpParseError& e) {
    try {
      stream.write_all(make_response(400, "Bad Request", std::string(e.what()) + "\n").serialize());
    } catch (const NetError&) {
    }
  } catch (const NetError&) {
    // Victim went away; nothing to report to it.
  }
}

HttpMessageView StripProxy::forward_request(const HttpMessageView& request) {
  const RequestLine line = parse_request_line(request.start_line);
  CanonicalUrl target;
  try {
    target = parse_request_target(request);
  } catch (const InvalidUrl& e) {
    return make_response(400, "Bad Request", std::string(e.what()) + "\n");
  }
  if (target.scheme == Scheme::kFtp) {
    return make_response(400, "Bad Request", "ftp is not proxied\n");
  }

  const bool secure = target.scheme == Scheme::kHttps ||
                      record_.should_upgrade(target.host, target.path);
  const CanonicalUrl upstream_url = secure ? to_https(target) : target;

  if (line.method == "POST" || options_.capture_all) {
    capture_.append({WallClock::now(), secure, target.host, line.method, request.body});
  }

  HttpMessageView upstream;
  upstream.start_line = line.method + " " + upstream_url.path_and_query() + " HTTP/1.1";
  for (const auto& header : request.headers) {
    const bool dropped =
        std::any_of(kDroppedRequestHeaders.begin(), kDroppedRequestHeaders.end(),
                    [&](std::string_view name) { return iequals(header.name, name); });
    if (!dropped) upstream.headers.push_back(header);
  }
  if (!upstream.header("Host")) upstream.headers.push_back({"Host", authority_of(target)});
  upstream.set_header("Accept-Encoding", "identity");
  upstream.set_header("Connection", "close");
  if (!request.body.empty() || method_has_body(line.method)) {
    upstream.set_header("Content-Length", std::to_string(request.body.size()));
  }
  upstream.body = request.body;

  try {
    HttpMessageView response =
        fetch_upstream(upstream, upstream_url, secure, line.method == "HEAD");
    return downgrade_response(std::move(response), record_);
  } catch (const TlsVerifyError& e) {
    return make_response(502, "Bad Gateway",
                         std::string("upstream certificate rejected: ") + e.what() + "\n");
  } catch (const Error& e) {
    return make_response(502, "Bad Gateway",
                         std::string("upstream unreachable: ") + e.what() + "\n");
  }
}

HttpMessageView StripProxy::fetch_upstream(const HttpMessageView& upstream_request,
                                           const CanonicalUrl& target, bool secure,
                                           bool head_request) {
  Socket socket = connect_tcp(target.host, options_.port_map.apply(target.port),
                              options_.upstream_timeout);
  socket.set_io_timeout(options_.upstream_timeout);
  std::unique_ptr<Stream> stream;
  if (secure) {
    stream = TlsStream::connect(std::move(socket), tls_, target.host);
  } else {
    stream = std::make_unique<PlainStream>(std::move(socket));
  }
  stream->write_all(upstream_request.serialize());
  BufferedReader reader(*stream);
  return read_response(reader, head_request);
}

}  // namespace striplab
