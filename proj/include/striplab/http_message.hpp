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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "striplab/net.hpp"
#include "striplab/url.hpp"

namespace striplab {

struct Header {
  std::string name;
  std::string value;

  bool operator==(const Header&) const = default;
};

// Ordered header list. Names compare case-insensitively; order and
// duplicates (Set-Cookie) are kept exactly as received.
using Headers = std::vector<Header>;

// Minimal parsed HTTP/1.x message: start line, ordered headers, body.
// The body is always de-chunked.
struct HttpMessageView {
  std::string start_line;
  Headers headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
  // Replaces the first occurrence in place and drops later ones; appends
  // when absent.
  void set_header(std::string_view name, std::string value);
  void remove_header(std::string_view name);

  // Start line, headers, blank line, body; exactly as stored.
  std::string serialize() const;
};

constexpr std::size_t kMaxBodyBytes = 64 * 1024 * 1024;

// Reads one request. Returns nullopt when the peer closed before sending a
// request line. Throws HttpParseError / NetError.
std::optional<HttpMessageView> read_request(BufferedReader& reader);

// Reads one response. `bodyless` marks replies to HEAD, whose framing
// headers describe a body that is never sent.
HttpMessageView read_response(BufferedReader& reader, bool bodyless = false);

struct StatusLine {
  std::string version;
  int code = 0;
  std::string reason;
};
StatusLine parse_status_line(std::string_view line);

struct RequestLine {
  std::string method;
  std::string target;
  std::string version;
};
RequestLine parse_request_line(std::string_view line);

// Where a proxied request is headed. Absolute-form targets carry it
// inline; origin-form targets are completed from the Host header. Throws
// InvalidUrl.
CanonicalUrl parse_request_target(const HttpMessageView& request);

HttpMessageView make_response(int code, std::string_view reason, std::string body,
                              std::string_view content_type = "text/plain");

}  // namespace striplab
