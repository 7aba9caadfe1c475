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

#include "striplab/http_message.hpp"

#include <algorithm>
#include <charconv>

namespace striplab {
namespace {

constexpr std::size_t kMaxHeaderCount = 256;

std::string_view trim_ows(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

Headers read_headers(BufferedReader& reader) {
  Headers headers;
  for (;;) {
    auto line = reader.read_line();
    if (!line) throw HttpParseError("connection closed inside header block");
    if (line->empty()) return headers;
    if (line->front() == ' ' || line->front() == '\t') {
      throw HttpParseError("obsolete header folding is not supported");
    }
    const auto colon = line->find(':');
    if (colon == std::string::npos || colon == 0) {
      throw HttpParseError("malformed header line: " + *line);
    }
    const std::string_view view(*line);
    const std::string_view name = view.substr(0, colon);
    if (name.find_first_of(" \t") != std::string_view::npos) {
      throw HttpParseError("whitespace in header name: " + std::string(name));
    }
    headers.push_back({std::string(name), std::string(trim_ows(view.substr(colon + 1)))});
    if (headers.size() > kMaxHeaderCount) throw HttpParseError("too many headers");
  }
}

std::size_t parse_size(std::string_view text, int base) {
  text = trim_ows(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw HttpParseError("bad length: '" + std::string(text) + "'");
  }
  return value;
}

std::string read_chunked(BufferedReader& reader) {
  std::string body;
  for (;;) {
    auto line = reader.read_line();
    if (!line) throw HttpParseError("connection closed inside chunked body");
    std::string_view size_text(*line);
    if (const auto semi = size_text.find(';'); semi != std::string_view::npos) {
      size_text = size_text.substr(0, semi);
    }
    const std::size_t size = parse_size(size_text, 16);
    if (size == 0) break;
    if (body.size() + size > kMaxBodyBytes) throw HttpParseError("chunked body too large");
    body += reader.read_exact(size);
    auto crlf = reader.read_line();
    if (!crlf || !crlf->empty()) throw HttpParseError("missing CRLF after chunk");
  }
  // Trailer section; discarded.
  for (;;) {
    auto line = reader.read_line();
    if (!line || line->empty()) break;
  }
  return body;
}

bool is_chunked(const HttpMessageView& message) {
  const auto te = message.header("Transfer-Encoding");
  if (!te) return false;
  const std::string lowered = ascii_lower(*te);
  return lowered.find("chunked") != std::string::npos;
}

}  // namespace

std::optional<std::string> HttpMessageView::header(std::string_view name) const {
  for (const auto& h : headers) {
    if (iequals(h.name, name)) return h.value;
  }
  return std::nullopt;
}

void HttpMessageView::set_header(std::string_view name, std::string value) {
  auto it = std::find_if(headers.begin(), headers.end(),
                         [&](const Header& h) { return iequals(h.name, name); });
  if (it == headers.end()) {
    headers.push_back({std::string(name), std::move(value)});
    return;
  }
  it->value = std::move(value);
  headers.erase(std::remove_if(std::next(it), headers.end(),
                               [&](const Header& h) { return iequals(h.name, name); }),
                headers.end());
}

void HttpMessageView::remove_header(std::string_view name) {
  headers.erase(std::remove_if(headers.begin(), headers.end(),
                               [&](const Header& h) { return iequals(h.name, name); }),
                headers.end());
}

std::string HttpMessageView::serialize() const {
  std::string out = start_line;
  out += "\r\n";
  for (const auto& h : headers) {
    out += h.name;
    out += ": ";
    out += h.value;
    out += "\r\n";
  }
  out += "\r\n";
  out += body;
  return out;
}

std::optional<HttpMessageView> read_request(BufferedReader& reader) {
  auto line = reader.read_line();
  // Tolerate stray CRLF between pipelined requests.
  while (line && line->empty()) line = reader.read_line();
  if (!line) return std::nullopt;

  HttpMessageView request;
  request.start_line = std::move(*line);
  parse_request_line(request.start_line);
  request.headers = read_headers(reader);

  if (is_chunked(request)) {
    request.body = read_chunked(reader);
  } else if (const auto length = request.header("Content-Length")) {
    const std::size_t size = parse_size(*length, 10);
    if (size > kMaxBodyBytes) throw HttpParseError("request body too large");
    request.body = reader.read_exact(size);
  }
  return request;
}

HttpMessageView read_response(BufferedReader& reader, bool bodyless) {
  auto line = reader.read_line();
  if (!line) throw HttpParseError("connection closed before status line");
  HttpMessageView response;
  response.start_line = std::move(*line);
  const StatusLine status = parse_status_line(response.start_line);
  response.headers = read_headers(reader);

  const bool no_body = bodyless || (status.code >= 100 && status.code < 200) ||
                       status.code == 204 || status.code == 304;
  if (no_body) return response;
  if (is_chunked(response)) {
    response.body = read_chunked(reader);
  } else if (const auto length = response.header("Content-Length")) {
    const std::size_t size = parse_size(*length, 10);
    if (size > kMaxBodyBytes) throw HttpParseError("response body too large");
    response.body = reader.read_exact(size);
  } else {
    response.body = reader.read_to_eof(kMaxBodyBytes);
  }
  return response;
}

StatusLine parse_status_line(std::string_view line) {
  // HTTP/1.1 200 OK
  const auto sp1 = line.find(' ');
  if (sp1 == std::string_view::npos || !line.starts_with("HTTP/")) {
    throw HttpParseError("malformed status line: " + std::string(line));
  }
  StatusLine status;
  status.version = std::string(line.substr(0, sp1));
  const auto rest = line.substr(sp1 + 1);
  const auto sp2 = rest.find(' ');
  const auto code_text = rest.substr(0, sp2);
  int code = 0;
  const auto [ptr, ec] =
      std::from_chars(code_text.data(), code_text.data() + code_text.size(), code);
  if (code_text.size() != 3 || ec != std::errc{} || ptr != code_text.data() + 3) {
    throw HttpParseError("malformed status code: " + std::string(line));
  }
  status.code = code;
  if (sp2 != std::string_view::npos) status.reason = std::string(rest.substr(sp2 + 1));
  return status;
}

RequestLine parse_request_line(std::string_view line) {
  const auto sp1 = line.find(' ');
  const auto sp2 = line.rfind(' ');
  if (sp1 == std::string_view::npos || sp2 == sp1) {
    throw HttpParseError("malformed request line: " + std::string(line));
  }
  RequestLine request;
  request.method = std::string(line.substr(0, sp1));
  request.target = std::string(line.substr(sp1 + 1, sp2 - sp1 - 1));
  request.version = std::string(line.substr(sp2 + 1));
  if (request.method.empty() || request.target.empty() ||
      !request.version.starts_with("HTTP/")) {
    throw HttpParseError("malformed request line: " + std::string(line));
  }
  return request;
}

CanonicalUrl parse_request_target(const HttpMessageView& request) {
  const RequestLine line = parse_request_line(request.start_line);
  if (line.target.front() == '/') {
    const auto host = request.header("Host");
    if (!host || host->empty()) throw InvalidUrl("origin-form request without Host");
    return canonicalize("http://" + *host + line.target);
  }
  if (line.target.find("://") == std::string::npos) {
    throw InvalidUrl("unsupported request target: " + line.target);
  }
  return canonicalize(line.target);
}

HttpMessageView make_response(int code, std::string_view reason, std::string body,
                              std::string_view content_type) {
  HttpMessageView response;
  response.start_line = "HTTP/1.1 " + std::to_string(code) + " " + std::string(reason);
  response.headers.push_back({"Content-Type", std::string(content_type)});
  response.headers.push_back({"Content-Length", std::to_string(body.size())});
  response.headers.push_back({"Connection", "close"});
  response.body = std::move(body);
  return response;
}

}  // namespace striplab
