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

#include "striplab/url.hpp"

#include <algorithm>
#include <charconv>

namespace striplab {
namespace {

constexpr std::string_view kWhitespace = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kWhitespace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kWhitespace);
  return s.substr(first, last - first + 1);
}

char lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (iequals(name, "http")) return Scheme::kHttp;
  if (iequals(name, "https")) return Scheme::kHttps;
  if (iequals(name, "ftp")) return Scheme::kFtp;
  return std::nullopt;
}

bool is_forbidden_host_char(unsigned char c) {
  return c <= 0x20 || c == 0x7f || c == '\\' || c == '"' || c == '<' ||
         c == '>' || c == '^' || c == '`' || c == '{' || c == '|' ||
         c == '}' || c == '%';
}

std::uint16_t parse_port(std::string_view text, std::string_view raw) {
  if (text.empty() || text.size() > 5 ||
      !std::all_of(text.begin(), text.end(),
                   [](char c) { return c >= '0' && c <= '9'; })) {
    throw InvalidUrl("malformed port in '" + std::string(raw) + "'");
  }
  unsigned value = 0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  if (value == 0 || value > 65535) {
    throw InvalidUrl("port out of range in '" + std::string(raw) + "'");
  }
  return static_cast<std::uint16_t>(value);
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kHttp:
      return "http";
    case Scheme::kHttps:
      return "https";
    case Scheme::kFtp:
      return "ftp";
  }
  return "http";
}

std::uint16_t default_port(Scheme scheme) {
  switch (scheme) {
    case Scheme::kHttp:
      return 80;
    case Scheme::kHttps:
      return 443;
    case Scheme::kFtp:
      return 21;
  }
  return 80;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](char x, char y) { return lower(x) == lower(y); });
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

std::string CanonicalUrl::serialize() const {
  std::string out(scheme_name(scheme));
  out += "://";
  out += host;
  if (!has_default_port()) {
    out += ':';
    out += std::to_string(port);
  }
  out += path;
  if (query) {
    out += '?';
    out += *query;
  }
  return out;
}

CanonicalUrl canonicalize(std::string_view raw) {
  const std::string_view input = trim(raw);
  if (input.empty()) throw InvalidUrl("empty URL");

  CanonicalUrl url;
  std::string_view rest = input;
  if (const auto sep = rest.find("://"); sep != std::string_view::npos) {
    const auto scheme = parse_scheme(rest.substr(0, sep));
    if (!scheme) {
      throw InvalidUrl("unsupported scheme in '" + std::string(input) + "'");
    }
    url.scheme = *scheme;
    rest.remove_prefix(sep + 3);
  }

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    rest = rest.substr(0, hash);
  }

  const auto authority_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, authority_end);
  std::string_view tail =
      authority_end == std::string_view::npos ? std::string_view{}
                                              : rest.substr(authority_end);

  if (authority.find('@') != std::string_view::npos) {
    throw InvalidUrl("userinfo is not accepted in '" + std::string(input) + "'");
  }

  std::string_view host = authority;
  std::optional<std::string_view> port_text;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) {
      throw InvalidUrl("unterminated IPv6 literal in '" + std::string(input) + "'");
    }
    host = authority.substr(0, close + 1);
    const auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') {
        throw InvalidUrl("garbage after IPv6 literal in '" + std::string(input) + "'");
      }
      port_text = after.substr(1);
    }
  } else if (const auto colon = authority.rfind(':');
             colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port_text = authority.substr(colon + 1);
  }

  if (host.empty() || host == "[]") {
    throw InvalidUrl("empty host in '" + std::string(input) + "'");
  }
  if (std::any_of(host.begin(), host.end(), [](char c) {
        return is_forbidden_host_char(static_cast<unsigned char>(c));
      })) {
    throw InvalidUrl("invalid character in host of '" + std::string(input) + "'");
  }
  if (host.front() != '[' && host.find(':') != std::string_view::npos) {
    throw InvalidUrl("malformed port in '" + std::string(input) + "'");
  }

  url.host = ascii_lower(host);
  url.port = port_text ? parse_port(*port_text, input) : default_port(url.scheme);

  const auto qmark = tail.find('?');
  const std::string_view path = tail.substr(0, qmark);
  url.path = path.empty() ? "/" : std::string(path);
  if (qmark != std::string_view::npos) url.query = std::string(tail.substr(qmark + 1));
  return url;
}

CanonicalUrl to_https(const CanonicalUrl& url) {
  switch (url.scheme) {
    case Scheme::kHttps:
      return url;
    case Scheme::kFtp:
      throw NotUpgradeable("ftp URLs have no https upgrade: " + url.serialize());
    case Scheme::kHttp:
      break;
  }
  CanonicalUrl upgraded = url;
  upgraded.scheme = Scheme::kHttps;
  if (url.port == default_port(Scheme::kHttp)) {
    upgraded.port = default_port(Scheme::kHttps);
  }
  return upgraded;
}

}  // namespace striplab
