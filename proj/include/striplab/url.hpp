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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "striplab/error.hpp"

namespace striplab {

enum class Scheme { kHttp, kHttps, kFtp };

std::string_view scheme_name(Scheme scheme);
std::uint16_t default_port(Scheme scheme);

// Normalized absolute URL as typed into an address bar.
//
// The host is always lowercase (ASCII only; non-ASCII bytes are kept
// verbatim) and never empty. When the input carried no port, `port` is the
// scheme default. `path` always begins with '/'. Fragments are dropped.
struct CanonicalUrl {
  Scheme scheme = Scheme::kHttp;
  std::string host;
  std::uint16_t port = 80;
  std::string path = "/";
  std::optional<std::string> query;

  bool has_default_port() const { return port == default_port(scheme); }
  std::string path_and_query() const { return query ? path + "?" + *query : path; }

  // scheme://host[:port]path[?query]; the port is omitted when it is the
  // scheme default, so canonicalize(serialize()) round-trips.
  std::string serialize() const;

  bool operator==(const CanonicalUrl&) const = default;
};

// Parses raw address-bar input. A missing scheme means http. Userinfo,
// unsupported schemes, empty hosts, and ports outside 1-65535 throw
// InvalidUrl.
CanonicalUrl canonicalize(std::string_view raw);

// http -> https on the same host, path and query. The http default port 80
// becomes 443; any explicit port is kept. https input is returned as is.
// Throws NotUpgradeable for ftp.
CanonicalUrl to_https(const CanonicalUrl& url);

std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

}  // namespace striplab
