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

// Downgrade rewrites applied by the strip proxy to responses on their way
// to the victim, and the record of what was downgraded.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "striplab/http_message.hpp"

namespace striplab {

// (host, path) pairs whose https references were rewritten to http.
// Entries are only ever added. Safe for concurrent use: an insert is
// atomic, and a concurrent reader sees either the whole entry or nothing.
class TamperRecord {
 public:
  using Entry = std::pair<std::string, std::string>;

  // `host` is lowercased; an empty path is stored as "/".
  void add(std::string_view host, std::string_view path);
  bool contains(std::string_view host, std::string_view path) const;
  // Exact (host, path) entry, else the host-wide (host, "/") entry.
  bool should_upgrade(std::string_view host, std::string_view path) const;

  std::size_t size() const;
  std::vector<Entry> entries() const;  // sorted

  // One "host<TAB>path" line per entry, sorted. Throws LogWriteFailure.
  void write_dump(const std::filesystem::path& path) const;
  static std::vector<Entry> read_dump(const std::filesystem::path& path);

 private:
  mutable std::shared_mutex mutex_;
  std::set<Entry> entries_;
};

// Host (lowercase, port removed) and path of an absolute URL's remainder,
// i.e. the text following "scheme://". Nullopt when there is no host.
std::optional<TamperRecord::Entry> url_record_key(std::string_view after_scheme);

// For text/* content types every "https://" becomes "http://" and each
// rewritten URL is recorded. Other content types come back unchanged.
std::string rewrite_body(std::string_view body, std::string_view content_type,
                         TamperRecord& record);

// Location values starting with "https://" (scheme matched
// case-insensitively) are downgraded to "http://" and recorded.
Headers rewrite_location(Headers headers, TamperRecord& record);

// Drops the Secure attribute from one Set-Cookie value. Everything else,
// including spacing, is kept byte for byte.
std::string strip_secure_attribute(std::string_view set_cookie);

Headers rewrite_set_cookie(Headers headers);

}  // namespace striplab
