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

#include "striplab/rewrite.hpp"

#include <fstream>
#include <mutex>

namespace striplab {
namespace {

constexpr std::string_view kSecureToken = "https://";
constexpr std::string_view kPlainToken = "http://";

// Bytes that end a URL embedded in markup or text.
bool ends_url(unsigned char c) {
  switch (c) {
    case '"':
    case '\'':
    case '<':
    case '>':
    case '`':
    case '(':
    case ')':
    case '\\':
    case '{':
    case '}':
    case '|':
    case '^':
      return true;
    default:
      return c <= 0x20 || c == 0x7f;
  }
}

bool is_text_content(std::string_view content_type) {
  while (!content_type.empty() && (content_type.front() == ' ' || content_type.front() == '\t')) {
    content_type.remove_prefix(1);
  }
  return istarts_with(content_type, "text/");
}

}  // namespace

void TamperRecord::add(std::string_view host, std::string_view path) {
  Entry entry{ascii_lower(host), path.empty() ? std::string("/") : std::string(path)};
  std::unique_lock lock(mutex_);
  entries_.insert(std::move(entry));
}

bool TamperRecord::contains(std::string_view host, std::string_view path) const {
  const Entry key{ascii_lower(host), path.empty() ? std::string("/") : std::string(path)};
  std::shared_lock lock(mutex_);
  return entries_.count(key) > 0;
}

bool TamperRecord::should_upgrade(std::string_view host, std::string_view path) const {
  const std::string lowered = ascii_lower(host);
  std::shared_lock lock(mutex_);
  return entries_.count({lowered, path.empty() ? std::string("/") : std::string(path)}) > 0 ||
         entries_.count({lowered, "/"}) > 0;
}

std::size_t TamperRecord::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::vector<TamperRecord::Entry> TamperRecord::entries() const {
  std::shared_lock lock(mutex_);
  return {entries_.begin(), entries_.end()};
}

void TamperRecord::write_dump(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LogWriteFailure("cannot open record dump " + path.string());
  for (const auto& [host, p] : entries()) out << host << '\t' << p << '\n';
  out.flush();
  if (!out) throw LogWriteFailure("cannot write record dump " + path.string());
}

std::vector<TamperRecord::Entry> TamperRecord::read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedLog("cannot open record dump " + path.string());
  std::vector<Entry> entries;
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw MalformedLog("record dump line without TAB: " + line);
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return entries;
}

std::optional<TamperRecord::Entry> url_record_key(std::string_view after_scheme) {
  std::size_t end = 0;
  while (end < after_scheme.size() && !ends_url(static_cast<unsigned char>(after_scheme[end]))) {
    ++end;
  }
  const std::string_view url = after_scheme.substr(0, end);
  const auto authority_end = url.find_first_of("/?#");
  std::string_view authority = url.substr(0, authority_end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  if (!host.empty() && host.front() == '[') {
    host = host.substr(0, host.find(']') + 1);
  } else if (const auto colon = host.find(':'); colon != std::string_view::npos) {
    host = host.substr(0, colon);
  }
  if (host.empty()) return std::nullopt;

  std::string path = "/";
  if (authority_end != std::string_view::npos && url[authority_end] == '/') {
    const std::string_view rest = url.substr(authority_end);
    path = std::string(rest.substr(0, rest.find_first_of("?#")));
  }
  return TamperRecord::Entry{ascii_lower(host), std::move(path)};
}

std::string rewrite_body(std::string_view body, std::string_view content_type,
                         TamperRecord& record) {
  if (!is_text_content(content_type)) return std::string(body);

  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  for (;;) {
    const auto hit = body.find(kSecureToken, pos);
    if (hit == std::string_view::npos) break;
    out.append(body.substr(pos, hit - pos));
    out.append(kPlainToken);
    pos = hit + kSecureToken.size();
    if (auto key = url_record_key(body.substr(pos))) record.add(key->first, key->second);
  }
  out.append(body.substr(pos));
  return out;
}

Headers rewrite_location(Headers headers, TamperRecord& record) {
  for (auto& header : headers) {
    if (!iequals(header.name, "Location")) continue;
    if (!istarts_with(header.value, kSecureToken)) continue;
    const std::string rest = header.value.substr(kSecureToken.size());
    header.value = std::string(kPlainToken) + rest;
    if (auto key = url_record_key(rest)) record.add(key->first, key->second);
  }
  return headers;
}

std::string strip_secure_attribute(std::string_view set_cookie) {
  // The first segment is the name=value pair and is never an attribute.
  const auto first_semi = set_cookie.find(';');
  if (first_semi == std::string_view::npos) return std::string(set_cookie);

  std::string out(set_cookie.substr(0, first_semi));
  std::string_view rest = set_cookie.substr(first_semi + 1);
  for (;;) {
    const auto semi = rest.find(';');
    const std::string_view segment = rest.substr(0, semi);
    std::string_view name = segment.substr(0, segment.find('='));
    while (!name.empty() && (name.front() == ' ' || name.front() == '\t')) name.remove_prefix(1);
    while (!name.empty() && (name.back() == ' ' || name.back() == '\t')) name.remove_suffix(1);
    if (!iequals(name, "Secure")) {
      out += ';';
      out.append(segment);
    }
    if (semi == std::string_view::npos) break;
    rest.remove_prefix(semi + 1);
  }
  return out;
}

Headers rewrite_set_cookie(Headers headers) {
  for (auto& header : headers) {
    if (iequals(header.name, "Set-Cookie")) header.value = strip_secure_attribute(header.value);
  }
  return headers;
}

}  // namespace striplab
