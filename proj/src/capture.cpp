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

#include "striplab/capture.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <iterator>

namespace striplab {
namespace {

constexpr std::string_view kSecureMarker = "SECURE ";
constexpr std::string_view kDataMarker = " Data (";
constexpr std::string_view kLengthMarker = "): len=";
constexpr std::size_t kTimestampLength = 23;  // YYYY-MM-DD HH:MM:SS,mmm

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
  int value = 0;
  const char* first = text.data() + pos;
  const auto [ptr, ec] = std::from_chars(first, first + count, value);
  if (ec != std::errc{} || ptr != first + count) {
    throw MalformedLog("bad timestamp: " + std::string(text));
  }
  return value;
}

struct ParsedHeader {
  std::string timestamp;
  bool secure = false;
  std::string method;
  std::string host;
  std::size_t length = 0;
};

ParsedHeader parse_header_line(std::string_view line) {
  ParsedHeader header;
  if (line.size() < kTimestampLength + 1 || line[kTimestampLength] != ' ') {
    throw MalformedLog("bad capture header: " + std::string(line));
  }
  header.timestamp = std::string(line.substr(0, kTimestampLength));
  parse_timestamp(header.timestamp);
  line.remove_prefix(kTimestampLength + 1);

  if (line.starts_with(kSecureMarker)) {
    header.secure = true;
    line.remove_prefix(kSecureMarker.size());
  }
  const auto data = line.find(kDataMarker);
  if (data == std::string_view::npos || data == 0) {
    throw MalformedLog("capture header without method: " + std::string(line));
  }
  header.method = std::string(line.substr(0, data));
  line.remove_prefix(data + kDataMarker.size());

  // Host names cannot contain "): len=", so the last occurrence delimits.
  const auto len = line.rfind(kLengthMarker);
  if (len == std::string_view::npos) {
    throw MalformedLog("capture header without length: " + std::string(line));
  }
  header.host = std::string(line.substr(0, len));
  const std::string_view digits = line.substr(len + kLengthMarker.size());
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), header.length);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw MalformedLog("bad body length in capture header");
  }
  return header;
}

}  // namespace

std::string format_timestamp(WallClock::time_point timestamp) {
  const auto since_epoch = timestamp.time_since_epoch();
  const auto seconds = std::chrono::floor<std::chrono::seconds>(since_epoch);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(since_epoch - seconds).count();
  const std::time_t t = static_cast<std::time_t>(seconds.count());
  std::tm local{};
  localtime_r(&t, &local);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d,%03d", local.tm_year + 1900,
                local.tm_mon + 1, local.tm_mday, local.tm_hour, local.tm_min, local.tm_sec,
                static_cast<int>(millis));
  return buf;
}

WallClock::time_point parse_timestamp(std::string_view text) {
  if (text.size() != kTimestampLength || text[4] != '-' || text[7] != '-' ||
      text[10] != ' ' || text[13] != ':' || text[16] != ':' || text[19] != ',') {
    throw MalformedLog("bad timestamp: " + std::string(text));
  }
  std::tm local{};
  local.tm_year = parse_digits(text, 0, 4) - 1900;
  local.tm_mon = parse_digits(text, 5, 2) - 1;
  local.tm_mday = parse_digits(text, 8, 2);
  local.tm_hour = parse_digits(text, 11, 2);
  local.tm_min = parse_digits(text, 14, 2);
  local.tm_sec = parse_digits(text, 17, 2);
  local.tm_isdst = -1;
  const int millis = parse_digits(text, 20, 3);
  const std::time_t t = std::mktime(&local);
  if (t == static_cast<std::time_t>(-1)) throw MalformedLog("bad timestamp: " + std::string(text));
  return WallClock::time_point(std::chrono::seconds(t)) + std::chrono::milliseconds(millis);
}

std::string serialize_entry(const CaptureEntry& entry) {
  std::string out = format_timestamp(entry.timestamp);
  out += ' ';
  if (entry.secure) out += kSecureMarker;
  out += entry.method;
  out += kDataMarker;
  out += entry.host;
  out += kLengthMarker;
  out += std::to_string(entry.body.size());
  out += '\n';
  out += entry.body;
  out += "\n\n";
  return out;
}

std::vector<CaptureEntry> parse_capture_log(std::string_view contents) {
  std::vector<CaptureEntry> entries;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    const auto eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) throw MalformedLog("truncated capture header");
    const ParsedHeader header = parse_header_line(contents.substr(pos, eol - pos));
    pos = eol + 1;
    if (contents.size() - pos < header.length + 2) {
      throw MalformedLog("capture body shorter than its declared length");
    }
    CaptureEntry entry;
    entry.timestamp = parse_timestamp(header.timestamp);
    entry.secure = header.secure;
    entry.host = header.host;
    entry.method = header.method;
    entry.body = std::string(contents.substr(pos, header.length));
    pos += header.length;
    if (contents.substr(pos, 2) != "\n\n") {
      throw MalformedLog("capture entry not terminated by a blank line");
    }
    pos += 2;
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<CaptureMatch> scan_log_text(std::string_view contents, std::string_view marker) {
  std::vector<CaptureMatch> matches;
  for (const auto& entry : parse_capture_log(contents)) {
    if (entry.body.find(marker) == std::string::npos) continue;
    matches.push_back({format_timestamp(entry.timestamp), entry.secure, entry.host, entry.method});
  }
  return matches;
}

std::vector<CaptureMatch> scan_for_marker(const std::filesystem::path& log,
                                          std::string_view marker) {
  std::ifstream in(log, std::ios::binary);
  if (!in) throw MalformedLog("cannot open capture log " + log.string());
  const std::string contents{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return scan_log_text(contents, marker);
}

CaptureLog::CaptureLog(std::filesystem::path path)
    : path_(std::move(path)), out_(path_, std::ios::binary | std::ios::app) {
  if (!out_) failure_ = "cannot open capture log " + path_.string();
}

void CaptureLog::append(CaptureEntry entry) {
  std::lock_guard lock(mutex_);
  entry.timestamp = std::chrono::time_point_cast<std::chrono::milliseconds>(entry.timestamp);
  if (entry.timestamp < last_) entry.timestamp = last_;
  last_ = entry.timestamp;
  if (!failure_.empty()) return;
  out_ << serialize_entry(entry);
  out_.flush();
  if (!out_) failure_ = "write to capture log " + path_.string() + " failed";
}

bool CaptureLog::failed() const {
  std::lock_guard lock(mutex_);
  return !failure_.empty();
}

std::string CaptureLog::failure() const {
  std::lock_guard lock(mutex_);
  return failure_;
}

void append_capture(const CaptureEntry& entry, CaptureLog& log) { log.append(entry); }

}  // namespace striplab
