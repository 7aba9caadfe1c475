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

// Plaintext capture log written by the strip proxy.
//
// Each entry is a header line followed by the raw body and a blank line:
//
//   2011-10-20 10:39:22,142 SECURE POST Data (accounts.google.com): len=42
//   Email=...&Passwd=...
//   <empty line>
//
// "SECURE " appears only when the upstream leg used TLS. The trailing
// len=N gives the exact body size, so bodies may hold any bytes, newlines
// included.

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "striplab/error.hpp"

namespace striplab {

using WallClock = std::chrono::system_clock;

struct CaptureEntry {
  WallClock::time_point timestamp;  // millisecond precision is kept
  bool secure = false;
  std::string host;
  std::string method = "POST";
  std::string body;
};

// "YYYY-MM-DD HH:MM:SS,mmm" in local time.
std::string format_timestamp(WallClock::time_point timestamp);
// Inverse of format_timestamp. Throws MalformedLog.
WallClock::time_point parse_timestamp(std::string_view text);

std::string serialize_entry(const CaptureEntry& entry);

// Throws MalformedLog when `contents` is not a sequence of entries.
std::vector<CaptureEntry> parse_capture_log(std::string_view contents);

struct CaptureMatch {
  std::string timestamp;
  bool secure = false;
  std::string host;
  std::string method;
};

// Entries whose body contains `marker`, in log order.
std::vector<CaptureMatch> scan_log_text(std::string_view contents, std::string_view marker);
std::vector<CaptureMatch> scan_for_marker(const std::filesystem::path& log,
                                          std::string_view marker);

// Append-only capture file shared by all proxy connections. Entries are
// written whole under a lock, and timestamps never go backwards within one
// log. A write error does not throw; it is latched and reported by
// failure().
class CaptureLog {
 public:
  explicit CaptureLog(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  void append(CaptureEntry entry);
  bool failed() const;
  std::string failure() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::ofstream out_;
  WallClock::time_point last_{};
  std::string failure_;
};

void append_capture(const CaptureEntry& entry, CaptureLog& log);

}  // namespace striplab
