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


// Shared fixtures and generators for the unit tests and the acceptance runner.

#pragma once

#include <stdlib.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "striplab/capture.hpp"
#include "striplab/net.hpp"
#include "striplab/prober.hpp"

namespace striplab::testing {

class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "striplab-test-XXXXXX").string();
    if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// A loopback listener whose accept queue is full: further connects neither
// complete nor get refused, so they run into the caller's deadline.
class Blackhole {
 public:
  Blackhole() : listener_("127.0.0.1", 0, 0) {
    for (int i = 0; i < 8; ++i) {
      ConnectAttempt attempt = try_connect("127.0.0.1", listener_.port(), Millis{150});
      if (attempt.status != ConnectStatus::kConnected) return;
      fillers_.push_back(std::move(attempt.socket));
    }
    throw std::runtime_error("accept queue never filled");
  }
  std::uint16_t port() const { return listener_.port(); }

 private:
  Listener listener_;
  std::vector<Socket> fillers_;
};

// Probe-level shape of one fixture host.
struct HostShape {
  bool listen80 = false;
  bool listen443 = false;
};

// Hosts 127.0.0.1 .. 127.0.0.N sharing one pair of mapped ports; each host
// listens on the subset its shape names.
class MultiHostFixture {
 public:
  explicit MultiHostFixture(const std::vector<HostShape>& shapes) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      listeners_.clear();
      const std::uint16_t p80 = Listener("127.0.0.1", 0).port();
      const std::uint16_t p443 = Listener("127.0.0.1", 0).port();
      if (p80 == p443) continue;
      try {
        for (std::size_t i = 0; i < shapes.size(); ++i) {
          const std::string address = host(i);
          if (shapes[i].listen80) listeners_.push_back(std::make_unique<Listener>(address, p80));
          if (shapes[i].listen443) {
            listeners_.push_back(std::make_unique<Listener>(address, p443));
          }
        }
      } catch (const BindFailure&) {
        continue;
      }
      map_.set(80, p80);
      map_.set(443, p443);
      return;
    }
    throw std::runtime_error("could not bind the multi-host fixture");
  }
  static std::string host(std::size_t index) { return "127.0.0." + std::to_string(index + 1); }
  const PortMap& port_map() const { return map_; }

 private:
  std::vector<std::unique_ptr<Listener>> listeners_;
  PortMap map_;
};

inline std::vector<HostShape> twenty_host_shapes() {
  std::vector<HostShape> shapes;
  for (int i = 0; i < 20; ++i) shapes.push_back({i % 2 == 0, (i / 2) % 2 == 0});
  return shapes;
}

// Text body with planted "https://host/path" URLs whose record keys are
// known to the generator.
struct PlantedBody {
  std::string body;
  std::vector<std::pair<std::string, std::string>> planted;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  std::string word(std::size_t lo, std::size_t hi, std::string_view alphabet) {
    std::string out;
    const std::size_t n = uniform(lo, hi);
    for (std::size_t i = 0; i < n; ++i) out += alphabet[uniform(0, alphabet.size() - 1)];
    return out;
  }

  std::string bytes(std::size_t n) {
    std::string out(n, '\0');
    for (auto& c : out) c = static_cast<char>(uniform(0, 255));
    return out;
  }

  // Filler biased towards near-misses of the token.
  std::string filler(std::size_t n) {
    static const std::vector<std::string> kDecoys = {
        "http://", "https:/", "HTTPS://", "https:", "s://", "https//", "htps://", "<a href=\"",
        "\">",      "\n",      " ",        "&amp;",  "h",    "https:\\\\"};
    std::string out;
    while (out.size() < n) {
      if (uniform(0, 3) == 0) {
        out += kDecoys[uniform(0, kDecoys.size() - 1)];
      } else {
        out += word(1, 16, "abcdefghijklmnopqrstuvwxyz0123456789.,;:/=?&-_ ");
      }
    }
    out.resize(n);
    return out;
  }

  PlantedBody planted_body(std::size_t max_length, std::size_t max_tokens) {
    PlantedBody out;
    const std::size_t tokens = uniform(0, max_tokens);
    const std::size_t length = uniform(0, max_length);
    std::string host_alpha = "abcdefghijklmnopqrstuvwxyz0123456789-";
    for (std::size_t i = 0; i < tokens; ++i) {
      out.body += filler(uniform(0, length / (tokens + 1)));
      const std::string host = word(1, 12, host_alpha) + ".test";
      const std::string path = "/" + word(0, 16, "abcdefghijklmnopqrstuvwxyz0123456789/._-");
      const std::string query = uniform(0, 1) ? "?q=" + word(0, 6, "abc123") : "";
      out.body += (uniform(0, 1) ? " " : "\"");
      out.body += "https://" + host + path + query;
      out.body += (uniform(0, 1) ? "\"" : " ");
      out.planted.emplace_back(host, path);
    }
    out.body += filler(length > out.body.size() ? length - out.body.size() : 0);
    return out;
  }

  CaptureEntry capture_entry(WallClock::time_point base) {
    CaptureEntry e;
    e.timestamp = base + std::chrono::milliseconds(uniform(0, 86'400'000));
    e.timestamp = std::chrono::time_point_cast<std::chrono::milliseconds>(e.timestamp);
    e.secure = uniform(0, 1) == 1;
    e.host = word(1, 20, "abcdefghijklmnopqrstuvwxyz0123456789.-");
    e.method = uniform(0, 3) == 0 ? "GET" : "POST";
    switch (uniform(0, 3)) {
      case 0:
        e.body = "";
        break;
      case 1:
        e.body = bytes(uniform(1, 2048));
        break;
      case 2:
        e.body = "Email=u%40x.test&Passwd=" + word(4, 24, "ABCDEF0123456789") + "\n\n" +
                 word(0, 40, "ab\n\r ");
        break;
      default:
        e.body = word(1, 512, "abcdefghij\n\r\t =&%");
        break;
    }
    return e;
  }

 private:
  std::mt19937_64 rng_;
};

inline std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (haystack.compare(i, needle.size(), needle) == 0) ++count;
  }
  return count;
}

}  // namespace striplab::testing
