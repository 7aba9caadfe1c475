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

// Thin RAII layer over BSD sockets and OpenSSL used by the prober, the
// strip proxy, and the scripted victim.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "striplab/error.hpp"

typedef struct ssl_ctx_st SSL_CTX;
typedef struct ssl_st SSL;

namespace striplab {

using Millis = std::chrono::milliseconds;

// Logical-to-physical port override ("80=8080,443=8443"). Lets the
// well-known ports keep their meaning while listeners run unprivileged.
class PortMap {
 public:
  PortMap() = default;

  // Throws std::invalid_argument on malformed text.
  static PortMap parse(std::string_view text);

  void set(std::uint16_t logical, std::uint16_t physical) { map_[logical] = physical; }
  std::uint16_t apply(std::uint16_t logical) const;
  bool empty() const { return map_.empty(); }
  std::string to_string() const;

 private:
  std::map<std::uint16_t, std::uint16_t> map_;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { reset(); }

  Socket(Socket&& other) noexcept : fd_(other.release()) {}
  Socket& operator=(Socket&& other) noexcept {
    if (this != &other) reset(other.release());
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset(int fd = -1);

  // Applies SO_RCVTIMEO and SO_SNDTIMEO.
  void set_io_timeout(Millis timeout);
  // Half-close both directions without releasing the descriptor.
  void shutdown();

 private:
  int fd_ = -1;
};

// First address the system resolver returns for `host`, as a numeric
// literal. IP literals (bracketed or not) pass through. Throws
// ResolutionFailure.
std::string resolve_first(std::string_view host);

enum class ConnectStatus { kConnected, kRefused, kTimedOut };

struct ConnectAttempt {
  ConnectStatus status = ConnectStatus::kTimedOut;
  Socket socket;  // valid only when connected
  int error = 0;  // errno for refused attempts
};

// Non-blocking connect to a numeric address, waiting at most `timeout`.
// Refused, unreachable, and reset outcomes all report kRefused. The
// returned socket is switched back to blocking mode.
ConnectAttempt try_connect(const std::string& address, std::uint16_t port,
                           Millis timeout);

// Resolve + connect. Throws ResolutionFailure or NetError.
Socket connect_tcp(const std::string& host, std::uint16_t port, Millis timeout);

// Byte stream over either a plain socket or a TLS session.
class Stream {
 public:
  virtual ~Stream() = default;
  // Returns 0 on orderly EOF. Throws NetError.
  virtual std::size_t read_some(std::span<char> buffer) = 0;
  virtual void write_all(std::string_view data) = 0;
  virtual bool is_tls() const = 0;
};

class PlainStream final : public Stream {
 public:
  explicit PlainStream(Socket socket) : socket_(std::move(socket)) {}
  std::size_t read_some(std::span<char> buffer) override;
  void write_all(std::string_view data) override;
  bool is_tls() const override { return false; }
  Socket& socket() { return socket_; }

 private:
  Socket socket_;
};

// Client-side TLS configuration. When verifying, the peer must chain to
// `trust_root` (the system store when absent) and match the requested host
// name.
class TlsClientContext {
 public:
  explicit TlsClientContext(std::optional<std::filesystem::path> trust_root,
                            bool verify = true);
  ~TlsClientContext();
  TlsClientContext(const TlsClientContext&) = delete;
  TlsClientContext& operator=(const TlsClientContext&) = delete;

  bool verifies() const { return verify_; }
  SSL_CTX* native() const { return ctx_; }

 private:
  SSL_CTX* ctx_ = nullptr;
  bool verify_ = false;
};

class TlsStream final : public Stream {
 public:
  ~TlsStream() override;
  TlsStream(const TlsStream&) = delete;
  TlsStream& operator=(const TlsStream&) = delete;

  // Runs the client handshake on `socket` with SNI and host-name checking.
  // Throws TlsVerifyError when the certificate is rejected, TlsError for
  // any other handshake failure.
  static std::unique_ptr<TlsStream> connect(Socket socket,
                                            const TlsClientContext& context,
                                            const std::string& server_name);

  std::size_t read_some(std::span<char> buffer) override;
  void write_all(std::string_view data) override;
  bool is_tls() const override { return true; }

 private:
  TlsStream(Socket socket, SSL* ssl) : socket_(std::move(socket)), ssl_(ssl) {}

  Socket socket_;
  SSL* ssl_ = nullptr;
};

// Line and block reads on top of a Stream.
class BufferedReader {
 public:
  explicit BufferedReader(Stream& stream) : stream_(stream) {}

  // Reads through the next "\n" and returns the line without its "\r\n" or
  // "\n" terminator. Returns nullopt at EOF before any byte. Throws
  // HttpParseError when the line exceeds `max_length`.
  std::optional<std::string> read_line(std::size_t max_length = 64 * 1024);
  // Exactly `count` bytes; throws NetError on premature EOF.
  std::string read_exact(std::size_t count);
  // Everything up to EOF, bounded by `max_length`.
  std::string read_to_eof(std::size_t max_length);

 private:
  bool fill();

  Stream& stream_;
  std::string buffer_;
  std::size_t offset_ = 0;
};

// TCP listener on an IPv4 or IPv6 literal. Port 0 picks an ephemeral port.
class Listener {
 public:
  Listener(const std::string& address, std::uint16_t port, int backlog = 64);

  std::uint16_t port() const { return port_; }
  const std::string& address() const { return address_; }
  // Waits up to `poll_interval` for a connection; returns an invalid Socket
  // when none arrived or the listener was closed.
  Socket accept(Millis poll_interval);
  // Safe to call from another thread while accept() is waiting.
  void close();
  bool open() const { return !closed_.load(); }

 private:
  Socket socket_;
  std::atomic<bool> closed_{false};
  std::string address_;
  std::uint16_t port_ = 0;
};

}  // namespace striplab
