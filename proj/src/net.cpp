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

#include "striplab/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509v3.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <stdexcept>
#include <thread>

namespace striplab {
namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(int err) { return std::strerror(err); }

std::string openssl_error_text() {
  std::string text;
  while (const unsigned long code = ERR_get_error()) {
    char buf[256];
    ERR_error_string_n(code, buf, sizeof buf);
    if (!text.empty()) text += "; ";
    text += buf;
  }
  return text.empty() ? "unknown TLS error" : text;
}

std::string_view strip_brackets(std::string_view host) {
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
    return host.substr(1, host.size() - 2);
  }
  return host;
}

// Fills `storage` from a numeric literal; false when it is not one.
bool numeric_sockaddr(const std::string& address, std::uint16_t port,
                      sockaddr_storage& storage, socklen_t& length) {
  std::memset(&storage, 0, sizeof storage);
  const std::string bare(strip_brackets(address));
  auto* v4 = reinterpret_cast<sockaddr_in*>(&storage);
  if (inet_pton(AF_INET, bare.c_str(), &v4->sin_addr) == 1) {
    v4->sin_family = AF_INET;
    v4->sin_port = htons(port);
    length = sizeof(sockaddr_in);
    return true;
  }
  auto* v6 = reinterpret_cast<sockaddr_in6*>(&storage);
  if (inet_pton(AF_INET6, bare.c_str(), &v6->sin6_addr) == 1) {
    v6->sin6_family = AF_INET6;
    v6->sin6_port = htons(port);
    length = sizeof(sockaddr_in6);
    return true;
  }
  return false;
}

void set_nonblocking(int fd, bool enabled) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, enabled ? (flags | O_NONBLOCK) : (flags & ~O_NONBLOCK));
}

bool is_refusal(int err) {
  return err == ECONNREFUSED || err == ENETUNREACH || err == EHOSTUNREACH ||
         err == ECONNRESET || err == EADDRNOTAVAIL;
}

}  // namespace

// ---------------------------------------------------------------------------
// PortMap

PortMap PortMap::parse(std::string_view text) {
  PortMap map;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("port map entry without '=': " + std::string(item));
    }
    auto to_port = [&](std::string_view digits) {
      unsigned value = 0;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || value == 0 ||
          value > 65535) {
        throw std::invalid_argument("bad port in port map entry: " + std::string(item));
      }
      return static_cast<std::uint16_t>(value);
    };
    map.set(to_port(item.substr(0, eq)), to_port(item.substr(eq + 1)));
  }
  return map;
}

std::uint16_t PortMap::apply(std::uint16_t logical) const {
  const auto it = map_.find(logical);
  return it == map_.end() ? logical : it->second;
}

std::string PortMap::to_string() const {
  std::string out;
  for (const auto& [logical, physical] : map_) {
    if (!out.empty()) out += ',';
    out += std::to_string(logical) + "=" + std::to_string(physical);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Socket

void Socket::reset(int fd) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = fd;
}

void Socket::set_io_timeout(Millis timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
}

void Socket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::string resolve_first(std::string_view host) {
  if (host.empty()) throw ResolutionFailure("empty host name");
  const std::string name(strip_brackets(host));
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* results = nullptr;
  const int rc = getaddrinfo(name.c_str(), nullptr, &hints, &results);
  if (rc != 0 || results == nullptr) {
    throw ResolutionFailure("cannot resolve '" + name + "': " + gai_strerror(rc));
  }
  char text[NI_MAXHOST];
  const int nrc = getnameinfo(results->ai_addr, results->ai_addrlen, text, sizeof text,
                              nullptr, 0, NI_NUMERICHOST);
  freeaddrinfo(results);
  if (nrc != 0) {
    throw ResolutionFailure("cannot format address of '" + name + "'");
  }
  return text;
}

ConnectAttempt try_connect(const std::string& address, std::uint16_t port,
                           Millis timeout) {
  sockaddr_storage storage;
  socklen_t length = 0;
  if (!numeric_sockaddr(address, port, storage, length)) {
    throw NetError("not a numeric address: " + address);
  }

  ConnectAttempt attempt;
  Socket socket(::socket(storage.ss_family, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!socket.valid()) throw NetError("socket(): " + errno_text(errno));
  set_nonblocking(socket.fd(), true);

  const auto deadline = Clock::now() + timeout;
  int rc = ::connect(socket.fd(), reinterpret_cast<sockaddr*>(&storage), length);
  if (rc != 0 && errno != EINPROGRESS) {
    if (is_refusal(errno)) {
      attempt.status = ConnectStatus::kRefused;
      attempt.error = errno;
      return attempt;
    }
    throw NetError("connect(): " + errno_text(errno));
  }

  if (rc != 0) {
    for (;;) {
      const auto now = Clock::now();
      if (now >= deadline) {
        attempt.status = ConnectStatus::kTimedOut;
        return attempt;
      }
      pollfd pfd{socket.fd(), POLLOUT, 0};
      // Rounded up so a timed-out attempt never returns before the deadline.
      const auto remaining = std::chrono::ceil<Millis>(deadline - now).count();
      rc = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (rc < 0 && errno == EINTR) continue;
      if (rc < 0) throw NetError("poll(): " + errno_text(errno));
      if (rc == 0) continue;  // re-check the deadline; poll may wake early
      break;
    }
    int err = 0;
    socklen_t err_len = sizeof err;
    getsockopt(socket.fd(), SOL_SOCKET, SO_ERROR, &err, &err_len);
    if (err != 0) {
      if (is_refusal(err)) {
        attempt.status = ConnectStatus::kRefused;
        attempt.error = err;
        return attempt;
      }
      // Any other failure reads as silence; report it at the deadline.
      std::this_thread::sleep_until(deadline);
      attempt.status = ConnectStatus::kTimedOut;
      attempt.error = err;
      return attempt;
    }
  }

  set_nonblocking(socket.fd(), false);
  const int one = 1;
  setsockopt(socket.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  attempt.status = ConnectStatus::kConnected;
  attempt.socket = std::move(socket);
  return attempt;
}

Socket connect_tcp(const std::string& host, std::uint16_t port, Millis timeout) {
  const std::string address = resolve_first(host);
  ConnectAttempt attempt = try_connect(address, port, timeout);
  switch (attempt.status) {
    case ConnectStatus::kConnected:
      return std::move(attempt.socket);
    case ConnectStatus::kRefused:
      throw NetError("connect to " + host + ":" + std::to_string(port) + " failed: " +
                     errno_text(attempt.error));
    case ConnectStatus::kTimedOut:
      break;
  }
  throw NetError("connect to " + host + ":" + std::to_string(port) + " timed out");
}

// ---------------------------------------------------------------------------
// Streams

std::size_t PlainStream::read_some(std::span<char> buffer) {
  for (;;) {
    const ssize_t n = ::recv(socket_.fd(), buffer.data(), buffer.size(), 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno == EINTR) continue;
    throw NetError("recv(): " + errno_text(errno));
  }
}

void PlainStream::write_all(std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(socket_.fd(), data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetError("send(): " + errno_text(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

TlsClientContext::TlsClientContext(std::optional<std::filesystem::path> trust_root,
                                   bool verify)
    : verify_(verify) {
  ctx_ = SSL_CTX_new(TLS_client_method());
  if (ctx_ == nullptr) throw TlsError("SSL_CTX_new: " + openssl_error_text());
  SSL_CTX_set_min_proto_version(ctx_, TLS1_2_VERSION);
  if (!verify_) {
    SSL_CTX_set_verify(ctx_, SSL_VERIFY_NONE, nullptr);
    return;
  }
  const int loaded = trust_root
                         ? SSL_CTX_load_verify_locations(ctx_, trust_root->c_str(), nullptr)
                         : SSL_CTX_set_default_verify_paths(ctx_);
  if (loaded != 1) {
    const std::string detail = openssl_error_text();
    SSL_CTX_free(ctx_);
    throw TlsError("cannot load trust root " +
                   (trust_root ? trust_root->string() : std::string("(system)")) + ": " +
                   detail);
  }
  SSL_CTX_set_verify(ctx_, SSL_VERIFY_PEER, nullptr);
}

TlsClientContext::~TlsClientContext() { SSL_CTX_free(ctx_); }

std::unique_ptr<TlsStream> TlsStream::connect(Socket socket,
                                              const TlsClientContext& context,
                                              const std::string& server_name) {
  ERR_clear_error();
  SSL* ssl = SSL_new(context.native());
  if (ssl == nullptr) throw TlsError("SSL_new: " + openssl_error_text());
  std::unique_ptr<TlsStream> stream(new TlsStream(std::move(socket), ssl));

  const std::string bare(strip_brackets(server_name));
  in6_addr probe{};
  const bool is_ip = inet_pton(AF_INET, bare.c_str(), &probe) == 1 ||
                     inet_pton(AF_INET6, bare.c_str(), &probe) == 1;
  if (!is_ip) SSL_set_tlsext_host_name(ssl, bare.c_str());
  if (context.verifies()) {
    X509_VERIFY_PARAM* param = SSL_get0_param(ssl);
    if (is_ip) {
      X509_VERIFY_PARAM_set1_ip_asc(param, bare.c_str());
    } else {
      X509_VERIFY_PARAM_set1_host(param, bare.c_str(), 0);
    }
  }
  SSL_set_fd(ssl, stream->socket_.fd());
  if (SSL_connect(ssl) != 1) {
    const long verify = SSL_get_verify_result(ssl);
    if (context.verifies() && verify != X509_V_OK) {
      throw TlsVerifyError("certificate verification failed for " + bare + ": " +
                           X509_verify_cert_error_string(verify));
    }
    throw TlsError("TLS handshake with " + bare + " failed: " + openssl_error_text());
  }
  return stream;
}

TlsStream::~TlsStream() {
  if (ssl_ != nullptr) {
    SSL_shutdown(ssl_);
    SSL_free(ssl_);
  }
}

std::size_t TlsStream::read_some(std::span<char> buffer) {
  const int n = SSL_read(ssl_, buffer.data(), static_cast<int>(buffer.size()));
  if (n > 0) return static_cast<std::size_t>(n);
  const int err = SSL_get_error(ssl_, n);
  if (err == SSL_ERROR_ZERO_RETURN) return 0;
  // Peers that close without close_notify are common; treat as EOF.
  if (err == SSL_ERROR_SYSCALL && ERR_peek_error() == 0) return 0;
  if (err == SSL_ERROR_SSL && ERR_GET_REASON(ERR_peek_error()) ==
                                  SSL_R_UNEXPECTED_EOF_WHILE_READING) {
    ERR_clear_error();
    return 0;
  }
  throw TlsError("SSL_read: " + openssl_error_text());
}

void TlsStream::write_all(std::string_view data) {
  while (!data.empty()) {
    const int n = SSL_write(ssl_, data.data(), static_cast<int>(data.size()));
    if (n <= 0) throw TlsError("SSL_write: " + openssl_error_text());
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

// ---------------------------------------------------------------------------
// BufferedReader

bool BufferedReader::fill() {
  if (offset_ > 0) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  char chunk[16 * 1024];
  const std::size_t n = stream_.read_some(chunk);
  if (n == 0) return false;
  buffer_.append(chunk, n);
  return true;
}

std::optional<std::string> BufferedReader::read_line(std::size_t max_length) {
  std::size_t scanned = 0;  // bytes after offset_ already known to hold no '\n'
  for (;;) {
    const auto nl = buffer_.find('\n', offset_ + scanned);
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(offset_, nl - offset_);
      offset_ = nl + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    scanned = buffer_.size() - offset_;
    if (scanned > max_length) {
      throw HttpParseError("line exceeds " + std::to_string(max_length) + " bytes");
    }
    if (!fill()) {
      if (buffer_.size() == offset_) return std::nullopt;
      std::string line = buffer_.substr(offset_);
      offset_ = buffer_.size();
      return line;
    }
  }
}

std::string BufferedReader::read_exact(std::size_t count) {
  while (buffer_.size() - offset_ < count) {
    if (!fill()) throw NetError("connection closed before body was complete");
  }
  std::string out = buffer_.substr(offset_, count);
  offset_ += count;
  return out;
}

std::string BufferedReader::read_to_eof(std::size_t max_length) {
  while (fill()) {
    if (buffer_.size() - offset_ > max_length) {
      throw HttpParseError("body exceeds " + std::to_string(max_length) + " bytes");
    }
  }
  std::string out = buffer_.substr(offset_);
  offset_ = buffer_.size();
  return out;
}

// ---------------------------------------------------------------------------
// Listener

Listener::Listener(const std::string& address, std::uint16_t port, int backlog)
    : address_(address) {
  sockaddr_storage storage;
  socklen_t length = 0;
  if (!numeric_sockaddr(address, port, storage, length)) {
    throw BindFailure("listen address must be numeric: " + address);
  }
  socket_.reset(::socket(storage.ss_family, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!socket_.valid()) throw BindFailure("socket(): " + errno_text(errno));
  const int one = 1;
  setsockopt(socket_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(socket_.fd(), reinterpret_cast<sockaddr*>(&storage), length) != 0) {
    throw BindFailure("bind " + address + ":" + std::to_string(port) + ": " +
                      errno_text(errno));
  }
  if (::listen(socket_.fd(), backlog) != 0) {
    throw BindFailure("listen(): " + errno_text(errno));
  }
  sockaddr_storage bound{};
  socklen_t bound_len = sizeof bound;
  getsockname(socket_.fd(), reinterpret_cast<sockaddr*>(&bound), &bound_len);
  port_ = bound.ss_family == AF_INET
              ? ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port)
              : ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
}

Socket Listener::accept(Millis poll_interval) {
  if (closed_.load()) return Socket{};
  pollfd pfd{socket_.fd(), POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(poll_interval.count()));
  if (rc <= 0 || closed_.load()) return Socket{};
  Socket client(::accept4(socket_.fd(), nullptr, nullptr, SOCK_CLOEXEC));
  return client;
}

void Listener::close() {
  if (!closed_.exchange(true)) ::shutdown(socket_.fd(), SHUT_RDWR);
}

}  // namespace striplab
