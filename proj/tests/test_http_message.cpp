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


#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>

#include "striplab/http_message.hpp"

namespace striplab {
namespace {

// Serves a fixed byte string in small pieces.
class StringStream final : public Stream {
 public:
  explicit StringStream(std::string data, std::size_t piece = 7)
      : data_(std::move(data)), piece_(piece) {}
  std::size_t read_some(std::span<char> buffer) override {
    const std::size_t n = std::min({buffer.size(), piece_, data_.size() - pos_});
    std::memcpy(buffer.data(), data_.data() + pos_, n);
    pos_ += n;
    return n;
  }
  void write_all(std::string_view data) override { written_ += data; }
  bool is_tls() const override { return false; }

 private:
  std::string data_;
  std::size_t piece_;
  std::size_t pos_ = 0;
  std::string written_;
};

TEST(ReadRequest, ContentLengthBody) {
  StringStream stream(
      "POST http://ex.test/submit HTTP/1.1\r\nHost: ex.test\r\nContent-Length: 5\r\n\r\nhello");
  BufferedReader reader(stream);
  const auto req = read_request(reader);
  ASSERT_TRUE(req);
  EXPECT_EQ(req->start_line, "POST http://ex.test/submit HTTP/1.1");
  EXPECT_EQ(req->body, "hello");
  EXPECT_FALSE(read_request(reader));
}

TEST(ReadRequest, ChunkedBodyIsJoined) {
  StringStream stream(
      "POST /x HTTP/1.1\r\nHost: ex.test\r\nTransfer-Encoding: chunked\r\n\r\n"
      "3\r\nabc\r\n4;ext=1\r\ndefg\r\n0\r\n\r\n");
  BufferedReader reader(stream);
  const auto req = read_request(reader);
  ASSERT_TRUE(req);
  EXPECT_EQ(req->body, "abcdefg");
}

TEST(ReadResponse, ChunkedAndBodylessStatuses) {
  StringStream chunked(
      "HTTP/1.1 200 OK\r\nTransfer-Encoding: chunked\r\n\r\na\r\n0123456789\r\n0\r\n\r\n");
  BufferedReader r1(chunked);
  EXPECT_EQ(read_response(r1).body, "0123456789");

  StringStream no_content("HTTP/1.1 204 No Content\r\nX: y\r\n\r\nleftover");
  BufferedReader r2(no_content);
  EXPECT_EQ(read_response(r2).body, "");

  StringStream to_eof("HTTP/1.0 200 OK\r\n\r\nuntil the end");
  BufferedReader r3(to_eof);
  EXPECT_EQ(read_response(r3).body, "until the end");
}

TEST(HttpMessageView, HeaderOrderAndInPlaceReplacement) {
  HttpMessageView m;
  m.start_line = "HTTP/1.1 200 OK";
  m.headers = {{"A", "1"}, {"Content-Length", "3"}, {"B", "2"}, {"content-length", "9"}};
  m.set_header("Content-Length", "4");
  ASSERT_EQ(m.headers.size(), 3u);
  EXPECT_EQ(m.headers[0], (Header{"A", "1"}));
  EXPECT_EQ(m.headers[1], (Header{"Content-Length", "4"}));
  EXPECT_EQ(m.headers[2], (Header{"B", "2"}));
  EXPECT_EQ(m.header("content-LENGTH"), "4");
  m.remove_header("a");
  EXPECT_FALSE(m.header("A"));
  m.body = "abcd";
  EXPECT_EQ(m.serialize(), "HTTP/1.1 200 OK\r\nContent-Length: 4\r\nB: 2\r\n\r\nabcd");
}

TEST(ParseLines, StatusAndRequest) {
  const StatusLine s = parse_status_line("HTTP/1.1 301 Moved Permanently");
  EXPECT_EQ(s.code, 301);
  EXPECT_EQ(s.reason, "Moved Permanently");
  const RequestLine r = parse_request_line("GET http://ex.test/ HTTP/1.1");
  EXPECT_EQ(r.method, "GET");
  EXPECT_EQ(r.target, "http://ex.test/");
  EXPECT_THROW(parse_status_line("garbage"), HttpParseError);
}

TEST(ParseRequestTarget, AbsoluteAndOriginForm) {
  HttpMessageView absolute{"GET HTTP://Ex.Test:8080/a?b HTTP/1.1", {{"Host", "ignored"}}, ""};
  const CanonicalUrl a = parse_request_target(absolute);
  EXPECT_EQ(a.host, "ex.test");
  EXPECT_EQ(a.port, 8080);
  EXPECT_EQ(a.path_and_query(), "/a?b");

  HttpMessageView origin{"POST /submit HTTP/1.1", {{"Host", "localhost"}}, ""};
  const CanonicalUrl o = parse_request_target(origin);
  EXPECT_EQ(o.scheme, Scheme::kHttp);
  EXPECT_EQ(o.host, "localhost");
  EXPECT_EQ(o.path, "/submit");
}

TEST(MakeResponse, ContentLengthMatchesBody) {
  const HttpMessageView m = make_response(502, "Bad Gateway", "upstream down");
  EXPECT_EQ(m.start_line, "HTTP/1.1 502 Bad Gateway");
  EXPECT_EQ(m.header("Content-Length"), std::to_string(m.body.size()));
}

}  // namespace
}  // namespace striplab
