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

#include <stdexcept>
#include <string>

namespace striplab {

// Root of every error type thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidUrl : public Error {
 public:
  using Error::Error;
};

class NotUpgradeable : public Error {
 public:
  using Error::Error;
};

class ResolutionFailure : public Error {
 public:
  using Error::Error;
};

// Transport-level failure: connect, read, write, bind.
class NetError : public Error {
 public:
  using Error::Error;
};

class BindFailure : public NetError {
 public:
  using NetError::NetError;
};

class TlsError : public NetError {
 public:
  using NetError::NetError;
};

// Peer certificate did not verify against the configured trust root.
class TlsVerifyError : public TlsError {
 public:
  using TlsError::TlsError;
};

class HttpParseError : public Error {
 public:
  using Error::Error;
};

class MalformedLog : public Error {
 public:
  using Error::Error;
};

class LogWriteFailure : public Error {
 public:
  using Error::Error;
};

class NavigationFailure : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace striplab
