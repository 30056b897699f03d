// Copyright 2026 The ReasonEval Authors
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

namespace reasoneval {

// Malformed input data: bad headers, unknown leads, ragged columns, invalid
// index arrays and the like.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Configuration file or flag problem. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProviderErrorKind {
  kRetriesExhausted,  // 429/5xx or connection failures outlasted the retry budget
  kTimeout,
  kSchema,            // response was not the expected JSON shape
  kHttp,              // a non-retryable status such as 400 or 401
};

class ProviderError : public std::runtime_error {
 public:
  ProviderError(ProviderErrorKind kind, const std::string& what, int attempts = 0)
      : std::runtime_error(what), kind_(kind), attempts_(attempts) {}
  ProviderErrorKind kind() const { return kind_; }
  int attempts() const { return attempts_; }

 private:
  ProviderErrorKind kind_;
  int attempts_;
};

}  // namespace reasoneval
