/* Copyright (c) 2026 The stereokit Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <stdexcept>
#include <string>

namespace stereokit {

enum class ErrorCode {
  invalid_argument,  // malformed parameters or violated preconditions
  shape_mismatch,    // tensor extents disagree with the contract
  domain,            // numerically undefined input (point at infinity, singular matrix)
  degenerate,        // geometric configuration admits no unique answer
  io,                // file system or codec failure
  internal,
};

const char* to_string(ErrorCode code) noexcept;

/// Structured error thrown by every stereokit operation on contract violation.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace stereokit
