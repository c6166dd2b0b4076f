/*
 * Copyright 2026 The elbranch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace elbranch {

/// Failure categories. Values are shared with the C API (elb_status).
enum class ErrorCode : int {
  ok = 0,
  domain = 1,         // parameter outside its admissible range
  compatibility = 2,  // data violate a solvability condition (mass balance)
  numeric = 3,        // iteration or quadrature failed to converge
  geometry = 4,       // shapes do not fit the grid / clearance violated
  resolution = 5,     // grid too coarse for the requested construction
  dimension = 6,      // array shape mismatch
  io = 7,             // file cannot be read or written
  format = 8,         // malformed input text or binary
  precondition = 9,   // other violated precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace elbranch
