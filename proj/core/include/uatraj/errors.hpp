// Copyright 2026 The uatraj Authors.
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

#ifndef UATRAJ_ERRORS_HPP_
#define UATRAJ_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uatraj {

enum class ErrorCode {
  kNonPositiveDepth,
  kSingularInnovation,
  kNonPositiveDefinite,
  kNonFiniteGradient,
  kLineSearchFailure,
  kRejectionLimit,
  kZeroBaseline,
  kSignMismatch,
  kInvalidArgument,
  kConfig,
};

const char* to_string(ErrorCode code);

// All library failures are reported through this type. `step` carries the
// offending timestep index for propagation errors, or -1 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int step = -1);

  ErrorCode code() const { return code_; }
  int step() const { return step_; }

  // Same error, annotated with a timestep.
  Error at_step(int step) const;

 private:
  ErrorCode code_;
  int step_;
};

}  // namespace uatraj

#endif  // UATRAJ_ERRORS_HPP_
