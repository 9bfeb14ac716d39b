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
#include "uatraj/errors.hpp"

namespace uatraj {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kSingularInnovation: return "SingularInnovation";
    case ErrorCode::kNonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kLineSearchFailure: return "LineSearchFailure";
    case ErrorCode::kRejectionLimit: return "RejectionLimit";
    case ErrorCode::kZeroBaseline: return "ZeroBaseline";
    case ErrorCode::kSignMismatch: return "SignMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, int step)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      step_(step) {}

Error Error::at_step(int step) const {
  std::string msg = what();
  // Strip the "<Code>: " prefix added by the constructor.
  const std::string prefix = std::string(to_string(code_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  if (step_ < 0) msg += " (step " + std::to_string(step) + ")";
  return Error(code_, msg, step_ < 0 ? step : step_);
}

}  // namespace uatraj
