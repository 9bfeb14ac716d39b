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

#ifndef UATRAJ_CLI_CLI_HPP_
#define UATRAJ_CLI_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace uatraj::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kOptimizationFailure = 3,
  kGradientMismatch = 4,
};

// args excludes the program name. Diagnostics go to `err`, results to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace uatraj::cli

#endif  // UATRAJ_CLI_CLI_HPP_
