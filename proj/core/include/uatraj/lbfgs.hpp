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
#ifndef UATRAJ_LBFGS_HPP_
#define UATRAJ_LBFGS_HPP_

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace uatraj {

// Objective callback: returns f(x) and writes the gradient. Returning +inf
// marks x as infeasible; the gradient is then ignored.
using Objective = std::function<double(const Eigen::VectorXd& x,
                                       Eigen::VectorXd& grad)>;

enum class LineSearchKind {
  kStrongWolfe,
  // Bisection on the weak Wolfe conditions. Well-defined across kinks,
  // where the strong curvature condition can be unattainable.
  kWeakWolfe,
};

struct LbfgsParams {
  int max_iterations = 50;
  int history_size = 10;
  double c1 = 1e-4;               // sufficient decrease
  double c2 = 0.9;                // curvature
  LineSearchKind line_search = LineSearchKind::kStrongWolfe;
  int max_line_search = 40;
  double initial_step = 1e-2;     // infinity-norm of the first trial step
  double relative_tolerance = 1e-8;
  double gradient_tolerance = 1e-14;
};

struct LbfgsIteration {
  int iteration = 0;
  double value = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
  bool fallback = false;  // accepted by the backtracking fallback
  Eigen::VectorXd x;
};

enum class LbfgsStatus {
  kMaxIterations,
  kConverged,        // relative decrease below tolerance
  kStationary,       // gradient below tolerance
  kLineSearchFailure,
  kInfeasibleStart,
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  std::vector<LbfgsIteration> history;  // entry 0 is the starting point
};

// Called after each accepted iterate. May rewrite x to a point whose
// objective is no higher; return true if it did, which re-evaluates f and
// clears the curvature history.
using IterateHook = std::function<bool(Eigen::VectorXd& x)>;

// L-BFGS with a Wolfe line search. When the line search fails, one
// backtracking step along the negative gradient is tried before giving up.
// Every accepted iterate strictly decreases the objective.
LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                           const LbfgsParams& params,
                           const IterateHook& hook = nullptr);

const char* to_string(LbfgsStatus status);

}  // namespace uatraj

#endif  // UATRAJ_LBFGS_HPP_
