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
#ifndef UATRAJ_OPTIMIZER_HPP_
#define UATRAJ_OPTIMIZER_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "uatraj/belief.hpp"
#include "uatraj/geometry.hpp"
#include "uatraj/lbfgs.hpp"
#include "uatraj/noise_models.hpp"
#include "uatraj/trajectory.hpp"

namespace uatraj {

enum class GradientMode { kAnalytic, kFiniteDifference };

struct OptimizerConfig {
  int max_iterations = 50;
  int history_size = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
  double initial_step = 1e-2;
  LineSearchKind line_search = LineSearchKind::kStrongWolfe;
  GradientMode gradient_mode = GradientMode::kAnalytic;
  double fd_step = 1e-6;
  double convergence_threshold = 1e-8;
  bool pose_loss = true;
  // A clipping-action group (translation or rotation) shorter than this is
  // snapped to zero, the kink of the pose loss, when that lowers the loss.
  double pin_tolerance = 1e-8;

  void validate() const;
};

// Everything the objective depends on besides the waypoints.
struct PlanningProblem {
  CameraSchedule cameras;
  NoiseConfig noise;
  AblationMask mask;
  Belief prior;
  PropagateOptions propagation;
  bool pose_loss = true;  // combined with mask.use_pose_loss

  bool pose_loss_active() const { return pose_loss && mask.use_pose_loss; }
};

struct LossBreakdown {
  double trace = 0.0;
  double pose_position = 0.0;
  double pose_orientation = 0.0;
  double total = 0.0;
};

// Tr(Sigma_{T|T}) plus, when enabled, |p_T - p_{T-1}| + A(o_{T-1}, o_T).
LossBreakdown loss(const Trajectory& traj, const PlanningProblem& problem);

// Same, for an already propagated trace.
LossBreakdown loss_from_trace(const Trajectory& traj, const BeliefTrace& trace,
                              bool pose_loss);

// Gradient of the total loss per waypoint; entries 0 and T are zero since
// the endpoints are fixed. Throws Error(kNonFiniteGradient).
std::vector<Vector6d> gradient(const Trajectory& traj,
                               const PlanningProblem& problem,
                               GradientMode mode = GradientMode::kAnalytic,
                               double fd_step = 1e-6);

// Adjoint pass through the propagation; fills `grad` per waypoint.
LossBreakdown loss_and_gradient(const Trajectory& traj,
                                const PlanningProblem& problem,
                                std::vector<Vector6d>& grad);

// max_i |a_i - b_i| / max(max_i |b_i|, tiny).
double max_relative_error(const std::vector<Vector6d>& a,
                          const std::vector<Vector6d>& b);

// Decision variables: the inter-waypoint differences x_t - x_{t-1} for
// t = 1..T-2, then the clipping action x_T - x_{T-1}; x_{T-1} is goal minus
// the clipping action. Keeping the clipping action as its own block makes
// the pose loss depend on the last six coordinates only.
Eigen::VectorXd to_decision_vector(const Trajectory& traj);
Trajectory from_decision_vector(const Eigen::VectorXd& z, const Pose& start,
                                const Pose& goal);

struct IterationRecord {
  int iteration = 0;
  LossBreakdown loss;
  double gradient_norm = 0.0;
  double step = 0.0;
  bool fallback = false;
};

struct OptimizeResult {
  Trajectory trajectory;
  std::vector<IterationRecord> history;  // entry 0 is the initial trajectory
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
  bool line_search_failure = false;

  const LossBreakdown& initial_loss() const { return history.front().loss; }
  const LossBreakdown& final_loss() const { return history.back().loss; }
};

// Minimizes the loss over the free waypoints; start and goal are copied
// bit-exactly into the result.
OptimizeResult optimize(const Trajectory& initial,
                        const PlanningProblem& problem,
                        const OptimizerConfig& opt);

}  // namespace uatraj

#endif  // UATRAJ_OPTIMIZER_HPP_
