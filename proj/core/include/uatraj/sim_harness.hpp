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
#ifndef UATRAJ_SIM_HARNESS_HPP_
#define UATRAJ_SIM_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uatraj/belief.hpp"
#include "uatraj/geometry.hpp"
#include "uatraj/noise_models.hpp"
#include "uatraj/optimizer.hpp"
#include "uatraj/trajectory.hpp"

namespace uatraj {

using Rng = std::mt19937_64;

// Independent stream for (master seed, a, b). Used per scenario and per
// trial so that serial and parallel runs draw identical numbers.
Rng make_rng(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0);

struct Scenario {
  Pose start;
  Pose goal;
  CameraSchedule cameras;
  NoiseConfig noise;
  Belief prior;
  int horizon = 10;
  std::uint64_t seed = 0;
  PropagateOptions propagation;

  // Start and goal in front of every scheduled camera, T >= 1.
  void validate() const;

  PlanningProblem problem(const AblationMask& mask = AblationMask::full(),
                          bool pose_loss = true) const;
};

// Prior covariance 1e-2 I centred on the start pose.
Belief default_prior(const Pose& start);

// Straight-line positions, geodesic orientations, exact endpoints.
Trajectory make_baseline(const Scenario& scenario);

struct SamplingBounds {
  // Axis-aligned box in the camera frame.
  Vector3d workspace_center{0.0, 0.0, 0.2};
  double workspace_size = 0.3;
  double min_depth = 0.05;
  double max_depth = 0.40;
  // Tool rotation angle range (radians); axes are uniform on the sphere.
  double min_tool_angle = 0.0;
  double max_tool_angle = 1.0;
  // Camera pose: position uniform in a cube of this half-width around the
  // origin, rotation angle uniform up to camera_angle_range.
  double camera_position_range = 0.02;
  double camera_angle_range = 0.3;
  CameraModel intrinsics;
  // When false, o* is drawn uniformly on the unit sphere (camera frame)
  // instead of being the goal orientation seen from the goal-step camera.
  bool o_star_from_goal = false;
  // Noise for every sampled scenario. o_star is replaced per scenario as
  // above unless fixed_o_star is set.
  NoiseConfig noise;
  std::optional<Vector3d> fixed_o_star;
  int horizon = 20;
  int max_attempts = 1000;
};

// Throws Error(kRejectionLimit) if no point passes the frustum test in
// max_attempts draws.
Scenario sample_scenario(Rng& rng, const SamplingBounds& bounds,
                         std::uint64_t seed = 0);

struct RolloutRow {
  double position_error = 0.0;     // |p_T - p_G|, meters
  double orientation_error = 0.0;  // geodesic, radians
  double trace = 0.0;              // Tr(Sigma_{T|T}) tracked by the filter
  double entropy = 0.0;            // NaN if Sigma_{T|T} is not PD
  Vector6d estimation_error = Vector6d::Zero();  // x_T - mu_{T|T}
  bool ok = true;
  std::string failure;
};

struct RolloutResult {
  RolloutRow row;
  BeliefTrace trace;
  std::vector<Vector6d> true_states;  // x_0 .. x_T
};

struct RolloutOptions {
  // When false, motion and observation draws are zero; covariances are
  // still evaluated. Used to compare against the ML propagation.
  bool sample_noise = true;
  // Draw x_0 from the prior instead of starting exactly at the start pose.
  // Needed for covariance-consistency checks; off for planning experiments
  // since a 0.1 m prior spread routinely puts the tool behind the camera.
  bool sample_initial_state = false;
};

// Noisy execution: intermediate steps apply the planned relative motions,
// the last step is the clipping action from the tracked mean to the goal.
// The true state receives w ~ N(0, W_t); observations are the true state plus
// v ~ N(0, V_t(true)); the filter evaluates V_t at its predicted mean.
RolloutResult rollout_noisy(const Trajectory& traj, const Scenario& scenario,
                            Rng& rng, const NoiseModel& noise,
                            const RolloutOptions& options = {});
RolloutResult rollout_noisy(const Trajectory& traj, const Scenario& scenario,
                            Rng& rng, const RolloutOptions& options = {});

struct RolloutReport {
  std::vector<RolloutRow> trials;
  double position_mean = 0.0;
  double position_std = 0.0;
  double orientation_mean = 0.0;
  double orientation_std = 0.0;
  double trace_mean = 0.0;
  double entropy_mean = 0.0;
  double ml_trace = 0.0;
  double ml_entropy = 0.0;
  int failures = 0;
};

// Aggregates over the successful trials.
RolloutReport summarize(std::vector<RolloutRow> trials, double ml_trace,
                        double ml_entropy);

// y/b for positive metrics, 1 - (y - b)/b for negative ones (entropy).
// Throws Error(kZeroBaseline) or Error(kSignMismatch).
double relative_scale(double y, double b);

struct Variant {
  std::string name;
  AblationMask mask;
  bool optimize = true;
};

// "baseline", "all", "no_pose_loss", "no_depth", "no_fov", "no_orientation".
Variant variant_by_name(const std::string& name);
std::vector<Variant> standard_suite();
const std::vector<std::string>& standard_variant_names();

enum Metric : int {
  kPositionMean = 0,
  kPositionStd,
  kOrientationMean,
  kOrientationStd,
  kTraceNoisy,
  kTraceMl,
  kEntropyNoisy,
  kEntropyMl,
  kMetricCount,
};
const char* metric_name(int metric);

using MetricRow = std::array<double, kMetricCount>;

struct VariantOutcome {
  Trajectory trajectory;
  BeliefTrace ml_trace;
  double ml_trace_value = 0.0;
  double ml_entropy = 0.0;
  std::vector<RolloutRow> trials;
  LossBreakdown initial_loss;
  LossBreakdown final_loss;
  int iterations = 0;
  std::vector<IterationRecord> history;  // empty for non-optimized variants
  bool line_search_failure = false;
};

struct ScenarioOutcome {
  int index = 0;
  Scenario scenario;
  bool ok = true;
  std::string failure;
  std::vector<VariantOutcome> variants;  // parallel to the suite
};

struct AblationOptions {
  int n_scenarios = 20;
  int n_rollouts = 20;
  std::vector<Variant> suite = standard_suite();
  OptimizerConfig optimizer;
  double worst_case_factor = 1.0;
  std::uint64_t seed = 0;
  int parallel = 1;
  SamplingBounds bounds;
};

struct AblationResult {
  std::vector<Variant> suite;
  std::vector<ScenarioOutcome> scenarios;
  std::vector<MetricRow> raw;       // per variant
  std::vector<MetricRow> relative;  // per variant, against the first
                                    // non-optimized variant
  int failed_scenarios = 0;
  int baseline_index = 0;

  int variant_index(const std::string& name) const;  // -1 if absent
};

// Evaluates each variant on n_scenarios sampled scenarios with n_rollouts
// noisy rollouts under the full noise model. A scenario in which any variant
// fails is excluded from the aggregates and counted.
AblationResult run_ablation(const AblationOptions& options);

// Optimizes one sampled scenario for every variant and rolls it out.
ScenarioOutcome evaluate_scenario(const Scenario& scenario, int index,
                                  const AblationOptions& options);

// Re-plans the remainder of `traj` from `step` using the ML belief reached at
// that step as start and prior. The prefix is returned unchanged.
Trajectory reoptimize_on_camera_change(const Trajectory& traj,
                                       const Scenario& scenario, int step,
                                       const OptimizerConfig& opt,
                                       const AblationMask& mask =
                                           AblationMask::full());

}  // namespace uatraj

#endif  // UATRAJ_SIM_HARNESS_HPP_
