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

#include <cmath>

#include <gtest/gtest.h>

#include "uatraj/errors.hpp"
#include "uatraj/sim_harness.hpp"

namespace uatraj {
namespace {

Scenario simple_scenario(int T = 10) {
  Scenario sc;
  sc.cameras = CameraSchedule(CameraModel{});
  sc.start = Pose(Vector3d(-0.04, 0.02, 0.14), Vector3d(0.2, -0.1, 0.4));
  sc.goal = Pose(Vector3d(0.05, -0.03, 0.26), Vector3d(-0.3, 0.5, 0.1));
  sc.horizon = T;
  sc.noise.o_star = default_o_star(sc.goal, sc.cameras.at(0));
  sc.prior = default_prior(sc.start);
  return sc;
}

TEST(Baseline, Examples) {
  Scenario sc = simple_scenario(4);
  sc.start = Pose(Vector3d(0, 0, 0.1), Vector3d(0.1, 0.2, 0.3));
  sc.goal = Pose(Vector3d(0.2, 0, 0.1), Vector3d(-0.2, 0.1, 0.5));
  const Trajectory t = make_baseline(sc);
  ASSERT_EQ(t.horizon(), 4);
  const double xs[] = {0.0, 0.05, 0.10, 0.15, 0.20};
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(t.waypoints[i].position.x(), xs[i], 1e-15);
  EXPECT_EQ(t.waypoints.front(), sc.start);
  EXPECT_EQ(t.waypoints.back(), sc.goal);
  EXPECT_NEAR(t.path_length(), (sc.goal.position - sc.start.position).norm(), 1e-15);
  // Geodesic orientation steps of equal size.
  const double step = angle_between(t.waypoints[0].orientation, t.waypoints[1].orientation);
  for (int i = 1; i < 4; ++i) {
    EXPECT_NEAR(angle_between(t.waypoints[i].orientation, t.waypoints[i + 1].orientation),
                step, 1e-12);
  }

  sc.goal = sc.start;
  for (const Pose& p : make_baseline(sc).waypoints) EXPECT_EQ(p, sc.start);
}

TEST(Scenario, Validate) {
  Scenario sc = simple_scenario();
  EXPECT_NO_THROW(sc.validate());
  sc.goal.position.z() = -0.1;
  EXPECT_THROW(sc.validate(), Error);
  sc = simple_scenario();
  sc.horizon = 0;
  EXPECT_THROW(sc.validate(), Error);
  EXPECT_EQ(default_prior(sc.start).covariance, 1e-2 * Matrix6d::Identity());
}

TEST(SampleScenario, DeterministicAndBounded) {
  const SamplingBounds bounds;
  for (int i = 0; i < 200; ++i) {
    Rng a = make_rng(5, i, 0), b = make_rng(5, i, 0);
    const Scenario s1 = sample_scenario(a, bounds, 5);
    const Scenario s2 = sample_scenario(b, bounds, 5);
    EXPECT_EQ(s1.start, s2.start);
    EXPECT_EQ(s1.goal, s2.goal);
    EXPECT_EQ(s1.noise.o_star, s2.noise.o_star);
    EXPECT_EQ(s1.seed, 5u);
    EXPECT_EQ(s1.horizon, bounds.horizon);
    const CameraModel& cam = s1.cameras.at(0);
    for (const Pose& p : {s1.start, s1.goal}) {
      const double d = camera_depth(cam, p.position);
      EXPECT_GE(d, 0.05);
      EXPECT_LE(d, 0.40);
      EXPECT_TRUE(cam.in_frustum(p.position));
      EXPECT_GE(p.orientation.norm(), bounds.min_tool_angle - 1e-12);
      EXPECT_LE(p.orientation.norm(), bounds.max_tool_angle + 1e-12);
    }
    EXPECT_NO_THROW(s1.validate());
  }
  Rng a = make_rng(5, 0, 0), b = make_rng(6, 0, 0);
  EXPECT_NE(sample_scenario(a, bounds).start, sample_scenario(b, bounds).start);
}

TEST(SampleScenario, OStarModes) {
  SamplingBounds bounds;
  bounds.o_star_from_goal = true;
  Rng rng = make_rng(8, 0, 0);
  const Scenario s = sample_scenario(rng, bounds);
  EXPECT_TRUE(s.noise.o_star.isApprox(default_o_star(s.goal, s.cameras.at(0)), 1e-12));
  bounds.fixed_o_star = Vector3d(0.0, 1.0, 0.0);
  rng = make_rng(8, 0, 0);
  EXPECT_EQ(sample_scenario(rng, bounds).noise.o_star, Vector3d(0.0, 1.0, 0.0));
  bounds.noise.d_star = 0.2;
  rng = make_rng(8, 0, 0);
  EXPECT_EQ(sample_scenario(rng, bounds).noise.d_star, 0.2);
}

TEST(SampleScenario, RejectionLimit) {
  SamplingBounds bounds;
  bounds.workspace_center = Vector3d(5.0, 0.0, 0.2);  // far outside the view
  bounds.workspace_size = 0.01;
  Rng rng = make_rng(1, 0, 0);
  try {
    sample_scenario(rng, bounds);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRejectionLimit);
  }
}

TEST(MakeRng, IndependentStreams) {
  Rng a = make_rng(1, 2, 3), b = make_rng(1, 2, 3), c = make_rng(1, 3, 2),
      d = make_rng(2, 2, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(Rollout, NoiselessMatchesMaximumLikelihood) {
  const Scenario sc = simple_scenario();
  const Trajectory t = make_baseline(sc);
  RolloutOptions opts;
  opts.sample_noise = false;
  Rng rng = make_rng(1, 0, 1);
  const RolloutResult r = rollout_noisy(t, sc, rng, opts);
  EXPECT_LT(r.row.position_error, 1e-15);
  EXPECT_LT(r.row.orientation_error, 1e-7);
  const double ml = propagate(t, sc.cameras, sc.noise, AblationMask::full(), sc.prior)
                        .final_belief().covariance.trace();
  EXPECT_NEAR(r.row.trace, ml, 1e-15);
  EXPECT_EQ(r.true_states.size(), t.waypoints.size());
}

TEST(Rollout, DeterministicPerSeed) {
  const Scenario sc = simple_scenario();
  const Trajectory t = make_baseline(sc);
  Rng a = make_rng(4, 1, 1), b = make_rng(4, 1, 1), c = make_rng(4, 1, 2);
  const RolloutRow r1 = rollout_noisy(t, sc, a).row;
  const RolloutRow r2 = rollout_noisy(t, sc, b).row;
  const RolloutRow r3 = rollout_noisy(t, sc, c).row;
  EXPECT_EQ(r1.position_error, r2.position_error);
  EXPECT_EQ(r1.orientation_error, r2.orientation_error);
  EXPECT_EQ(r1.trace, r2.trace);
  EXPECT_EQ(r1.entropy, r2.entropy);
  EXPECT_NE(r1.position_error, r3.position_error);
  EXPECT_TRUE(r1.ok);
  EXPECT_GT(r1.position_error, 0.0);
}

// Monte Carlo oracle for the filter: with frozen W and V the empirical
// covariance of the tracking error matches the propagated covariance.
TEST(Rollout, MonteCarloMatchesPropagatedCovariance) {
  Scenario sc = simple_scenario(6);
  sc.start.position.z() = 0.3;
  sc.prior = default_prior(sc.start);
  Matrix6d w = 2e-4 * Matrix6d::Identity();
  w(0, 1) = w(1, 0) = 5e-5;
  const Matrix6d v = 5e-4 * Matrix6d::Identity();
  const FrozenNoise noise(w, v);
  const Trajectory t = make_baseline(sc);
  const Matrix6d ml = propagate(t, sc.cameras, noise, sc.prior).final_belief().covariance;

  RolloutOptions opts;
  opts.sample_initial_state = true;
  constexpr int kN = 10000;
  Matrix6d acc = Matrix6d::Zero();
  Vector6d mean = Vector6d::Zero();
  std::vector<Vector6d> errs;
  errs.reserve(kN);
  for (int k = 0; k < kN; ++k) {
    Rng rng = make_rng(12, 0, k + 1);
    errs.push_back(rollout_noisy(t, sc, rng, noise, opts).row.estimation_error);
    mean += errs.back();
  }
  mean /= kN;
  for (const Vector6d& e : errs) acc += (e - mean) * (e - mean).transpose();
  const Matrix6d emp = acc / (kN - 1);
  EXPECT_LT(std::abs(emp.trace() - ml.trace()) / ml.trace(), 0.05);
  EXPECT_LT(mean.norm(), 3.0 * std::sqrt(ml.trace() / kN) + 1e-12);
}

TEST(RelativeScale, Examples) {
  EXPECT_EQ(relative_scale(0.3, 0.3), 1.0);
  EXPECT_EQ(relative_scale(-4.0, -4.0), 1.0);
  EXPECT_EQ(relative_scale(0.5, 1.0), 0.5);
  EXPECT_EQ(relative_scale(-2.0, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_scale(-0.5, -1.0), 1.5);
  try {
    relative_scale(1.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroBaseline);
  }
  try {
    relative_scale(1.0, -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSignMismatch);
  }
}

TEST(Summarize, RecomputableFromRows) {
  std::vector<RolloutRow> rows(4);
  const double pos[] = {1.0, 2.0, 3.0, 10.0};
  for (int i = 0; i < 4; ++i) {
    rows[i].position_error = pos[i];
    rows[i].orientation_error = 0.1 * pos[i];
    rows[i].trace = pos[i];
    rows[i].entropy = -pos[i];
  }
  rows[3].ok = false;
  const RolloutReport r = summarize(rows, 0.5, -3.0);
  EXPECT_EQ(r.failures, 1);
  EXPECT_DOUBLE_EQ(r.position_mean, 2.0);
  EXPECT_DOUBLE_EQ(r.position_std, std::sqrt(2.0 / 3.0));
  EXPECT_DOUBLE_EQ(r.orientation_mean, 0.2);
  EXPECT_DOUBLE_EQ(r.entropy_mean, -2.0);
  EXPECT_EQ(r.ml_trace, 0.5);
  EXPECT_EQ(r.trials.size(), 4u);
}

TEST(Variants, Names) {
  EXPECT_EQ(standard_suite().size(), 6u);
  EXPECT_FALSE(variant_by_name("baseline").optimize);
  EXPECT_TRUE(variant_by_name("all").optimize);
  EXPECT_FALSE(variant_by_name("no_pose_loss").mask.use_pose_loss);
  EXPECT_FALSE(variant_by_name("no_depth").mask.use_depth);
  EXPECT_FALSE(variant_by_name("no_fov").mask.use_fov);
  EXPECT_FALSE(variant_by_name("no_orientation").mask.use_orientation);
  try {
    variant_by_name("no_magic");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Ablation, BaselineOnlyIsSelfRelative) {
  AblationOptions o;
  o.n_scenarios = 2;
  o.n_rollouts = 3;
  o.suite = {variant_by_name("baseline")};
  const AblationResult r = run_ablation(o);
  ASSERT_EQ(r.relative.size(), 1u);
  for (double v : r.relative[0]) EXPECT_EQ(v, 1.0);
}

TEST(Ablation, MasksNeverReachTheRollouts) {
  AblationOptions o;
  o.n_scenarios = 2;
  o.n_rollouts = 4;
  o.suite = {variant_by_name("baseline"), Variant{"masked", AblationMask::none(), false}};
  const AblationResult r = run_ablation(o);
  for (const ScenarioOutcome& sc : r.scenarios) {
    ASSERT_EQ(sc.variants.size(), 2u);
    EXPECT_EQ(sc.variants[0].ml_trace_value, sc.variants[1].ml_trace_value);
    for (size_t k = 0; k < sc.variants[0].trials.size(); ++k) {
      EXPECT_EQ(sc.variants[0].trials[k].position_error,
                sc.variants[1].trials[k].position_error);
      EXPECT_EQ(sc.variants[0].trials[k].trace, sc.variants[1].trials[k].trace);
    }
  }
  for (double v : r.relative[1]) EXPECT_EQ(v, 1.0);
}

TEST(Ablation, ParallelMatchesSerial) {
  AblationOptions o;
  o.n_scenarios = 4;
  o.n_rollouts = 3;
  o.suite = {variant_by_name("baseline"), variant_by_name("all")};
  const AblationResult serial = run_ablation(o);
  o.parallel = 3;
  const AblationResult parallel = run_ablation(o);
  for (size_t v = 0; v < serial.raw.size(); ++v) {
    for (int m = 0; m < kMetricCount; ++m) {
      EXPECT_EQ(serial.raw[v][m], parallel.raw[v][m]);
    }
  }
}

TEST(Ablation, FailuresAreCountedNotDropped) {
  AblationOptions o;
  o.n_scenarios = 3;
  o.n_rollouts = 5;
  o.suite = {variant_by_name("baseline")};
  o.bounds.noise.w_pos0 = 400.0 * Matrix6d::Identity();  // steps scatter ~60%
  const AblationResult r = run_ablation(o);
  EXPECT_GT(r.failed_scenarios, 0);
  int flagged = 0;
  for (const ScenarioOutcome& sc : r.scenarios) {
    if (!sc.ok) {
      ++flagged;
      EXPECT_FALSE(sc.failure.empty());
    }
  }
  EXPECT_EQ(flagged, r.failed_scenarios);
}

class DeskAblation : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    AblationOptions o;
    o.n_scenarios = 20;
    o.n_rollouts = 20;
    o.seed = 1;
    result_ = new AblationResult(run_ablation(o));
  }
  static void TearDownTestSuite() { delete result_; }
  static AblationResult* result_;
};
AblationResult* DeskAblation::result_ = nullptr;

TEST_F(DeskAblation, OptimizedTraceNeverAboveBaseline) {
  const int all = result_->variant_index("all");
  const int base = result_->variant_index("baseline");
  for (const ScenarioOutcome& sc : result_->scenarios) {
    if (sc.variants[all].ml_trace.steps.empty()) continue;
    EXPECT_LE(sc.variants[all].ml_trace_value, sc.variants[base].ml_trace_value)
        << "scenario " << sc.index;
  }
}

TEST_F(DeskAblation, NoisyTraceTrendFollowsMaximumLikelihood) {
  for (size_t v = 0; v < result_->suite.size(); ++v) {
    const MetricRow& rel = result_->relative[v];
    EXPECT_EQ(rel[kTraceNoisy] < 1.0, rel[kTraceMl] < 1.0) << result_->suite[v].name;
  }
}

TEST_F(DeskAblation, AggregatesRecomputable) {
  const int all = result_->variant_index("all");
  double sum = 0.0;
  int n = 0;
  for (const ScenarioOutcome& sc : result_->scenarios) {
    if (!sc.ok) continue;
    sum += sc.variants[all].ml_trace_value;
    ++n;
  }
  EXPECT_EQ(n + result_->failed_scenarios, 20);
  EXPECT_NEAR(result_->raw[all][kTraceMl], sum / n, 1e-15);
}

TEST(Reoptimize, UnchangedCameraKeepsStationarySuffix) {
  // A noise-free problem without pose loss is flat, so every trajectory is
  // converged and re-planning must hand it back untouched.
  Scenario sc = simple_scenario();
  sc.noise.w_pos0.setZero();
  sc.noise.w_ori0.setZero();
  Trajectory t = make_baseline(sc);
  t.waypoints[5].position += Vector3d(0.01, -0.01, 0.02);
  const Trajectory r =
      reoptimize_on_camera_change(t, sc, 4, OptimizerConfig{}, AblationMask::none());
  ASSERT_EQ(r.waypoints.size(), t.waypoints.size());
  for (size_t i = 0; i < t.waypoints.size(); ++i) {
    EXPECT_LT((r.waypoints[i].vector() - t.waypoints[i].vector()).norm(), 1e-12) << i;
  }
  EXPECT_EQ(r.waypoints.back(), sc.goal);
}

TEST(Reoptimize, UnchangedCameraNeverRaisesLoss) {
  const Scenario sc = simple_scenario();
  const Trajectory t =
      optimize(make_baseline(sc), sc.problem(), OptimizerConfig{}).trajectory;
  const Trajectory r = reoptimize_on_camera_change(t, sc, 4, OptimizerConfig{});
  ASSERT_EQ(r.waypoints.size(), t.waypoints.size());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(r.waypoints[i], t.waypoints[i]);
  EXPECT_EQ(r.waypoints.back(), sc.goal);
  EXPECT_LE(loss(r, sc.problem()).total, loss(t, sc.problem()).total * (1 + 1e-12));
}

TEST(Reoptimize, CameraJumpDoesNotRaiseTrace) {
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(static_cast<std::uint64_t>(seed), 0, 0);
    SamplingBounds bounds;
    Scenario sc = sample_scenario(rng, bounds);
    const Trajectory planned = optimize(make_baseline(sc), sc.problem(), OptimizerConfig{}).trajectory;
    // The camera shifts and turns slightly at mid-horizon.
    CameraModel moved = sc.cameras.at(0);
    moved.pose.position += Vector3d(0.01, -0.005, -0.01);
    moved.pose.orientation += Vector3d(0.05, -0.04, 0.02);
    const int step = sc.horizon / 2;
    sc.cameras = CameraSchedule({{0, sc.cameras.at(0)}, {step, moved}});
    bool visible = true;
    for (const Pose& p : planned.waypoints) visible = visible && camera_depth(moved, p.position) > 0.0;
    if (!visible) continue;
    const Trajectory replanned = reoptimize_on_camera_change(planned, sc, step, OptimizerConfig{});
    EXPECT_EQ(replanned.waypoints.back(), sc.goal);
    auto ml = [&](const Trajectory& t) {
      return propagate(t, sc.cameras, sc.noise, AblationMask::full(), sc.prior)
          .final_belief().covariance.trace();
    };
    EXPECT_LE(ml(replanned), ml(planned)) << "seed " << seed;
  }
}

TEST(Reoptimize, RejectsBadStep) {
  const Scenario sc = simple_scenario();
  EXPECT_THROW(reoptimize_on_camera_change(make_baseline(sc), sc, 10, OptimizerConfig{}), Error);
}

}  // namespace
}  // namespace uatraj
