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
#include "uatraj/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "uatraj/errors.hpp"

namespace uatraj {
namespace {

Vector6d sample_gaussian(const Matrix6d& cov, Rng& rng) {
  if (cov.isZero(0.0)) return Vector6d::Zero();
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(0.5 * (cov + cov.transpose()));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector6d n;
  for (int i = 0; i < 6; ++i) n(i) = normal(rng);
  const Vector6d scale = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * scale.cwiseProduct(n);
}

Vector3d random_axis(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector3d v;
  do {
    v = Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

Rng make_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(master),
                    static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

void Scenario::validate() const {
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  }
  if (!start.is_finite() || !goal.is_finite()) {
    throw Error(ErrorCode::kInvalidArgument, "start/goal must be finite");
  }
  for (const auto& [step, cam] : cameras.entries()) {
    cam.validate();
    if (!(camera_depth(cam, start.position) > 0.0) ||
        !(camera_depth(cam, goal.position) > 0.0)) {
      throw Error(ErrorCode::kNonPositiveDepth,
                  "start or goal behind the camera scheduled at step " +
                      std::to_string(step));
    }
  }
  noise.validate();
  if (!prior.mean.allFinite() || !prior.covariance.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "prior must be finite");
  }
}

PlanningProblem Scenario::problem(const AblationMask& mask,
                                  bool pose_loss) const {
  PlanningProblem p;
  p.cameras = cameras;
  p.noise = noise;
  p.mask = mask;
  p.prior = prior;
  p.propagation = propagation;
  p.pose_loss = pose_loss;
  return p;
}

Belief default_prior(const Pose& start) {
  return Belief(start.vector(), 1e-2 * Matrix6d::Identity());
}

Trajectory make_baseline(const Scenario& scenario) {
  if (scenario.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  }
  const int T = scenario.horizon;
  Trajectory traj;
  traj.waypoints.reserve(T + 1);
  traj.waypoints.push_back(scenario.start);
  for (int k = 1; k < T; ++k) {
    const double s = static_cast<double>(k) / T;
    traj.waypoints.emplace_back(
        scenario.start.position + s * (scenario.goal.position - scenario.start.position),
        interpolate_orientation(scenario.start.orientation,
                                scenario.goal.orientation, s));
  }
  traj.waypoints.push_back(scenario.goal);
  return traj;
}

Scenario sample_scenario(Rng& rng, const SamplingBounds& bounds,
                         std::uint64_t seed) {
  Scenario sc;
  sc.seed = seed;
  sc.horizon = bounds.horizon;

  CameraModel cam = bounds.intrinsics;
  const double r = bounds.camera_position_range;
  cam.pose.position = Vector3d(uniform(rng, -r, r), uniform(rng, -r, r),
                               uniform(rng, -r, r));
  cam.pose.orientation =
      uniform(rng, 0.0, bounds.camera_angle_range) * random_axis(rng);
  cam.validate();

  const double half = 0.5 * bounds.workspace_size;
  auto sample_position = [&]() -> Vector3d {
    for (int i = 0; i < bounds.max_attempts; ++i) {
      const Vector3d pc =
          bounds.workspace_center +
          Vector3d(uniform(rng, -half, half), uniform(rng, -half, half),
                   uniform(rng, -half, half));
      if (pc.z() < bounds.min_depth || pc.z() > bounds.max_depth) continue;
      const Vector3d pw = cam.to_world_frame(pc);
      if (cam.in_frustum(pw)) return pw;
    }
    throw Error(ErrorCode::kRejectionLimit,
                "no in-frustum sample after " +
                    std::to_string(bounds.max_attempts) + " attempts");
  };
  auto sample_orientation = [&]() -> Vector3d {
    return uniform(rng, bounds.min_tool_angle, bounds.max_tool_angle) *
           random_axis(rng);
  };

  sc.start = Pose(sample_position(), sample_orientation());
  sc.goal.position = sample_position();
  for (int i = 0;; ++i) {
    sc.goal.orientation = sample_orientation();
    if (default_o_star(sc.goal, cam).norm() > 1e-6) break;
    if (i >= bounds.max_attempts) {
      throw Error(ErrorCode::kRejectionLimit,
                  "goal orientation coincides with the camera");
    }
  }
  sc.cameras = CameraSchedule(cam);
  sc.noise = bounds.noise;
  sc.noise.o_star = bounds.o_star_from_goal ? default_o_star(sc.goal, cam)
                                            : random_axis(rng);
  if (bounds.fixed_o_star) sc.noise.o_star = *bounds.fixed_o_star;
  sc.prior = default_prior(sc.start);
  return sc;
}

RolloutResult rollout_noisy(const Trajectory& traj, const Scenario& scenario,
                            Rng& rng, const NoiseModel& noise,
                            const RolloutOptions& options) {
  traj.validate();
  const int T = traj.horizon();
  const Pose& goal = traj.goal();
  auto draw = [&](const Matrix6d& cov) -> Vector6d {
    return options.sample_noise ? sample_gaussian(cov, rng) : Vector6d::Zero();
  };

  RolloutResult out;
  out.true_states.reserve(T + 1);
  Belief b = scenario.prior;
  b.mean = traj.start().vector();
  Vector6d truth = b.mean;
  if (options.sample_initial_state) truth += draw(b.covariance);
  out.true_states.push_back(truth);

  int t = 0;
  try {
    if (scenario.propagation.initial_update) {
      const CameraModel& cam = scenario.cameras.at(0);
      StepRecord rec;
      rec.predicted = b;
      const Vector6d z =
          truth + draw(noise.observation(Pose::from_vector(truth), cam));
      rec.obs_cov = noise.observation(Pose::from_vector(b.mean), cam);
      b = update(b, rec.obs_cov, z, &rec.gain);
      rec.updated = b;
      out.trace.initial = rec;
    }
    for (t = 1; t <= T; ++t) {
      const CameraModel& cam = scenario.cameras.at(t);
      // Intermediate actions replay the planned relative motion open-loop;
      // the last one is the clipping action from the tracked mean.
      const Pose from = t < T ? traj.waypoints[t - 1] : Pose::from_vector(b.mean);
      const Pose& to = traj.waypoints[t];
      StepRecord rec;
      rec.step = t;
      rec.motion_cov = noise.motion(from, to);
      truth += (to.vector() - from.vector()) + draw(rec.motion_cov);
      out.true_states.push_back(truth);
      rec.predicted = predict(b, from, to, rec.motion_cov);
      const Vector6d z =
          truth + draw(noise.observation(Pose::from_vector(truth), cam));
      rec.obs_cov = noise.observation(Pose::from_vector(rec.predicted.mean), cam);
      b = update(rec.predicted, rec.obs_cov, z, &rec.gain);
      rec.updated = b;
      out.trace.steps.push_back(rec);
    }
  } catch (const Error& e) {
    throw e.at_step(t);
  }

  const Pose final_true = Pose::from_vector(truth);
  RolloutRow& row = out.row;
  row.position_error = (final_true.position - goal.position).norm();
  row.orientation_error = angle_between(final_true.orientation, goal.orientation);
  row.trace = b.covariance.trace();
  row.estimation_error = truth - b.mean;
  try {
    row.entropy = entropy(b.covariance);
  } catch (const Error& e) {
    row.entropy = std::numeric_limits<double>::quiet_NaN();
    row.ok = false;
    row.failure = e.what();
  }
  return out;
}

RolloutResult rollout_noisy(const Trajectory& traj, const Scenario& scenario,
                            Rng& rng, const RolloutOptions& options) {
  const StateDependentNoise noise(scenario.noise, AblationMask::full());
  return rollout_noisy(traj, scenario, rng, noise, options);
}

RolloutReport summarize(std::vector<RolloutRow> trials, double ml_trace,
                        double ml_entropy) {
  RolloutReport rep;
  rep.trials = std::move(trials);
  rep.ml_trace = ml_trace;
  rep.ml_entropy = ml_entropy;
  std::vector<double> pos, ori, tr, ent;
  for (const RolloutRow& r : rep.trials) {
    if (!r.ok) {
      ++rep.failures;
      continue;
    }
    pos.push_back(r.position_error);
    ori.push_back(r.orientation_error);
    tr.push_back(r.trace);
    ent.push_back(r.entropy);
  }
  rep.position_mean = mean_of(pos);
  rep.position_std = std_of(pos);
  rep.orientation_mean = mean_of(ori);
  rep.orientation_std = std_of(ori);
  rep.trace_mean = mean_of(tr);
  rep.entropy_mean = mean_of(ent);
  return rep;
}

double relative_scale(double y, double b) {
  if (b == 0.0) {
    throw Error(ErrorCode::kZeroBaseline, "baseline metric is zero");
  }
  if (b > 0.0) {
    if (y < 0.0) {
      throw Error(ErrorCode::kSignMismatch, "metric and baseline differ in sign");
    }
    return y / b;
  }
  if (y > 0.0) {
    throw Error(ErrorCode::kSignMismatch, "metric and baseline differ in sign");
  }
  return 1.0 - (y - b) / b;
}

const std::vector<std::string>& standard_variant_names() {
  static const std::vector<std::string> names = {
      "baseline", "all", "no_pose_loss", "no_depth", "no_fov", "no_orientation"};
  return names;
}

Variant variant_by_name(const std::string& name) {
  Variant v;
  v.name = name;
  if (name == "baseline") {
    v.optimize = false;
  } else if (name == "all") {
  } else if (name == "no_pose_loss") {
    v.mask.use_pose_loss = false;
  } else if (name == "no_depth") {
    v.mask.use_depth = false;
  } else if (name == "no_fov") {
    v.mask.use_fov = false;
  } else if (name == "no_orientation") {
    v.mask.use_orientation = false;
  } else {
    throw Error(ErrorCode::kConfig, "unknown variant '" + name + "'");
  }
  return v;
}

std::vector<Variant> standard_suite() {
  std::vector<Variant> suite;
  for (const auto& n : standard_variant_names()) suite.push_back(variant_by_name(n));
  return suite;
}

const char* metric_name(int metric) {
  static const char* names[kMetricCount] = {
      "position_mean", "position_std", "orientation_mean", "orientation_std",
      "trace_noisy",   "trace_ml",     "entropy_noisy",    "entropy_ml"};
  return metric >= 0 && metric < kMetricCount ? names[metric] : "unknown";
}

int AblationResult::variant_index(const std::string& name) const {
  for (size_t i = 0; i < suite.size(); ++i) {
    if (suite[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

ScenarioOutcome evaluate_scenario(const Scenario& scenario, int index,
                                  const AblationOptions& options) {
  ScenarioOutcome out;
  out.index = index;
  out.scenario = scenario;
  out.variants.resize(options.suite.size());
  const Trajectory baseline = make_baseline(scenario);
  const NoiseConfig planning_noise =
      worst_case_scale(scenario.noise, options.worst_case_factor);
  const StateDependentNoise eval_noise(scenario.noise, AblationMask::full());

  for (size_t v = 0; v < options.suite.size(); ++v) {
    const Variant& variant = options.suite[v];
    VariantOutcome& vo = out.variants[v];
    try {
      if (variant.optimize) {
        PlanningProblem problem = scenario.problem(variant.mask,
                                                   options.optimizer.pose_loss);
        problem.noise = planning_noise;
        const OptimizeResult res = optimize(baseline, problem, options.optimizer);
        vo.trajectory = res.trajectory;
        vo.initial_loss = res.initial_loss();
        vo.final_loss = res.final_loss();
        vo.iterations = static_cast<int>(res.history.size()) - 1;
        vo.history = res.history;
        vo.line_search_failure = res.line_search_failure;
      } else {
        vo.trajectory = baseline;
      }
      Belief prior = scenario.prior;
      prior.mean = scenario.start.vector();
      vo.ml_trace = propagate(vo.trajectory, scenario.cameras, eval_noise, prior,
                              scenario.propagation);
      const Matrix6d& final_cov = vo.ml_trace.final_belief().covariance;
      vo.ml_trace_value = final_cov.trace();
      vo.ml_entropy = entropy(final_cov);
      vo.trials.reserve(options.n_rollouts);
      for (int k = 0; k < options.n_rollouts; ++k) {
        Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(index),
                           static_cast<std::uint64_t>(k) + 1);
        try {
          vo.trials.push_back(
              rollout_noisy(vo.trajectory, scenario, rng, eval_noise).row);
        } catch (const Error& e) {
          RolloutRow row;
          row.ok = false;
          row.failure = e.what();
          vo.trials.push_back(row);
        }
        if (!vo.trials.back().ok) {
          throw std::runtime_error("trial " + std::to_string(k) + ": " +
                                   vo.trials.back().failure);
        }
      }
    } catch (const std::exception& e) {
      out.ok = false;
      out.failure = "variant " + variant.name + ": " + e.what();
      return out;
    }
  }
  return out;
}

AblationResult run_ablation(const AblationOptions& options) {
  if (options.n_scenarios < 1 || options.n_rollouts < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "n_scenarios and n_rollouts must be >= 1");
  }
  if (options.suite.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty variant suite");
  }
  options.optimizer.validate();

  AblationResult result;
  result.suite = options.suite;
  result.scenarios.resize(options.n_scenarios);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < options.n_scenarios; i = next.fetch_add(1)) {
      ScenarioOutcome& slot = result.scenarios[i];
      try {
        Rng rng = make_rng(options.seed, static_cast<std::uint64_t>(i), 0);
        const Scenario sc = sample_scenario(rng, options.bounds, options.seed);
        slot = evaluate_scenario(sc, i, options);
      } catch (const std::exception& e) {
        slot = ScenarioOutcome{};
        slot.index = i;
        slot.ok = false;
        slot.failure = e.what();
      }
    }
  };
  const int workers = std::clamp(options.parallel, 1, options.n_scenarios);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.baseline_index = 0;
  for (size_t v = 0; v < options.suite.size(); ++v) {
    if (!options.suite[v].optimize) {
      result.baseline_index = static_cast<int>(v);
      break;
    }
  }

  const size_t nv = options.suite.size();
  result.raw.assign(nv, MetricRow{});
  result.relative.assign(nv, MetricRow{});
  for (const auto& sc : result.scenarios) {
    if (!sc.ok) ++result.failed_scenarios;
  }
  for (size_t v = 0; v < nv; ++v) {
    std::vector<double> pos, ori, tr, ent, ml_tr, ml_ent;
    for (const auto& sc : result.scenarios) {
      if (!sc.ok) continue;
      const VariantOutcome& vo = sc.variants[v];
      ml_tr.push_back(vo.ml_trace_value);
      ml_ent.push_back(vo.ml_entropy);
      for (const RolloutRow& r : vo.trials) {
        pos.push_back(r.position_error);
        ori.push_back(r.orientation_error);
        tr.push_back(r.trace);
        ent.push_back(r.entropy);
      }
    }
    MetricRow& raw = result.raw[v];
    raw[kPositionMean] = mean_of(pos);
    raw[kPositionStd] = std_of(pos);
    raw[kOrientationMean] = mean_of(ori);
    raw[kOrientationStd] = std_of(ori);
    raw[kTraceNoisy] = mean_of(tr);
    raw[kTraceMl] = mean_of(ml_tr);
    raw[kEntropyNoisy] = mean_of(ent);
    raw[kEntropyMl] = mean_of(ml_ent);
  }
  const MetricRow& base = result.raw[result.baseline_index];
  for (size_t v = 0; v < nv; ++v) {
    for (int m = 0; m < kMetricCount; ++m) {
      const double y = result.raw[v][m];
      double rel = std::numeric_limits<double>::quiet_NaN();
      if (y == base[m]) {
        rel = 1.0;
      } else {
        try {
          rel = relative_scale(y, base[m]);
        } catch (const Error&) {
        }
      }
      result.relative[v][m] = rel;
    }
  }
  return result;
}

Trajectory reoptimize_on_camera_change(const Trajectory& traj,
                                       const Scenario& scenario, int step,
                                       const OptimizerConfig& opt,
                                       const AblationMask& mask) {
  traj.validate();
  const int T = traj.horizon();
  if (step < 0 || step >= T) {
    throw Error(ErrorCode::kInvalidArgument,
                "re-planning step must be in [0, T)");
  }
  const StateDependentNoise noise(scenario.noise, AblationMask::full());
  Belief prior = scenario.prior;
  prior.mean = traj.start().vector();

  Belief current;
  if (step == 0) {
    if (scenario.propagation.initial_update) {
      current = update(prior, scenario.cameras.at(0), noise);
    } else {
      current = prior;
    }
  } else {
    Trajectory prefix;
    prefix.waypoints.assign(traj.waypoints.begin(), traj.waypoints.begin() + step + 1);
    current = propagate(prefix, scenario.cameras, noise, prior,
                        scenario.propagation)
                  .final_belief();
  }

  Trajectory suffix;
  suffix.waypoints.assign(traj.waypoints.begin() + step, traj.waypoints.end());
  suffix.waypoints.front() = Pose::from_vector(current.mean);

  PlanningProblem problem = scenario.problem(mask, opt.pose_loss);
  problem.cameras = scenario.cameras.suffix(step);
  problem.prior = current;
  problem.propagation.initial_update = false;
  const OptimizeResult res = optimize(suffix, problem, opt);

  Trajectory out;
  out.waypoints.assign(traj.waypoints.begin(), traj.waypoints.begin() + step);
  out.waypoints.insert(out.waypoints.end(), res.trajectory.waypoints.begin(),
                       res.trajectory.waypoints.end());
  return out;
}

}  // namespace uatraj
