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
#include "uatraj/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "uatraj/errors.hpp"

namespace uatraj {
namespace {

double frobenius(const Matrix6d& a, const Matrix6d& b) {
  return a.cwiseProduct(b).sum();
}

Belief anchored_prior(const Trajectory& traj, const PlanningProblem& problem) {
  Belief prior = problem.prior;
  prior.mean = traj.start().vector();
  return prior;
}

void check_finite(const std::vector<Vector6d>& grad) {
  for (size_t t = 0; t < grad.size(); ++t) {
    if (!grad[t].allFinite()) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "gradient at waypoint " + std::to_string(t) + " is not finite",
                  static_cast<int>(t));
    }
  }
}

std::vector<Vector6d> finite_difference_gradient(const Trajectory& traj,
                                                 const PlanningProblem& problem,
                                                 double h) {
  const int T = traj.horizon();
  std::vector<Vector6d> grad(T + 1, Vector6d::Zero());
  Trajectory probe = traj;
  for (int t = 1; t < T; ++t) {
    const Vector6d base = traj.waypoints[t].vector();
    for (int i = 0; i < 6; ++i) {
      Vector6d v = base;
      v(i) = base(i) + h;
      probe.waypoints[t] = Pose::from_vector(v);
      double up, down;
      try {
        up = loss(probe, problem).total;
        v(i) = base(i) - h;
        probe.waypoints[t] = Pose::from_vector(v);
        down = loss(probe, problem).total;
      } catch (const Error&) {
        up = std::numeric_limits<double>::quiet_NaN();
        down = 0.0;
      }
      grad[t](i) = (up - down) / (2.0 * h);
    }
    probe.waypoints[t] = traj.waypoints[t];
  }
  return grad;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 1");
  }
  if (history_size < 1 || max_line_search < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "history_size and max_line_search must be >= 1");
  }
  if (!(c1 > 0.0 && c1 < c2 && c2 < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < c1 < c2 < 1");
  }
  if (!(initial_step > 0.0) || !(fd_step > 0.0) ||
      !(convergence_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "thresholds must be positive");
  }
  if (!(pin_tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pin_tolerance must be >= 0");
  }
}

LossBreakdown loss_from_trace(const Trajectory& traj, const BeliefTrace& trace,
                              bool pose_loss) {
  LossBreakdown out;
  out.trace = trace.final_belief().covariance.trace();
  if (pose_loss) {
    const int T = traj.horizon();
    const Pose& a = traj.waypoints[T - 1];
    const Pose& b = traj.waypoints[T];
    out.pose_position = (b.position - a.position).norm();
    out.pose_orientation = angle_between(a.orientation, b.orientation);
  }
  out.total = out.trace + out.pose_position + out.pose_orientation;
  return out;
}

LossBreakdown loss(const Trajectory& traj, const PlanningProblem& problem) {
  const StateDependentNoise noise(problem.noise, problem.mask);
  const BeliefTrace trace = propagate(traj, problem.cameras, noise,
                                      anchored_prior(traj, problem),
                                      problem.propagation);
  return loss_from_trace(traj, trace, problem.pose_loss_active());
}

LossBreakdown loss_and_gradient(const Trajectory& traj,
                                const PlanningProblem& problem,
                                std::vector<Vector6d>& grad) {
  traj.validate();
  const int T = traj.horizon();
  const auto& x = traj.waypoints;
  const NoiseConfig& cfg = problem.noise;
  const AblationMask& mask = problem.mask;

  // Forward pass, mirroring propagate() with ML observations.
  struct Step {
    MotionFactors motion;
    ObservationFactors obs;
    Matrix6d gain;
  };
  std::vector<Step> steps(T + 1);
  Belief b = anchored_prior(traj, problem);
  int t = 0;
  try {
    if (problem.propagation.initial_update) {
      b = update(b, obs_cov(x[0], problem.cameras.at(0), cfg, mask));
    }
    for (t = 1; t <= T; ++t) {
      Step& s = steps[t];
      s.motion = motion_factors(x[t - 1], x[t]);
      const Matrix6d W =
          s.motion.position * cfg.w_pos0 + s.motion.orientation * cfg.w_ori0;
      b = predict(b, x[t - 1], x[t], W);
      const bool any_obs = mask.use_depth || mask.use_fov || mask.use_orientation;
      Matrix6d V = Matrix6d::Zero();
      if (any_obs) {
        s.obs = observation_factors(x[t], problem.cameras.at(t), cfg);
        V = obs_cov(s.obs, cfg, mask);
      }
      b = update(b, V, std::nullopt, &s.gain);
    }
  } catch (const Error& e) {
    throw e.at_step(t);
  }

  LossBreakdown out;
  out.trace = b.covariance.trace();

  // Reverse pass. With A = K, P = (I - A) M (I - A)^T + A V A^T to first
  // order, so dL/dM = (I-A)^T G (I-A) and dL/dV = A^T G A.
  grad.assign(T + 1, Vector6d::Zero());
  Matrix6d G = Matrix6d::Identity();
  for (t = T; t >= 1; --t) {
    const Step& s = steps[t];
    const Matrix6d IK = Matrix6d::Identity() - s.gain;
    const Matrix6d G_M = IK.transpose() * G * IK;
    const Matrix6d G_V = s.gain.transpose() * G * s.gain;
    if (t < T) {
      if (mask.use_depth) grad[t] += frobenius(G_V, cfg.v_depth0) * s.obs.d_depth;
      if (mask.use_fov) grad[t] += frobenius(G_V, cfg.v_fov0) * s.obs.d_fov;
      if (mask.use_orientation) {
        grad[t] += frobenius(G_V, cfg.v_ori0) * s.obs.d_orientation;
      }
    }
    const double g_pos = frobenius(G_M, cfg.w_pos0);
    const double g_ori = frobenius(G_M, cfg.w_ori0);
    grad[t] += g_pos * s.motion.d_position_to + g_ori * s.motion.d_orientation_to;
    grad[t - 1] +=
        g_pos * s.motion.d_position_from + g_ori * s.motion.d_orientation_from;
    G = G_M;
  }

  if (problem.pose_loss_active()) {
    const Pose& a = x[T - 1];
    const Pose& c = x[T];
    const Vector3d dp = c.position - a.position;
    out.pose_position = dp.norm();
    if (out.pose_position > 0.0) {
      grad[T - 1].head<3>() -= dp / out.pose_position;
    }
    const Vector3d phi = relative_rotation(a.orientation, c.orientation);
    out.pose_orientation = phi.norm();
    if (out.pose_orientation > 1e-12) {
      grad[T - 1].tail<3>() -= right_jacobian(a.orientation).transpose() * phi /
                               out.pose_orientation;
    }
  }
  out.total = out.trace + out.pose_position + out.pose_orientation;

  grad[0].setZero();
  grad[T].setZero();
  check_finite(grad);
  return out;
}

std::vector<Vector6d> gradient(const Trajectory& traj,
                               const PlanningProblem& problem,
                               GradientMode mode, double fd_step) {
  std::vector<Vector6d> grad;
  if (mode == GradientMode::kAnalytic) {
    loss_and_gradient(traj, problem, grad);
  } else {
    traj.validate();
    grad = finite_difference_gradient(traj, problem, fd_step);
    check_finite(grad);
  }
  return grad;
}

double max_relative_error(const std::vector<Vector6d>& a,
                          const std::vector<Vector6d>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double diff = 0.0, scale = 0.0;
  for (size_t t = 0; t < a.size(); ++t) {
    diff = std::max(diff, (a[t] - b[t]).lpNorm<Eigen::Infinity>());
    scale = std::max(scale, b[t].lpNorm<Eigen::Infinity>());
  }
  if (diff == 0.0) return 0.0;
  return diff / std::max(scale, 1e-300);
}

Eigen::VectorXd to_decision_vector(const Trajectory& traj) {
  const int T = traj.horizon();
  Eigen::VectorXd z(6 * std::max(T - 1, 0));
  for (int t = 1; t < T - 1; ++t) {
    z.segment<6>(6 * (t - 1)) =
        traj.waypoints[t].vector() - traj.waypoints[t - 1].vector();
  }
  if (T >= 2) {
    z.tail<6>() = traj.waypoints[T].vector() - traj.waypoints[T - 1].vector();
  }
  return z;
}

Trajectory from_decision_vector(const Eigen::VectorXd& z, const Pose& start,
                                const Pose& goal) {
  const int free = static_cast<int>(z.size() / 6);
  Trajectory traj;
  traj.waypoints.reserve(free + 2);
  traj.waypoints.push_back(start);
  Vector6d cur = start.vector();
  for (int k = 0; k + 1 < free; ++k) {
    cur += z.segment<6>(6 * k);
    traj.waypoints.push_back(Pose::from_vector(cur));
  }
  if (free > 0) {
    traj.waypoints.push_back(Pose::from_vector(goal.vector() - z.tail<6>()));
  }
  traj.waypoints.push_back(goal);
  return traj;
}

OptimizeResult optimize(const Trajectory& initial,
                        const PlanningProblem& problem,
                        const OptimizerConfig& opt) {
  initial.validate();
  opt.validate();
  const Pose start = initial.start();
  const Pose goal = initial.goal();
  const int T = initial.horizon();

  // Errors at the starting point propagate to the caller.
  loss(initial, problem);

  // With the pose loss on, the clipping action c sits at a kink of
  // |c_p| + A(c_o) once it reaches zero. There the gradient is replaced by
  // the minimum-norm subgradient of each group, which is zero while the
  // trace pulls with less than unit force, so c stays exactly pinned.
  const bool pin = problem.pose_loss_active() && T >= 2;
  const Matrix3d J_goal = right_jacobian(goal.orientation);
  const auto pseudo_gradient = [&](const Eigen::VectorXd& z, Eigen::VectorXd& gz) {
    if (z.tail<3>().isZero(0.0)) {
      // A(c_o) ~ |J_r(o_G) c_o| near zero.
      const Vector3d s = gz.tail<3>();
      const Vector3d w = J_goal.transpose().partialPivLu().solve(s);
      const double n = w.norm();
      gz.tail<3>() = n <= 1.0 ? Vector3d::Zero() : Vector3d(s - J_goal.transpose() * w / n);
    }
    if (z.tail<6>().head<3>().isZero(0.0)) {
      const Vector3d s = gz.tail<6>().head<3>();
      const double n = s.norm();
      gz.tail<6>().head<3>() = n <= 1.0 ? Vector3d::Zero() : Vector3d(s * (1.0 - 1.0 / n));
    }
  };

  const Objective objective = [&](const Eigen::VectorXd& z,
                                  Eigen::VectorXd& gz) -> double {
    const Trajectory traj = from_decision_vector(z, start, goal);
    std::vector<Vector6d> g;
    double value;
    try {
      if (opt.gradient_mode == GradientMode::kAnalytic) {
        value = loss_and_gradient(traj, problem, g).total;
      } else {
        value = loss(traj, problem).total;
        g = gradient(traj, problem, GradientMode::kFiniteDifference, opt.fd_step);
      }
    } catch (const Error&) {
      // Infeasible trial point (behind the camera, singular filter).
      return std::numeric_limits<double>::infinity();
    }
    // dL/d(delta_k) = sum_{k <= t <= T-2} dL/dx_t; dL/dc = -dL/dx_{T-1}.
    gz.resize(z.size());
    if (T >= 2) gz.tail<6>() = -g[T - 1];
    Vector6d acc = Vector6d::Zero();
    for (int k = T - 2; k >= 1; --k) {
      acc += g[k];
      gz.segment<6>(6 * (k - 1)) = acc;
    }
    if (pin) pseudo_gradient(z, gz);
    return value;
  };

  const auto total_loss = [&](const Eigen::VectorXd& z) {
    try {
      return loss(from_decision_vector(z, start, goal), problem).total;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const IterateHook hook = [&](Eigen::VectorXd& z) {
    bool changed = false;
    if (pin) {
      // Snap a negligible clipping action onto the kink if that does not
      // increase the loss.
      Eigen::VectorXd snapped = z;
      if (snapped.tail<6>().head<3>().norm() < opt.pin_tolerance) {
        snapped.tail<6>().head<3>().setZero();
      }
      if (snapped.tail<3>().norm() < opt.pin_tolerance) snapped.tail<3>().setZero();
      if (snapped != z && total_loss(snapped) <= total_loss(z)) {
        z = snapped;
        changed = true;
      }
    }
    Trajectory traj = from_decision_vector(z, start, goal);
    bool wrapped = false;
    for (int t = 1; t < T - 1; ++t) {
      if (traj.waypoints[t].orientation.norm() > std::numbers::pi) {
        traj.waypoints[t] = traj.waypoints[t].canonical();
        wrapped = true;
      }
    }
    if (wrapped) {
      // x_{T-1} is left alone so the clipping action keeps its exact value.
      const Vector6d c = z.tail<6>();
      z = to_decision_vector(traj);
      z.tail<6>() = c;
      changed = true;
    }
    return changed;
  };

  LbfgsParams params;
  params.max_iterations = opt.max_iterations;
  params.history_size = opt.history_size;
  params.c1 = opt.c1;
  params.c2 = opt.c2;
  params.max_line_search = opt.max_line_search;
  params.initial_step = opt.initial_step;
  params.line_search = opt.line_search;
  params.relative_tolerance = opt.convergence_threshold;

  const LbfgsResult res =
      minimize_lbfgs(objective, to_decision_vector(initial), params,
                     hook);

  OptimizeResult out;
  out.status = res.status;
  out.line_search_failure = res.status == LbfgsStatus::kLineSearchFailure;
  out.history.reserve(res.history.size());
  for (const LbfgsIteration& it : res.history) {
    IterationRecord rec;
    rec.iteration = it.iteration;
    rec.gradient_norm = it.gradient_norm;
    rec.step = it.step;
    rec.fallback = it.fallback;
    if (it.iteration == 0) {
      rec.loss = loss(initial, problem);
    } else {
      rec.loss = loss(from_decision_vector(it.x, start, goal), problem);
    }
    out.history.push_back(rec);
  }
  if (res.history.size() <= 1) {
    out.trajectory = initial;
  } else {
    out.trajectory = from_decision_vector(res.x, start, goal);
    for (int t = 1; t < T; ++t) {
      out.trajectory.waypoints[t] = out.trajectory.waypoints[t].canonical();
    }
  }
  return out;
}

}  // namespace uatraj
