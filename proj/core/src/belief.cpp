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
#include "uatraj/belief.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "uatraj/errors.hpp"

namespace uatraj {
namespace {

Matrix6d symmetrized(const Matrix6d& m) { return 0.5 * (m + m.transpose()); }

// K = M S^{-1}. S = M + V with M, V PSD, so range(M) lies in range(S) and the
// pseudo-inverse gives the exact gain when the Cholesky factorization fails.
Matrix6d kalman_gain(const Matrix6d& M, const Matrix6d& S) {
  Eigen::LLT<Matrix6d> llt(S);
  if (llt.info() == Eigen::Success) {
    const Matrix6d gain = llt.solve(M).transpose();
    if (gain.allFinite()) return gain;
  }
  if (!S.allFinite()) {
    throw Error(ErrorCode::kSingularInnovation, "innovation covariance is not finite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(S);
  const auto& lambda = es.eigenvalues();
  const double scale = lambda.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Matrix6d::Zero();
  const double tol = 1e-12 * scale;
  if (lambda.minCoeff() < -tol) {
    throw Error(ErrorCode::kSingularInnovation,
                "innovation covariance is indefinite (min eigenvalue " +
                    std::to_string(lambda.minCoeff()) + ")");
  }
  Matrix6d pinv = Matrix6d::Zero();
  for (int i = 0; i < 6; ++i) {
    if (lambda(i) > tol) {
      pinv += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() /
              lambda(i);
    }
  }
  return M * pinv;
}

}  // namespace

Matrix6d StateDependentNoise::motion(const Pose& from, const Pose& to) const {
  return motion_cov(from, to, cfg_);
}

Matrix6d StateDependentNoise::observation(const Pose& x,
                                          const CameraModel& camera) const {
  return obs_cov(x, camera, cfg_, mask_);
}

const Belief& BeliefTrace::final_belief() const {
  if (!steps.empty()) return steps.back().updated;
  if (initial) return initial->updated;
  throw Error(ErrorCode::kInvalidArgument, "empty belief trace");
}

Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const Matrix6d& motion_cov) {
  Belief out;
  // The estimate keeps its offset from the commanded waypoint.
  out.mean = to.vector() + (b.mean - from.vector());
  out.covariance = symmetrized(b.covariance + motion_cov);
  return out;
}

Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const NoiseModel& noise) {
  return predict(b, from, to, noise.motion(from, to));
}

Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const NoiseConfig& cfg) {
  return predict(b, from, to, motion_cov(from, to, cfg));
}

Belief update(const Belief& b, const Matrix6d& obs_cov,
              const std::optional<Vector6d>& observation, Matrix6d* gain) {
  const Matrix6d& M = b.covariance;
  const Matrix6d K = kalman_gain(M, symmetrized(M + obs_cov));
  Belief out;
  out.covariance = symmetrized((Matrix6d::Identity() - K) * M);
  out.mean = observation ? Vector6d(b.mean + K * (*observation - b.mean)) : b.mean;
  if (gain) *gain = K;
  return out;
}

Belief update(const Belief& b, const CameraModel& camera,
              const NoiseModel& noise,
              const std::optional<Vector6d>& observation, Matrix6d* gain) {
  return update(b, noise.observation(Pose::from_vector(b.mean), camera),
                observation, gain);
}

Belief update(const Belief& b, const CameraModel& camera,
              const NoiseConfig& cfg, const AblationMask& mask,
              const std::optional<Vector6d>& observation, Matrix6d* gain) {
  return update(b, camera, StateDependentNoise(cfg, mask), observation, gain);
}

BeliefTrace propagate(const Trajectory& traj, const CameraSchedule& cams,
                      const NoiseModel& noise, const Belief& prior,
                      const PropagateOptions& options) {
  traj.validate();
  BeliefTrace trace;
  trace.steps.reserve(traj.waypoints.size() - 1);
  Belief b = prior;
  int t = 0;
  try {
    if (options.initial_update) {
      StepRecord rec;
      rec.step = 0;
      rec.predicted = b;
      rec.obs_cov = noise.observation(Pose::from_vector(b.mean), cams.at(0));
      b = update(b, rec.obs_cov, std::nullopt, &rec.gain);
      rec.updated = b;
      trace.initial = rec;
    }
    for (t = 1; t <= traj.horizon(); ++t) {
      StepRecord rec;
      rec.step = t;
      rec.motion_cov = noise.motion(traj.waypoints[t - 1], traj.waypoints[t]);
      rec.predicted = predict(b, traj.waypoints[t - 1], traj.waypoints[t],
                              rec.motion_cov);
      rec.obs_cov = noise.observation(Pose::from_vector(rec.predicted.mean),
                                      cams.at(t));
      b = update(rec.predicted, rec.obs_cov, std::nullopt, &rec.gain);
      rec.updated = b;
      trace.steps.push_back(rec);
    }
  } catch (const Error& e) {
    throw e.at_step(t);
  }
  return trace;
}

BeliefTrace propagate(const Trajectory& traj, const CameraSchedule& cams,
                      const NoiseConfig& cfg, const AblationMask& mask,
                      const Belief& prior, const PropagateOptions& options) {
  return propagate(traj, cams, StateDependentNoise(cfg, mask), prior, options);
}

double entropy_constant() {
  return 3.0 * (1.0 + std::log(2.0 * std::numbers::pi));
}

EntropyBound check_entropy_bound(const Matrix6d& covariance) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(symmetrized(covariance),
                                             Eigen::EigenvaluesOnly);
  const auto& lambda = es.eigenvalues();
  if (!lambda.allFinite() || lambda.minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNonPositiveDefinite,
                "covariance has a non-positive eigenvalue; entropy undefined");
  }
  EntropyBound out;
  out.log_det = lambda.array().log().sum();
  out.trace = covariance.trace();
  out.entropy = entropy_constant() + 0.5 * out.log_det;
  out.bound = entropy_constant() + 0.5 * out.trace;
  out.holds = out.log_det < out.trace;
  return out;
}

double entropy(const Matrix6d& covariance) {
  return check_entropy_bound(covariance).entropy;
}

}  // namespace uatraj
