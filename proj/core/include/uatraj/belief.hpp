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
#ifndef UATRAJ_BELIEF_HPP_
#define UATRAJ_BELIEF_HPP_

#include <optional>
#include <vector>

#include "uatraj/geometry.hpp"
#include "uatraj/noise_models.hpp"
#include "uatraj/trajectory.hpp"

namespace uatraj {

// Gaussian over the stacked pose [position; axis-angle].
struct Belief {
  Vector6d mean = Vector6d::Zero();
  Matrix6d covariance = Matrix6d::Zero();

  Belief() = default;
  Belief(const Vector6d& m, const Matrix6d& c) : mean(m), covariance(c) {}
};

// Source of W_t and V_t. The state-dependent model is the one used for
// planning and evaluation; FrozenNoise gives the linear-Gaussian special case.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  virtual Matrix6d motion(const Pose& from, const Pose& to) const = 0;
  virtual Matrix6d observation(const Pose& x,
                               const CameraModel& camera) const = 0;
};

class StateDependentNoise final : public NoiseModel {
 public:
  StateDependentNoise(NoiseConfig cfg, AblationMask mask)
      : cfg_(std::move(cfg)), mask_(mask) {}

  Matrix6d motion(const Pose& from, const Pose& to) const override;
  Matrix6d observation(const Pose& x, const CameraModel& camera) const override;

  const NoiseConfig& config() const { return cfg_; }
  const AblationMask& mask() const { return mask_; }

 private:
  NoiseConfig cfg_;
  AblationMask mask_;
};

class FrozenNoise final : public NoiseModel {
 public:
  FrozenNoise(const Matrix6d& motion_cov, const Matrix6d& obs_cov)
      : w_(motion_cov), v_(obs_cov) {}

  Matrix6d motion(const Pose&, const Pose&) const override { return w_; }
  Matrix6d observation(const Pose&, const CameraModel&) const override {
    return v_;
  }

 private:
  Matrix6d w_;
  Matrix6d v_;
};

struct StepRecord {
  int step = 0;
  Belief predicted;
  Belief updated;
  Matrix6d motion_cov = Matrix6d::Zero();
  Matrix6d obs_cov = Matrix6d::Zero();
  Matrix6d gain = Matrix6d::Zero();
};

// Per-step record of a propagation. `steps` has one entry per motion
// (length T); `initial` holds the optional update at the start waypoint.
struct BeliefTrace {
  std::optional<StepRecord> initial;
  std::vector<StepRecord> steps;

  const Belief& final_belief() const;
};

struct PropagateOptions {
  // Also fuse an observation at x_0 before the first motion. Off by default:
  // the trace then holds exactly T predict/update steps.
  bool initial_update = false;
};

// Mean carried along by the relative motion from -> to; Sigma + W.
Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const Matrix6d& motion_cov);
Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const NoiseModel& noise);
Belief predict(const Belief& b, const Pose& from, const Pose& to,
               const NoiseConfig& cfg);

// Kalman update with H = R = I. Without an observation the maximum-likelihood
// observation is assumed, so the mean is unchanged. Throws
// Error(kSingularInnovation) when Sigma + V cannot be factored and is not a
// valid PSD matrix. `gain` receives K if non-null.
Belief update(const Belief& b, const Matrix6d& obs_cov,
              const std::optional<Vector6d>& observation = std::nullopt,
              Matrix6d* gain = nullptr);
Belief update(const Belief& b, const CameraModel& camera,
              const NoiseModel& noise,
              const std::optional<Vector6d>& observation = std::nullopt,
              Matrix6d* gain = nullptr);
Belief update(const Belief& b, const CameraModel& camera,
              const NoiseConfig& cfg, const AblationMask& mask,
              const std::optional<Vector6d>& observation = std::nullopt,
              Matrix6d* gain = nullptr);

// Deterministic belief propagation under maximum-likelihood observations.
// Errors carry the offending timestep.
BeliefTrace propagate(const Trajectory& traj, const CameraSchedule& cams,
                      const NoiseModel& noise, const Belief& prior,
                      const PropagateOptions& options = {});
BeliefTrace propagate(const Trajectory& traj, const CameraSchedule& cams,
                      const NoiseConfig& cfg, const AblationMask& mask,
                      const Belief& prior,
                      const PropagateOptions& options = {});

// Differential entropy in nats. Throws Error(kNonPositiveDefinite).
double entropy(const Matrix6d& covariance);
inline double entropy(const Belief& b) { return entropy(b.covariance); }

// (n/2)(1 + ln 2 pi) for n = 6.
double entropy_constant();

struct EntropyBound {
  double entropy = 0.0;
  double bound = 0.0;    // entropy_constant() + Tr(Sigma) / 2
  double log_det = 0.0;
  double trace = 0.0;
  bool holds = false;    // ln|Sigma| < Tr(Sigma)
};

EntropyBound check_entropy_bound(const Matrix6d& covariance);
inline EntropyBound check_entropy_bound(const Belief& b) {
  return check_entropy_bound(b.covariance);
}

}  // namespace uatraj

#endif  // UATRAJ_BELIEF_HPP_
