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
#ifndef UATRAJ_NOISE_MODELS_HPP_
#define UATRAJ_NOISE_MODELS_HPP_

#include "uatraj/geometry.hpp"

namespace uatraj {

enum class FovNormalization {
  kHalfDiagonal,  // pixel offset divided by half the image diagonal
  kNone,          // raw pixels
};

// Base covariances and detection optimum. Defaults are the published
// constants; o_star has no published value and is resolved per scenario
// (see default_o_star).
struct NoiseConfig {
  Matrix6d w_pos0 = 1e-3 * Matrix6d::Identity();
  Matrix6d w_ori0 = 1e-3 * Matrix6d::Identity();
  Matrix6d v_depth0 = 1e-1 * Matrix6d::Identity();
  Matrix6d v_fov0 = 1e-2 * Matrix6d::Identity();
  Matrix6d v_ori0 = 5e-3 * Matrix6d::Identity();
  double d_star = 0.15;
  Vector3d o_star = Vector3d::UnitZ();
  FovNormalization fov_normalization = FovNormalization::kHalfDiagonal;

  // Symmetric PSD bases, d_star > 0, o_star non-zero.
  void validate() const;
};

// Observation-noise components and the pose loss that are active during
// optimization. Evaluation always uses full().
struct AblationMask {
  bool use_depth = true;
  bool use_fov = true;
  bool use_orientation = true;
  bool use_pose_loss = true;

  static AblationMask full() { return {}; }
  static AblationMask none() { return {false, false, false, false}; }
};

// Goal orientation expressed in the camera frame.
Vector3d default_o_star(const Pose& goal, const CameraModel& camera);

// Every base matrix multiplied by `factor` (>= 1).
NoiseConfig worst_case_scale(const NoiseConfig& cfg, double factor);

// Scalar weights multiplying W^{p,0} and W^{o,0}, with gradients with respect
// to both poses.
struct MotionFactors {
  double position = 0.0;     // |p_next - p|^2
  double orientation = 0.0;  // A(o, o_next)^2
  Vector6d d_position_from = Vector6d::Zero();
  Vector6d d_position_to = Vector6d::Zero();
  Vector6d d_orientation_from = Vector6d::Zero();
  Vector6d d_orientation_to = Vector6d::Zero();
};

MotionFactors motion_factors(const Pose& from, const Pose& to);

// Scalar weights multiplying V^{d,0}, V^{f,0}, V^{o,0}, with gradients with
// respect to the pose (stacked [position; orientation]).
struct ObservationFactors {
  double depth = 0.0;        // (d_c - d*)^2
  double fov = 0.0;          // |I(x) - I_c|^2 / normalization^2
  double orientation = 0.0;  // (1 - cos_sim(o_c, o*))^2
  Vector6d d_depth = Vector6d::Zero();
  Vector6d d_fov = Vector6d::Zero();
  Vector6d d_orientation = Vector6d::Zero();
};

// Throws Error(kNonPositiveDepth) if the pose is at or behind the camera.
ObservationFactors observation_factors(const Pose& x,
                                       const CameraModel& camera,
                                       const NoiseConfig& cfg);

// W_t = |dp|^2 W^{p,0} + A(o_t, o_{t+1})^2 W^{o,0}.
Matrix6d motion_cov(const Pose& x, const Pose& x_next, const NoiseConfig& cfg);

// V_t = V^d + V^f + V^o with masked components dropped.
Matrix6d obs_cov(const Pose& x, const CameraModel& camera,
                 const NoiseConfig& cfg, const AblationMask& mask);

// Assembles V_t from precomputed factors.
Matrix6d obs_cov(const ObservationFactors& f, const NoiseConfig& cfg,
                 const AblationMask& mask);

}  // namespace uatraj

#endif  // UATRAJ_NOISE_MODELS_HPP_
