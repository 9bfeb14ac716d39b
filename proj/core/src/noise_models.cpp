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
#include "uatraj/noise_models.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "uatraj/errors.hpp"

namespace uatraj {
namespace {

void check_psd(const Matrix6d& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " must be finite and symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace

void NoiseConfig::validate() const {
  check_psd(w_pos0, "w_pos0");
  check_psd(w_ori0, "w_ori0");
  check_psd(v_depth0, "v_depth0");
  check_psd(v_fov0, "v_fov0");
  check_psd(v_ori0, "v_ori0");
  if (!(d_star > 0.0) || !std::isfinite(d_star)) {
    throw Error(ErrorCode::kInvalidArgument, "d_star must be positive");
  }
  if (!o_star.allFinite() || o_star.norm() < 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "o_star must be non-zero");
  }
}

Vector3d default_o_star(const Pose& goal, const CameraModel& camera) {
  return relative_rotation(camera.pose.orientation, goal.orientation);
}

NoiseConfig worst_case_scale(const NoiseConfig& cfg, double factor) {
  if (!(factor >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "worst-case factor must be >= 1");
  }
  NoiseConfig out = cfg;
  out.w_pos0 *= factor;
  out.w_ori0 *= factor;
  out.v_depth0 *= factor;
  out.v_fov0 *= factor;
  out.v_ori0 *= factor;
  return out;
}

MotionFactors motion_factors(const Pose& from, const Pose& to) {
  MotionFactors f;
  const Vector3d dp = to.position - from.position;
  f.position = dp.squaredNorm();
  f.d_position_to.head<3>() = 2.0 * dp;
  f.d_position_from.head<3>() = -2.0 * dp;

  // d|phi|^2 = 2 phi^T J_r(o) do, since phi^T J_r^{-1}(phi) = phi^T.
  const Vector3d phi = relative_rotation(from.orientation, to.orientation);
  f.orientation = phi.squaredNorm();
  f.d_orientation_to.tail<3>() =
      2.0 * right_jacobian(to.orientation).transpose() * phi;
  f.d_orientation_from.tail<3>() =
      -2.0 * right_jacobian(from.orientation).transpose() * phi;
  return f;
}

ObservationFactors observation_factors(const Pose& x,
                                       const CameraModel& camera,
                                       const NoiseConfig& cfg) {
  ObservationFactors f;
  const Matrix3d Rc = camera.rotation();
  const Vector3d pc = Rc.transpose() * (x.position - camera.pose.position);
  const double z = pc.z();
  if (!(z > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "waypoint at camera depth " + std::to_string(z));
  }

  const double dd = z - cfg.d_star;
  f.depth = dd * dd;
  f.d_depth.head<3>() = 2.0 * dd * Rc.col(2);

  double norm2 = 1.0;
  if (cfg.fov_normalization == FovNormalization::kHalfDiagonal) {
    const double h = camera.half_diagonal();
    norm2 = h * h;
  }
  const double fx2 = camera.fx * camera.fx;
  const double fy2 = camera.fy * camera.fy;
  const double X = pc.x(), Y = pc.y();
  const double r2 = fx2 * X * X + fy2 * Y * Y;
  f.fov = r2 / (z * z * norm2);
  const Vector3d d_fov_pc(2.0 * fx2 * X / (z * z * norm2),
                          2.0 * fy2 * Y / (z * z * norm2),
                          -2.0 * r2 / (z * z * z * norm2));
  f.d_fov.head<3>() = Rc * d_fov_pc;

  // Cosine similarity between the camera-frame rotation vector and o*.
  // An identity rotation carries no axis; the factor is held at 1 there.
  const Vector3d psi = relative_rotation(camera.pose.orientation, x.orientation);
  const double r = psi.norm();
  if (r < 1e-9) {
    f.orientation = 1.0;
  } else {
    const double on = cfg.o_star.norm();
    const double cs = psi.dot(cfg.o_star) / (r * on);
    const double one_minus = 1.0 - cs;
    f.orientation = one_minus * one_minus;
    const Vector3d d_cs = cfg.o_star / (r * on) - cs * psi / (r * r);
    const Vector3d d_psi = -2.0 * one_minus * d_cs;
    const Matrix3d dpsi_do =
        right_jacobian_inverse(psi) * right_jacobian(x.orientation);
    f.d_orientation.tail<3>() = dpsi_do.transpose() * d_psi;
  }
  return f;
}

Matrix6d motion_cov(const Pose& x, const Pose& x_next, const NoiseConfig& cfg) {
  const Vector3d dp = x_next.position - x.position;
  const double a2 =
      relative_rotation(x.orientation, x_next.orientation).squaredNorm();
  return dp.squaredNorm() * cfg.w_pos0 + a2 * cfg.w_ori0;
}

Matrix6d obs_cov(const ObservationFactors& f, const NoiseConfig& cfg,
                 const AblationMask& mask) {
  Matrix6d V = Matrix6d::Zero();
  if (mask.use_depth) V += f.depth * cfg.v_depth0;
  if (mask.use_fov) V += f.fov * cfg.v_fov0;
  if (mask.use_orientation) V += f.orientation * cfg.v_ori0;
  return V;
}

Matrix6d obs_cov(const Pose& x, const CameraModel& camera,
                 const NoiseConfig& cfg, const AblationMask& mask) {
  if (!mask.use_depth && !mask.use_fov && !mask.use_orientation) {
    return Matrix6d::Zero();
  }
  return obs_cov(observation_factors(x, camera, cfg), cfg, mask);
}

}  // namespace uatraj
