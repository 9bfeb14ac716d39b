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
#include "uatraj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uatraj/errors.hpp"
#include "uatraj/trajectory.hpp"

namespace uatraj {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSmallAngle = 1e-7;

Vector3d vee(const Matrix3d& m) {
  return {m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)};
}

}  // namespace

Vector6d Pose::vector() const {
  Vector6d v;
  v << position, orientation;
  return v;
}

Pose Pose::from_vector(const Vector6d& v) {
  return Pose(v.head<3>(), v.tail<3>());
}

Pose Pose::canonical() const { return Pose(position, canonicalize(orientation)); }

bool Pose::is_finite() const {
  return position.allFinite() && orientation.allFinite();
}

Matrix3d skew(const Vector3d& w) {
  Matrix3d m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Matrix3d rotation_from_axis_angle(const Vector3d& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3d K = skew(w);
  double a, b;  // sin(t)/t, (1 - cos(t))/t^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Matrix3d::Identity() + a * K + b * K * K;
}

Vector3d axis_angle_from_rotation(const Matrix3d& R) {
  const Vector3d v = vee(R);  // 2 sin(t) n
  const double s = 0.5 * v.norm();
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(s, c);

  if (theta < kSmallAngle) return 0.5 * (1.0 + theta * theta / 6.0) * v;

  if (kPi - theta < 1e-6) {
    // sin(t) ~ 0: recover the axis from the symmetric part,
    // n n^T = (R + R^T - 2c I) / (2 (1 - c)).
    const Matrix3d S =
        (R + R.transpose() - 2.0 * c * Matrix3d::Identity()) / (2.0 * (1.0 - c));
    int k = 0;
    S.diagonal().maxCoeff(&k);
    Vector3d n = S.col(k) / std::sqrt(std::max(S(k, k), 1e-300));
    n.normalize();
    if (n.dot(v) < 0.0) n = -n;
    return theta * n;
  }
  return theta / (2.0 * std::sin(theta)) * v;
}

Vector3d canonicalize(const Vector3d& w) {
  const double theta = w.norm();
  if (theta <= kPi) return w;
  const Vector3d axis = w / theta;
  const double m = std::fmod(theta, 2.0 * kPi);
  if (m > kPi) return -(2.0 * kPi - m) * axis;
  return m * axis;
}

Matrix3d right_jacobian(const Vector3d& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3d K = skew(w);
  if (theta < 1e-5) {
    return Matrix3d::Identity() - 0.5 * K + K * K / 6.0;
  }
  return Matrix3d::Identity() - (1.0 - std::cos(theta)) / theta2 * K +
         (theta - std::sin(theta)) / (theta2 * theta) * K * K;
}

Matrix3d right_jacobian_inverse(const Vector3d& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3d K = skew(w);
  if (theta < 1e-5) {
    return Matrix3d::Identity() + 0.5 * K + K * K / 12.0;
  }
  // (1 + cos t) / (2 t sin t) written as cot(t/2) / (2t), finite at t = pi.
  const double coeff = 1.0 / theta2 - 1.0 / (2.0 * theta * std::tan(0.5 * theta));
  return Matrix3d::Identity() + 0.5 * K + coeff * K * K;
}

Vector3d relative_rotation(const Vector3d& a, const Vector3d& b) {
  return axis_angle_from_rotation(rotation_from_axis_angle(a).transpose() *
                                  rotation_from_axis_angle(b));
}

double angle_between(const Vector3d& a, const Vector3d& b) {
  const Matrix3d R =
      rotation_from_axis_angle(a).transpose() * rotation_from_axis_angle(b);
  const double s = 0.5 * vee(R).norm();
  const double c = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  return std::atan2(s, c);
}

Vector3d interpolate_orientation(const Vector3d& a, const Vector3d& b,
                                 double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  const Vector3d delta = relative_rotation(a, b);
  return axis_angle_from_rotation(rotation_from_axis_angle(a) *
                                  rotation_from_axis_angle(s * delta));
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "image size must be positive");
  }
  if (!(cx >= 0.0 && cx <= width && cy >= 0.0 && cy <= height)) {
    throw Error(ErrorCode::kInvalidArgument,
                "principal point outside the image");
  }
  if (!pose.is_finite()) {
    throw Error(ErrorCode::kInvalidArgument, "camera pose is not finite");
  }
}

Vector3d CameraModel::to_camera_frame(const Vector3d& p_world) const {
  return rotation().transpose() * (p_world - pose.position);
}

Vector3d CameraModel::to_world_frame(const Vector3d& p_camera) const {
  return rotation() * p_camera + pose.position;
}

double CameraModel::half_diagonal() const {
  return 0.5 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

bool CameraModel::in_frustum(const Vector3d& p_world) const {
  const Vector3d pc = to_camera_frame(p_world);
  if (!(pc.z() > 0.0)) return false;
  const double u = fx * pc.x() / pc.z() + cx;
  const double v = fy * pc.y() / pc.z() + cy;
  return u > 0.0 && u < width && v > 0.0 && v < height;
}

double camera_depth(const CameraModel& camera, const Vector3d& p_world) {
  return camera.to_camera_frame(p_world).z();
}

Vector2d project(const CameraModel& camera, const Vector3d& p_world) {
  const Vector3d pc = camera.to_camera_frame(p_world);
  if (!(pc.z() > 0.0)) {
    throw Error(ErrorCode::kNonPositiveDepth,
                "point at depth " + std::to_string(pc.z()) +
                    " is not in front of the camera");
  }
  return {camera.fx * pc.x() / pc.z() + camera.cx,
          camera.fy * pc.y() / pc.z() + camera.cy};
}

Vector3d back_project(const CameraModel& camera, const Vector2d& pixel,
                      double depth) {
  const Vector3d pc((pixel.x() - camera.cx) / camera.fx * depth,
                    (pixel.y() - camera.cy) / camera.fy * depth, depth);
  return camera.to_world_frame(pc);
}

CameraSchedule::CameraSchedule(CameraModel camera)
    : CameraSchedule(std::vector<std::pair<int, CameraModel>>{{0, std::move(camera)}}) {}

CameraSchedule::CameraSchedule(std::vector<std::pair<int, CameraModel>> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty() || entries_.front().first != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "camera schedule must start at step 0");
  }
  for (size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first <= entries_[i - 1].first) {
      throw Error(ErrorCode::kInvalidArgument,
                  "camera schedule steps must be strictly increasing");
    }
  }
  for (const auto& [step, cam] : entries_) cam.validate();
}

const CameraModel& CameraSchedule::at(int step) const {
  if (entries_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty camera schedule");
  }
  auto it = std::upper_bound(
      entries_.begin(), entries_.end(), step,
      [](int s, const std::pair<int, CameraModel>& e) { return s < e.first; });
  if (it == entries_.begin()) return entries_.front().second;
  return std::prev(it)->second;
}

CameraSchedule CameraSchedule::suffix(int step) const {
  std::vector<std::pair<int, CameraModel>> out;
  out.emplace_back(0, at(step));
  for (const auto& [s, cam] : entries_) {
    if (s > step) out.emplace_back(s - step, cam);
  }
  return CameraSchedule(std::move(out));
}

bool CameraSchedule::changes_at(int step) const {
  if (step <= 0) return false;
  return std::any_of(entries_.begin(), entries_.end(),
                     [step](const auto& e) { return e.first == step; });
}

void Trajectory::validate() const {
  if (waypoints.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory needs at least two waypoints");
  }
  for (size_t i = 0; i < waypoints.size(); ++i) {
    if (!waypoints[i].is_finite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "waypoint " + std::to_string(i) + " is not finite");
    }
  }
}

double Trajectory::path_length() const {
  double len = 0.0;
  for (size_t i = 1; i < waypoints.size(); ++i) {
    len += (waypoints[i].position - waypoints[i - 1].position).norm();
  }
  return len;
}

}  // namespace uatraj
