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

#ifndef UATRAJ_GEOMETRY_HPP_
#define UATRAJ_GEOMETRY_HPP_

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace uatraj {

using Vector2d = Eigen::Vector2d;
using Vector3d = Eigen::Vector3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix3d = Eigen::Matrix3d;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Tool pose: position in meters and axis-angle orientation in radians.
struct Pose {
  Vector3d position = Vector3d::Zero();
  Vector3d orientation = Vector3d::Zero();

  Pose() = default;
  Pose(const Vector3d& p, const Vector3d& o) : position(p), orientation(o) {}

  // Stacked [position; orientation].
  Vector6d vector() const;
  static Pose from_vector(const Vector6d& v);

  // Same pose with the orientation rewritten to magnitude in [0, pi].
  Pose canonical() const;

  bool is_finite() const;

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.position == b.position && a.orientation == b.orientation;
  }
};

// ---------------------------------------------------------------------------
// SO(3) helpers on axis-angle vectors.

Matrix3d skew(const Vector3d& w);

// Rodrigues formula; a Taylor expansion is used below 1e-7 rad.
Matrix3d rotation_from_axis_angle(const Vector3d& w);

// Inverse of rotation_from_axis_angle. Result has magnitude in [0, pi].
Vector3d axis_angle_from_rotation(const Matrix3d& R);

// Rewrites a rotation vector of any magnitude to the equivalent one with
// magnitude in [0, pi].
Vector3d canonicalize(const Vector3d& w);

// Right Jacobian of the exponential map and its inverse:
// exp(w + dw) ~= exp(w) exp(J_r(w) dw).
Matrix3d right_jacobian(const Vector3d& w);
Matrix3d right_jacobian_inverse(const Vector3d& w);

// Rotation vector of R_a^T R_b.
Vector3d relative_rotation(const Vector3d& a, const Vector3d& b);

// Geodesic distance on SO(3), in [0, pi].
double angle_between(const Vector3d& a, const Vector3d& b);

// Geodesic interpolation: a composed with fraction s of the rotation from a to
// b. Returns a and b unchanged at s = 0 and s = 1.
Vector3d interpolate_orientation(const Vector3d& a, const Vector3d& b,
                                 double s);

// ---------------------------------------------------------------------------
// Pinhole camera. The camera looks down +z of its own frame; `pose` maps
// camera-frame coordinates into the world.

struct CameraModel {
  Pose pose;
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  int width = 640;
  int height = 480;

  // Throws Error(kInvalidArgument) if the intrinsics are unusable.
  void validate() const;

  Matrix3d rotation() const { return rotation_from_axis_angle(pose.orientation); }
  Vector3d to_camera_frame(const Vector3d& p_world) const;
  Vector3d to_world_frame(const Vector3d& p_camera) const;

  Vector2d principal_point() const { return {cx, cy}; }
  double half_diagonal() const;

  // Strictly inside the image rectangle and in front of the camera.
  bool in_frustum(const Vector3d& p_world) const;
};

// z-coordinate of p expressed in the camera frame.
double camera_depth(const CameraModel& camera, const Vector3d& p_world);

// Throws Error(kNonPositiveDepth) when the point is at or behind the camera
// plane.
Vector2d project(const CameraModel& camera, const Vector3d& p_world);

// World point seen at `pixel` with camera-frame depth `depth`.
Vector3d back_project(const CameraModel& camera, const Vector2d& pixel,
                      double depth);

// Piecewise-constant camera assignment over trajectory steps.
class CameraSchedule {
 public:
  CameraSchedule() = default;
  explicit CameraSchedule(CameraModel camera);
  explicit CameraSchedule(std::vector<std::pair<int, CameraModel>> entries);

  // Camera active at trajectory step `step`.
  const CameraModel& at(int step) const;

  const std::vector<std::pair<int, CameraModel>>& entries() const {
    return entries_;
  }

  // Schedule seen by a trajectory that starts at `step` of this one.
  CameraSchedule suffix(int step) const;

  // True when the active camera differs between step-1 and step.
  bool changes_at(int step) const;

 private:
  std::vector<std::pair<int, CameraModel>> entries_;
};

}  // namespace uatraj

#endif  // UATRAJ_GEOMETRY_HPP_
