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
#include <random>

#include <gtest/gtest.h>

#include "uatraj/errors.hpp"
#include "uatraj/geometry.hpp"

namespace uatraj {
namespace {

Vector3d random_rotation(std::mt19937_64& rng, double max_angle = M_PI) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, max_angle);
  Vector3d axis(g(rng), g(rng), g(rng));
  return u(rng) * axis.normalized();
}

TEST(AngleBetween, Examples) {
  EXPECT_DOUBLE_EQ(angle_between(Vector3d::Zero(), Vector3d::Zero()), 0.0);
  EXPECT_NEAR(angle_between(Vector3d::Zero(), Vector3d(0, 0, M_PI)), M_PI, 1e-12);
  EXPECT_NEAR(angle_between(Vector3d(0, 0, M_PI / 2), Vector3d(0, 0, -M_PI / 2)),
              M_PI, 1e-7);
}

TEST(AngleBetween, MetricProperties) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Vector3d a = random_rotation(rng), b = random_rotation(rng),
                   c = random_rotation(rng);
    const double ab = angle_between(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, M_PI);
    EXPECT_NEAR(ab, angle_between(b, a), 1e-9);
    EXPECT_NEAR(angle_between(a, a), 0.0, 1e-7);
    EXPECT_LE(angle_between(a, c), ab + angle_between(b, c) + 1e-9);
  }
}

TEST(AngleBetween, MatchesTraceFormula) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const Vector3d a = random_rotation(rng), b = random_rotation(rng);
    const Matrix3d r = rotation_from_axis_angle(a).transpose() *
                       rotation_from_axis_angle(b);
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    // acos loses precision near 0 and pi; compare away from those.
    if (std::abs(c) < 0.999) {
      EXPECT_NEAR(angle_between(a, b), std::acos(c), 1e-9);
    }
  }
}

TEST(Rotation, CanonicalRoundTrip) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    const Vector3d w = canonicalize(random_rotation(rng, 3.0 * M_PI));
    EXPECT_LE(w.norm(), M_PI + 1e-12);
    const Vector3d back = axis_angle_from_rotation(rotation_from_axis_angle(w));
    EXPECT_LT(angle_between(w, back), 1e-9);
    if (w.norm() < M_PI - 1e-6) {
      EXPECT_LT((w - back).norm(), 1e-9);
    }
  }
}

TEST(Rotation, CanonicalizeLargeAngle) {
  const Vector3d w(0, 0, 1.5 * M_PI);
  const Vector3d c = canonicalize(w);
  EXPECT_NEAR(c.z(), -0.5 * M_PI, 1e-12);
  EXPECT_TRUE(rotation_from_axis_angle(w).isApprox(rotation_from_axis_angle(c), 1e-12));
  const Pose p(Vector3d(1, 2, 3), w);
  EXPECT_EQ(p.canonical().position, p.position);
  EXPECT_NEAR(p.canonical().orientation.z(), -0.5 * M_PI, 1e-12);
}

TEST(Rotation, SmallAngleSeries) {
  const Vector3d w(1e-9, -2e-9, 3e-9);
  const Matrix3d r = rotation_from_axis_angle(w);
  EXPECT_TRUE(r.isApprox(Matrix3d::Identity() + skew(w), 1e-15));
  EXPECT_TRUE(axis_angle_from_rotation(r).isApprox(w, 1e-6));
}

TEST(Rotation, RightJacobianMatchesFiniteDifference) {
  std::mt19937_64 rng(14);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Vector3d w = random_rotation(rng, 2.5);
    const Matrix3d jr = right_jacobian(w);
    const Matrix3d r0 = rotation_from_axis_angle(w);
    for (int k = 0; k < 3; ++k) {
      Vector3d dw = Vector3d::Zero();
      dw[k] = h;
      const Vector3d plus =
          axis_angle_from_rotation(r0.transpose() * rotation_from_axis_angle(w + dw));
      const Vector3d minus =
          axis_angle_from_rotation(r0.transpose() * rotation_from_axis_angle(w - dw));
      EXPECT_LT(((plus - minus) / (2 * h) - jr.col(k)).norm(), 1e-7);
    }
    EXPECT_TRUE((jr * right_jacobian_inverse(w)).isApprox(Matrix3d::Identity(), 1e-10));
  }
}

TEST(Interpolate, Examples) {
  const Vector3d a(0.1, -0.2, 0.3), b(-0.4, 0.5, 0.6);
  EXPECT_EQ(interpolate_orientation(a, b, 0.0), a);
  EXPECT_EQ(interpolate_orientation(a, b, 1.0), b);
  EXPECT_TRUE(interpolate_orientation(Vector3d::Zero(), Vector3d(0, 0, M_PI / 2), 0.5)
                  .isApprox(Vector3d(0, 0, M_PI / 4), 1e-12));
}

TEST(Interpolate, GeodesicProportionality) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const Vector3d a = random_rotation(rng), b = random_rotation(rng);
    const double ab = angle_between(a, b);
    if (ab > M_PI - 1e-3) continue;
    const double s = u(rng);
    EXPECT_NEAR(angle_between(interpolate_orientation(a, b, s), a), s * ab, 1e-9);
  }
}

TEST(Camera, ProjectExamples) {
  CameraModel cam;
  EXPECT_TRUE(project(cam, Vector3d(0, 0, 0.37)).isApprox(cam.principal_point()));
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 0.0;
  // Principal point (0, 0) sits on the image corner; project does not care.
  const Vector2d px = project(cam, Vector3d(0.1, 0, 1));
  EXPECT_NEAR(px.x(), 10.0, 1e-12);
  EXPECT_NEAR(px.y(), 0.0, 1e-12);
}

TEST(Camera, ProjectRejectsNonPositiveDepth) {
  const CameraModel cam;
  try {
    project(cam, Vector3d(0.1, 0.1, 0.0));
    FAIL() << "expected NonPositiveDepth";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveDepth);
  }
  EXPECT_THROW(project(cam, Vector3d(0, 0, -0.1)), Error);
}

TEST(Camera, DepthExamples) {
  CameraModel cam;
  EXPECT_DOUBLE_EQ(camera_depth(cam, Vector3d(0, 0, 0.15)), 0.15);
  cam.pose.position = Vector3d(0, 0, -0.05);
  EXPECT_NEAR(camera_depth(cam, Vector3d(0, 0, 0.15)), 0.20, 1e-15);
  EXPECT_DOUBLE_EQ(camera_depth(cam, cam.pose.position), 0.0);
}

TEST(Camera, BackProjectInvertsProject) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CameraModel cam;
  cam.pose = Pose(Vector3d(0.01, -0.02, 0.03), Vector3d(0.1, -0.2, 0.05));
  int tested = 0;
  while (tested < 1000) {
    const Vector3d pc(0.15 * u(rng), 0.15 * u(rng), 0.2 + 0.15 * u(rng));
    const Vector3d pw = cam.to_world_frame(pc);
    if (!cam.in_frustum(pw)) continue;
    ++tested;
    const Vector3d back =
        back_project(cam, project(cam, pw), camera_depth(cam, pw));
    EXPECT_LT((back - pw).norm(), 1e-9);
  }
}

TEST(Camera, Validate) {
  CameraModel cam;
  EXPECT_NO_THROW(cam.validate());
  cam.fx = 0.0;
  EXPECT_THROW(cam.validate(), Error);
  cam = CameraModel{};
  cam.cx = 700.0;
  EXPECT_THROW(cam.validate(), Error);
}

TEST(CameraSchedule, PiecewiseConstant) {
  CameraModel a, b;
  b.pose.position = Vector3d(0.01, 0, 0);
  const CameraSchedule s({{0, a}, {3, b}});
  EXPECT_EQ(s.at(0).pose.position, a.pose.position);
  EXPECT_EQ(s.at(2).pose.position, a.pose.position);
  EXPECT_EQ(s.at(3).pose.position, b.pose.position);
  EXPECT_EQ(s.at(9).pose.position, b.pose.position);
  EXPECT_TRUE(s.changes_at(3));
  EXPECT_FALSE(s.changes_at(2));
  const CameraSchedule tail = s.suffix(2);
  EXPECT_EQ(tail.at(0).pose.position, a.pose.position);
  EXPECT_EQ(tail.at(1).pose.position, b.pose.position);
}

TEST(CameraSchedule, RejectsBadIndices) {
  const CameraModel c;
  EXPECT_THROW(CameraSchedule({{1, c}}), Error);
  EXPECT_THROW(CameraSchedule({{0, c}, {2, c}, {2, c}}), Error);
  EXPECT_THROW(CameraSchedule({{0, c}, {3, c}, {1, c}}), Error);
}

}  // namespace
}  // namespace uatraj
