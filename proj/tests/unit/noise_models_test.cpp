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
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "uatraj/errors.hpp"
#include "uatraj/noise_models.hpp"

namespace uatraj {
namespace {

const Matrix6d kI = Matrix6d::Identity();

Pose random_visible_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Pose(Vector3d(0.08 * u(rng), 0.06 * u(rng), 0.2 + 0.12 * u(rng)),
              Vector3d(1.5 * u(rng), 1.5 * u(rng), 1.5 * u(rng)));
}

void expect_sym_psd(const Matrix6d& m) {
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(m);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(MotionCov, Examples) {
  const NoiseConfig cfg;
  const Pose x(Vector3d(0.01, 0.02, 0.15), Vector3d(0.3, -0.1, 0.2));
  EXPECT_EQ(motion_cov(x, x, cfg), Matrix6d::Zero());

  const Pose moved(x.position + Vector3d(0.06, 0.0, 0.08), x.orientation);
  EXPECT_TRUE(motion_cov(x, moved, cfg).isApprox(1e-5 * kI, 1e-12));

  const Pose origin;
  const Pose turned(Vector3d::Zero(), Vector3d(0, 0, M_PI / 2));
  const Matrix6d w = motion_cov(origin, turned, cfg);
  EXPECT_TRUE(w.isApprox(std::pow(M_PI / 2, 2) * 1e-3 * kI, 1e-12));
  EXPECT_NEAR(w(0, 0), 2.4674e-3, 1e-7);
}

TEST(MotionCov, QuadraticInStep) {
  const NoiseConfig cfg;
  const Pose origin;
  const Vector3d d(0.013, -0.021, 0.034);
  const double one = motion_cov(origin, Pose(d, Vector3d::Zero()), cfg)(0, 0);
  const double two = motion_cov(origin, Pose(2.0 * d, Vector3d::Zero()), cfg)(0, 0);
  EXPECT_EQ(two, 4.0 * one);
}

TEST(MotionCov, UsesGeodesicAngle) {
  const NoiseConfig cfg;
  // Axis-angle vectors far apart in R^3 but nearly the same rotation.
  const Pose a(Vector3d::Zero(), Vector3d(0, 0, M_PI - 0.01));
  const Pose b(Vector3d::Zero(), Vector3d(0, 0, -(M_PI - 0.01)));
  EXPECT_NEAR(motion_cov(a, b, cfg)(3, 3), 1e-3 * 0.02 * 0.02, 1e-12);
}

TEST(MotionCov, SymmetricPsdOnRandomInputs) {
  std::mt19937_64 rng(21);
  NoiseConfig cfg;
  Matrix6d b = Matrix6d::Random();
  cfg.w_pos0 = b * b.transpose();
  for (int i = 0; i < 500; ++i) {
    expect_sym_psd(motion_cov(random_visible_pose(rng), random_visible_pose(rng), cfg));
  }
}

TEST(MotionFactors, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(22);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_visible_pose(rng), b = random_visible_pose(rng);
    const MotionFactors f = motion_factors(a, b);
    for (int k = 0; k < 6; ++k) {
      Vector6d e = Vector6d::Zero();
      e[k] = h;
      auto at = [&](const Pose& from, const Pose& to) {
        const MotionFactors m = motion_factors(from, to);
        return Eigen::Vector2d(m.position, m.orientation);
      };
      const Eigen::Vector2d dto =
          (at(a, Pose::from_vector(b.vector() + e)) -
           at(a, Pose::from_vector(b.vector() - e))) / (2 * h);
      const Eigen::Vector2d dfrom =
          (at(Pose::from_vector(a.vector() + e), b) -
           at(Pose::from_vector(a.vector() - e), b)) / (2 * h);
      EXPECT_NEAR(dto[0], f.d_position_to[k], 1e-6);
      EXPECT_NEAR(dto[1], f.d_orientation_to[k], 1e-6);
      EXPECT_NEAR(dfrom[0], f.d_position_from[k], 1e-6);
      EXPECT_NEAR(dfrom[1], f.d_orientation_from[k], 1e-6);
    }
  }
}

TEST(ObsCov, Examples) {
  const CameraModel cam;
  NoiseConfig cfg;
  cfg.o_star = Vector3d(0, 0, 1);
  const Vector3d along(0, 0, 0.7);  // parallel to o*
  EXPECT_EQ(obs_cov(Pose(Vector3d(0, 0, 0.15), along), cam, cfg,
                    AblationMask::full()),
            Matrix6d::Zero());
  EXPECT_TRUE(obs_cov(Pose(Vector3d(0, 0, 0.25), along), cam, cfg,
                      AblationMask::full())
                  .isApprox(1e-3 * kI, 1e-12));
  EXPECT_TRUE(obs_cov(Pose(Vector3d(0, 0, 0.15), -along), cam, cfg,
                      AblationMask::full())
                  .isApprox(2e-2 * kI, 1e-12));
}

TEST(ObsCov, IdentityOrientationIsNeutral) {
  const CameraModel cam;
  const NoiseConfig cfg;
  const Pose x(Vector3d(0, 0, 0.15), Vector3d::Zero());
  EXPECT_TRUE(obs_cov(x, cam, cfg, AblationMask::full()).isApprox(cfg.v_ori0, 1e-15));
}

TEST(ObsCov, OrientationIsTakenInCameraFrame) {
  CameraModel cam;
  cam.pose.orientation = Vector3d(0.0, 0.3, 0.0);
  NoiseConfig cfg;
  const Pose goal(Vector3d(0.0, 0.0, 0.2), Vector3d(0.4, -0.2, 0.9));
  cfg.o_star = default_o_star(goal, cam);
  const Pose x(cam.to_world_frame(Vector3d(0, 0, cfg.d_star)), goal.orientation);
  EXPECT_LT(obs_cov(x, cam, cfg, AblationMask::full()).norm(), 1e-20);
}

TEST(ObsCov, FovNormalization) {
  const CameraModel cam;
  NoiseConfig cfg;
  cfg.o_star = Vector3d(0, 0, 1);
  // 100 px right of center at depth d*.
  const Pose x(Vector3d(0.1 * cfg.d_star * 100.0 / (0.1 * cam.fx), 0, cfg.d_star),
               Vector3d(0, 0, 0.5));
  const ObservationFactors half = observation_factors(x, cam, cfg);
  EXPECT_NEAR(half.fov, 1e4 / std::pow(cam.half_diagonal(), 2), 1e-12);
  cfg.fov_normalization = FovNormalization::kNone;
  EXPECT_NEAR(observation_factors(x, cam, cfg).fov, 1e4, 1e-8);
  EXPECT_DOUBLE_EQ(cam.half_diagonal(), 400.0);
}

TEST(ObsCov, MaskDisablesTerms) {
  std::mt19937_64 rng(23);
  const CameraModel cam;
  const NoiseConfig cfg;
  for (int i = 0; i < 100; ++i) {
    const Pose x = random_visible_pose(rng);
    EXPECT_EQ(obs_cov(x, cam, cfg, AblationMask::none()), Matrix6d::Zero());
    const ObservationFactors f = observation_factors(x, cam, cfg);
    AblationMask only_depth = AblationMask::none();
    only_depth.use_depth = true;
    EXPECT_TRUE(obs_cov(x, cam, cfg, only_depth).isApprox(f.depth * cfg.v_depth0));
    const Matrix6d sum = f.depth * cfg.v_depth0 + f.fov * cfg.v_fov0 +
                         f.orientation * cfg.v_ori0;
    EXPECT_TRUE(obs_cov(x, cam, cfg, AblationMask::full()).isApprox(sum, 1e-14));
  }
}

TEST(ObsCov, SymmetricPsdOnRandomInputs) {
  std::mt19937_64 rng(24);
  const CameraModel cam;
  NoiseConfig cfg;
  Matrix6d b = Matrix6d::Random();
  cfg.v_fov0 = b * b.transpose();
  for (int i = 0; i < 500; ++i) {
    expect_sym_psd(obs_cov(random_visible_pose(rng), cam, cfg, AblationMask::full()));
  }
}

TEST(ObsCov, MonotoneInEachFactor) {
  const CameraModel cam;
  NoiseConfig cfg;
  cfg.o_star = Vector3d(0, 0, 1);
  auto tr = [&](const Pose& x) {
    return obs_cov(x, cam, cfg, AblationMask::full()).trace();
  };
  // Depth deviation, on-axis and aligned.
  double prev = -1.0;
  for (double dev = 0.0; dev < 0.2; dev += 0.01) {
    const double t = tr(Pose(Vector3d(0, 0, cfg.d_star + dev), Vector3d(0, 0, 0.5)));
    EXPECT_GE(t, prev);
    prev = t;
  }
  // Pixel distance at fixed depth.
  prev = -1.0;
  for (double x = 0.0; x < 0.09; x += 0.005) {
    const double t = tr(Pose(Vector3d(x, 0, cfg.d_star), Vector3d(0, 0, 0.5)));
    EXPECT_GE(t, prev);
    prev = t;
  }
  // Misalignment, rotating the axis away from o*.
  prev = -1.0;
  for (double a = 0.0; a <= M_PI; a += 0.1) {
    const Vector3d axis(std::sin(a), 0.0, std::cos(a));
    const double t = tr(Pose(Vector3d(0, 0, cfg.d_star), 0.5 * axis));
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(ObsCov, NonPositiveDepth) {
  const CameraModel cam;
  const NoiseConfig cfg;
  try {
    obs_cov(Pose(Vector3d(0, 0, -0.01), Vector3d(0, 0, 1)), cam, cfg,
            AblationMask::full());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonPositiveDepth);
  }
}

TEST(ObservationFactors, GradientMatchesFiniteDifference) {
  std::mt19937_64 rng(25);
  CameraModel cam;
  cam.pose = Pose(Vector3d(0.01, 0.0, -0.02), Vector3d(0.05, -0.1, 0.2));
  NoiseConfig cfg;
  cfg.o_star = Vector3d(0.3, -0.5, 0.8);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const Pose x = random_visible_pose(rng);
    const ObservationFactors f = observation_factors(x, cam, cfg);
    for (int k = 0; k < 6; ++k) {
      Vector6d e = Vector6d::Zero();
      e[k] = h;
      const ObservationFactors p =
          observation_factors(Pose::from_vector(x.vector() + e), cam, cfg);
      const ObservationFactors m =
          observation_factors(Pose::from_vector(x.vector() - e), cam, cfg);
      EXPECT_NEAR((p.depth - m.depth) / (2 * h), f.d_depth[k], 1e-6);
      EXPECT_NEAR((p.fov - m.fov) / (2 * h), f.d_fov[k], 1e-6);
      EXPECT_NEAR((p.orientation - m.orientation) / (2 * h), f.d_orientation[k], 1e-6);
    }
  }
}

TEST(WorstCaseScale, Linear) {
  NoiseConfig cfg;
  cfg.o_star = Vector3d(0.1, 0.2, 0.3);
  const NoiseConfig same = worst_case_scale(cfg, 1.0);
  EXPECT_EQ(same.w_pos0, cfg.w_pos0);
  EXPECT_EQ(same.v_ori0, cfg.v_ori0);
  const NoiseConfig four = worst_case_scale(cfg, 4.0);
  EXPECT_EQ(four.w_pos0, 4.0 * cfg.w_pos0);
  EXPECT_EQ(four.w_ori0, 4.0 * cfg.w_ori0);
  EXPECT_EQ(four.v_depth0, 4.0 * cfg.v_depth0);
  EXPECT_EQ(four.v_fov0, 4.0 * cfg.v_fov0);
  EXPECT_EQ(four.v_ori0, 4.0 * cfg.v_ori0);
  EXPECT_EQ(four.d_star, cfg.d_star);
  EXPECT_EQ(four.o_star, cfg.o_star);

  const CameraModel cam;
  const Pose a(Vector3d(0.02, 0.01, 0.2), Vector3d(0.1, 0.2, 0.3));
  const Pose b(Vector3d(0.05, -0.01, 0.25), Vector3d(-0.2, 0.2, 0.1));
  EXPECT_TRUE(motion_cov(a, b, four).isApprox(4.0 * motion_cov(a, b, cfg)));
  EXPECT_TRUE(obs_cov(b, cam, four, AblationMask::full())
                  .isApprox(4.0 * obs_cov(b, cam, cfg, AblationMask::full())));
  EXPECT_THROW(worst_case_scale(cfg, 0.5), Error);
}

TEST(NoiseConfig, DefaultsAndValidation) {
  NoiseConfig cfg;
  EXPECT_EQ(cfg.w_pos0, 1e-3 * kI);
  EXPECT_EQ(cfg.w_ori0, 1e-3 * kI);
  EXPECT_EQ(cfg.v_depth0, 1e-1 * kI);
  EXPECT_EQ(cfg.v_fov0, 1e-2 * kI);
  EXPECT_EQ(cfg.v_ori0, 5e-3 * kI);
  EXPECT_EQ(cfg.d_star, 0.15);
  EXPECT_NO_THROW(cfg.validate());

  NoiseConfig bad = cfg;
  bad.v_fov0(0, 1) = 1e-3;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.w_pos0(2, 2) = -1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.d_star = 0.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = cfg;
  bad.o_star.setZero();
  EXPECT_THROW(bad.validate(), Error);
}

TEST(DefaultOStar, GoalInCameraFrame) {
  CameraModel cam;
  const Pose goal(Vector3d(0, 0, 0.2), Vector3d(0.2, -0.4, 0.6));
  EXPECT_TRUE(default_o_star(goal, cam).isApprox(goal.orientation, 1e-12));
  cam.pose.orientation = Vector3d(0, 0, 0.5);
  const Matrix3d r = rotation_from_axis_angle(cam.pose.orientation).transpose() *
                     rotation_from_axis_angle(goal.orientation);
  EXPECT_TRUE(rotation_from_axis_angle(default_o_star(goal, cam)).isApprox(r, 1e-12));
}

}  // namespace
}  // namespace uatraj
