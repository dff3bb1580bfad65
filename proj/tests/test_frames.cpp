#include "tiltsim/frames.hpp"

#include <gtest/gtest.h>

using namespace tiltsim;

TEST(Frames, IdentityAtZeroAngles) {
  EXPECT_TRUE(rotation_body_to_inertial(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-14));
  EXPECT_TRUE(euler_rate_matrix(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-14));
}

TEST(Frames, RotationIsOrthonormal) {
  const Vec3 euler{0.3, -0.7, 2.1};
  const Mat3 r = rotation_body_to_inertial(euler);
  EXPECT_TRUE((r * r.transpose()).isApprox(Mat3::Identity(), 1e-13));
  EXPECT_NEAR(r.determinant(), 1.0, 1e-13);
}

TEST(Frames, PositivePitchRaisesNose) {
  // Nose up by 30 deg: body x points up in NED, so its inertial z is negative.
  const Mat3 r = rotation_body_to_inertial({0.0, deg2rad(30.0), 0.0});
  const Vec3 nose = r * Vec3{1.0, 0.0, 0.0};
  EXPECT_LT(nose.z(), 0.0);
  EXPECT_NEAR(nose.z(), -std::sin(deg2rad(30.0)), 1e-14);
}

TEST(Frames, EulerRateMatrixMatchesRotationDerivative) {
  // Finite difference of the rotation under constant body rates.
  const Vec3 euler{0.2, 0.4, -1.1};
  const Vec3 omega{0.3, -0.2, 0.5};
  const Vec3 euler_dot = euler_rate_matrix(euler) * omega;
  const double h = 1e-6;
  const Mat3 r0 = rotation_body_to_inertial(euler);
  const Mat3 r1 = rotation_body_to_inertial(euler + h * euler_dot);
  const Mat3 omega_skew = r0.transpose() * (r1 - r0) / h;
  EXPECT_NEAR(omega_skew(2, 1), omega.x(), 1e-5);
  EXPECT_NEAR(omega_skew(0, 2), omega.y(), 1e-5);
  EXPECT_NEAR(omega_skew(1, 0), omega.z(), 1e-5);
}

TEST(Frames, WindRotationAlignsAirspeedWithWindX) {
  const double alpha = 0.12, beta = -0.05;
  const Mat3 r = rotation_wind_to_body(alpha, beta);
  const Vec3 vb{std::cos(alpha) * std::cos(beta), std::sin(beta),
                std::sin(alpha) * std::cos(beta)};
  EXPECT_TRUE((r.col(0)).isApprox(vb, 1e-14));
  EXPECT_TRUE((r * r.transpose()).isApprox(Mat3::Identity(), 1e-13));
}

TEST(Frames, WrapAngle) {
  EXPECT_NEAR(wrap_angle(0.0), 0.0, 1e-15);
  EXPECT_NEAR(wrap_angle(kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(3.0 * kPi / 2.0), -kPi / 2.0, 1e-14);
  EXPECT_NEAR(wrap_angle(-5.0 * kPi), kPi, 1e-13);
  EXPECT_NEAR(angle_diff(deg2rad(179.0), deg2rad(-179.0)), deg2rad(-2.0), 1e-12);
}
