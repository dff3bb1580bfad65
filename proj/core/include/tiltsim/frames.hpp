#pragma once

#include <Eigen/Dense>

namespace tiltsim {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Body-to-inertial rotation for ZYX Euler angles [roll, pitch, yaw], NED axes.
Mat3 rotation_body_to_inertial(const Vec3& euler);

/// Maps body angular rates to Euler angle rates. Singular at |pitch| = 90 deg.
Mat3 euler_rate_matrix(const Vec3& euler);

/// Wind-to-body rotation from angle of attack and sideslip (radians).
Mat3 rotation_wind_to_body(double alpha, double beta);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Shortest signed difference a - b, wrapped to (-pi, pi].
double angle_diff(double a, double b);

}  // namespace tiltsim
