#include "tiltsim/frames.hpp"

#include <cmath>

namespace tiltsim {

Mat3 rotation_body_to_inertial(const Vec3& euler) {
  const double cphi = std::cos(euler.x()), sphi = std::sin(euler.x());
  const double cth = std::cos(euler.y()), sth = std::sin(euler.y());
  const double cpsi = std::cos(euler.z()), spsi = std::sin(euler.z());
  Mat3 r;
  r << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
       spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
       -sth,       cth * sphi,                      cth * cphi;
  return r;
}

Mat3 euler_rate_matrix(const Vec3& euler) {
  const double cphi = std::cos(euler.x()), sphi = std::sin(euler.x());
  const double cth = std::cos(euler.y()), tth = std::tan(euler.y());
  Mat3 t;
  t << 1.0, sphi * tth, cphi * tth,
       0.0, cphi,       -sphi,
       0.0, sphi / cth, cphi / cth;
  return t;
}

Mat3 rotation_wind_to_body(double alpha, double beta) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  Mat3 r;
  r << ca * cb, -ca * sb, -sa,
       sb,      cb,       0.0,
       sa * cb, -sa * sb, ca;
  return r;
}

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

}  // namespace tiltsim
