#include "tiltsim/attitude.hpp"

#include <algorithm>

namespace tiltsim {

AttitudeGains default_attitude_gains(const VehicleParams& p) {
  AttitudeGains g;
  g.kp_att = Vec3(3.0, 3.0, 3.0);
  g.kp_rate = 8.0 * p.inertia_diag;
  g.kd_rate = 0.4 * p.inertia_diag;
  return g;
}

Vec3 attitude_torque(const Vec3& psi_sp, const Vec3& psi, const Vec3& psi_dot,
                     const Vec3& psi_dot_prev, const AttitudeGains& g) {
  Vec3 rate_sp;
  for (int i = 0; i < 3; ++i) {
    const double err = angle_diff(psi_sp[i], psi[i]);
    rate_sp[i] = std::clamp(g.kp_att[i] * err, -g.rate_limit, g.rate_limit);
  }
  return g.kp_rate.cwiseProduct(rate_sp - psi_dot) +
         g.kd_rate.cwiseProduct(psi_dot_prev - psi_dot);
}

Vec3 attitude_step(const Vec3& psi_sp, const PlantState& state,
                   const AttitudeGains& g, const Vec3& prev_rate) {
  const Vec3 psi_dot = euler_rate_matrix(state.attitude) * state.body_rates;
  return attitude_torque(psi_sp, state.attitude, psi_dot, prev_rate, g);
}

Vec3 AttitudeController::step(const Vec3& psi_sp, const PlantState& state) {
  const Vec3 psi_dot = euler_rate_matrix(state.attitude) * state.body_rates;
  if (!primed_) {
    prev_rate_ = psi_dot;
    primed_ = true;
  }
  const Vec3 tau =
      attitude_torque(psi_sp, state.attitude, psi_dot, prev_rate_, gains_);
  prev_rate_ = psi_dot;
  return tau;
}

void AttitudeController::reset() {
  prev_rate_.setZero();
  primed_ = false;
}

}  // namespace tiltsim
