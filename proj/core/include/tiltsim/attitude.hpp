#pragma once

#include "tiltsim/dynamics.hpp"
#include "tiltsim/frames.hpp"
#include "tiltsim/vehicle.hpp"

namespace tiltsim {

/// Gains of the cascaded attitude loop: P on the angle error producing a rate
/// setpoint, PD on the rate error producing a torque.
struct AttitudeGains {
  Vec3 kp_att{3.0, 3.0, 3.0};
  Vec3 kp_rate{Vec3::Zero()};
  Vec3 kd_rate{Vec3::Zero()};
  double rate_limit{kPi};  // rate setpoint clamp, per axis
};

/// Default gains scale the rate loop with the inertia so all axes close with
/// the same bandwidth.
AttitudeGains default_attitude_gains(const VehicleParams& p);

/// Torque law used both by the real inner loop and inside the MPC prediction
/// model. psi_dot_prev is the rate one controller period earlier.
Vec3 attitude_torque(const Vec3& psi_sp, const Vec3& psi, const Vec3& psi_dot,
                     const Vec3& psi_dot_prev, const AttitudeGains& g);

/// Inner loop entry point working on plant measurements: converts body rates
/// to Euler rates, then applies attitude_torque.
Vec3 attitude_step(const Vec3& psi_sp, const PlantState& state,
                   const AttitudeGains& g, const Vec3& prev_rate);

/// Stateful wrapper owning the previous-rate memory.
class AttitudeController {
 public:
  explicit AttitudeController(const AttitudeGains& g) : gains_(g) {}

  Vec3 step(const Vec3& psi_sp, const PlantState& state);
  void reset();
  const Vec3& prev_rate() const { return prev_rate_; }

 private:
  AttitudeGains gains_;
  Vec3 prev_rate_{Vec3::Zero()};
  bool primed_{false};
};

}  // namespace tiltsim
