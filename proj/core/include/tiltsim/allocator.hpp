#pragma once

#include <optional>

#include "tiltsim/bounded_lsq.hpp"
#include "tiltsim/dynamics.hpp"

namespace tiltsim {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat68 = Eigen::Matrix<double, 6, 8>;

/// Fast-actuator vector layout: rotors 1-4 (normalized command, [0,1]) then
/// left aileron, right aileron, elevator, rudder (deflection, [-1,1]).
Vec8 nominal_lower_bounds();
Vec8 nominal_upper_bounds();

/// Incremental allocation trim point: the previous actuator setpoint and the
/// wrench the model attributes to it.
struct AllocatorState {
  Vec8 u_trim{Vec8::Zero()};
  Wrench w_prev;
};

/// An actuator fault. lb_abs/ub_abs carry the full absolute box with the
/// override baked in; tilt_lb/tilt_ub tighten the commanded tilt range and
/// jam_servo pins one tilt command at jam_angle. The trigger fires once and
/// stays latched.
struct FailureSpec {
  Vec8 lb_abs = nominal_lower_bounds();
  Vec8 ub_abs = nominal_upper_bounds();
  Vec4 tilt_lb = Vec4::Constant(-1e9);
  Vec4 tilt_ub = Vec4::Constant(1e9);
  int jam_servo{-1};
  double jam_angle{0.0};

  std::optional<double> at_time;      // s
  std::optional<double> at_yaw;       // rad, fires when yaw sweeps past
  std::optional<double> at_airspeed;  // m/s, rising crossing

  bool latched{false};
  bool primed{false};
  double prev_yaw{0.0};
  double prev_airspeed{0.0};
};

/// Checks the trigger against time and plant state, latches on first fire.
/// Returns whether the failure is active.
bool apply_failure(FailureSpec& fail, double t, const PlantState& state);

/// Commanded tilt after failure effects: jam override plus bound clamp.
Vec4 constrain_tilt_command(const Vec4& cmd, const FailureSpec* fail);

/// Body wrench of the eight fast actuators at the given state; the quantity
/// the effectiveness matrix differentiates. Tilt comes from the state.
Wrench actuator_wrench(const PlantState& state, const Vec8& u,
                       const VehicleConfig& cfg,
                       const Vec3& wind = Vec3::Zero());

/// Analytic Jacobian d(wrench)/du at (state, u_trim). Tilt angles are held at
/// their current values; they are not allocation variables.
Mat68 effectiveness_matrix(const PlantState& state, const Vec8& u_trim,
                           const VehicleConfig& cfg,
                           const Vec3& wind = Vec3::Zero());

/// Wrench setpoint from the controller outputs: body force for the commanded
/// acceleration beyond gravity plus the attitude loop torque.
Wrench wrench_setpoint(const Vec3& accel_cmd, const Vec3& attitude,
                       const Vec3& torque, const VehicleParams& vp);

struct AllocationResult {
  Vec8 u_sp{Vec8::Zero()};
  Wrench residual;  // wrench setpoint left unmet by the linear model
  bool saturated{false};
  LsqStatus status{LsqStatus::Converged};
};

/// One incremental allocation step: least-squares fit of A * du to
/// W_sp - W_prev inside the shifted absolute box, u_sp = u_trim + du.
/// A fully failed actuator (zero bounds) also has its column zeroed.
AllocationResult allocate(const Wrench& w_sp, const AllocatorState& alloc,
                          const Mat68& A, const FailureSpec* fail = nullptr);

/// Convenience wrapper owning the trim state across cycles.
class Allocator {
 public:
  explicit Allocator(const VehicleConfig& cfg);

  /// Sets the trim directly, e.g. the hover setpoint at scenario start.
  void reset(const Vec8& u_trim);

  AllocationResult step(const Wrench& w_sp, const PlantState& state,
                        const FailureSpec* fail = nullptr);

  const Vec8& trim() const { return u_trim_; }

 private:
  VehicleConfig cfg_;
  Vec8 u_trim_;
};

}  // namespace tiltsim
