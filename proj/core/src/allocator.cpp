#include "tiltsim/allocator.hpp"

#include <cmath>

namespace tiltsim {

Vec8 nominal_lower_bounds() {
  Vec8 lb;
  lb << 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0, -1.0;
  return lb;
}

Vec8 nominal_upper_bounds() { return Vec8::Ones(); }

bool apply_failure(FailureSpec& fail, double t, const PlantState& state) {
  if (fail.latched) return true;

  bool fire = false;
  if (fail.at_time && t >= *fail.at_time) fire = true;

  const double yaw = state.attitude.z();
  if (fail.at_yaw && fail.primed) {
    // Fires when the wrapped distance to the target changes sign in a small
    // step, so a full-circle sweep does not trip it on the far side.
    const double d0 = angle_diff(*fail.at_yaw, fail.prev_yaw);
    const double d1 = angle_diff(*fail.at_yaw, yaw);
    if (d1 == 0.0 || (d0 * d1 < 0.0 && std::abs(d0 - d1) < kPi / 2.0)) {
      fire = true;
    }
  }

  if (fail.at_airspeed) {
    const double va = state.velocity.norm();
    if (fail.primed && fail.prev_airspeed < *fail.at_airspeed &&
        va >= *fail.at_airspeed) {
      fire = true;
    }
    fail.prev_airspeed = va;
  }

  fail.prev_yaw = yaw;
  fail.primed = true;
  fail.latched = fire;
  return fail.latched;
}

Vec4 constrain_tilt_command(const Vec4& cmd, const FailureSpec* fail) {
  Vec4 out = cmd;
  if (!fail) return out;
  out = out.cwiseMax(fail->tilt_lb).cwiseMin(fail->tilt_ub);
  if (fail->jam_servo >= 0 && fail->jam_servo < 4) {
    out[fail->jam_servo] = fail->jam_angle;
  }
  return out;
}

Wrench actuator_wrench(const PlantState& state, const Vec8& u,
                       const VehicleConfig& cfg, const Vec3& wind) {
  const AirData ad = airdata(state.velocity, state.attitude, wind, cfg.aero);
  Wrench w = rotor_wrench(u.head<4>(), state.tilt, cfg.vehicle);
  w += aero_wrench(ad, 0.5 * (u[4] + u[5]), u[6], u[7], cfg.aero);
  return w;
}

Mat68 effectiveness_matrix(const PlantState& state, const Vec8& u_trim,
                           const VehicleConfig& cfg, const Vec3& wind) {
  const VehicleParams& vp = cfg.vehicle;
  Mat68 A = Mat68::Zero();
  for (int i = 0; i < 4; ++i) {
    const double chi = state.tilt[i];
    const Vec3 axis{std::sin(chi), 0.0, -std::cos(chi)};
    const Vec3 df = 2.0 * vp.thrust_coeff * u_trim[i] * axis;
    A.col(i).head<3>() = df;
    A.col(i).tail<3>() =
        vp.rotor_pos[i].cross(df) +
        vp.spin_dir[i] * 2.0 * vp.reaction_coeff * u_trim[i] * axis;
  }

  const AirData ad = airdata(state.velocity, state.attitude, wind, cfg.aero);
  const double q = ad.qbar * aero_effectiveness(ad.airspeed, cfg.aero);
  const AeroParams& ap = cfg.aero;
  // Each aileron carries half of the pair coefficient.
  A(3, 4) = 0.5 * q * ap.aileron_area * ap.span * ap.roll_eff;
  A(3, 5) = A(3, 4);
  A(4, 6) = q * ap.elevator_area * ap.chord * ap.pitch_eff;
  A(5, 7) = q * ap.rudder_area * ap.span * ap.yaw_eff;
  return A;
}

Wrench wrench_setpoint(const Vec3& accel_cmd, const Vec3& attitude,
                       const Vec3& torque, const VehicleParams& vp) {
  Wrench w;
  const Vec3 f_inertial = vp.mass * (accel_cmd - Vec3{0.0, 0.0, vp.gravity});
  w.force = rotation_body_to_inertial(attitude).transpose() * f_inertial;
  w.moment = torque;
  return w;
}

AllocationResult allocate(const Wrench& w_sp, const AllocatorState& alloc,
                          const Mat68& A, const FailureSpec* fail) {
  const Vec8 lb_abs = fail ? fail->lb_abs : nominal_lower_bounds();
  const Vec8 ub_abs = fail ? fail->ub_abs : nominal_upper_bounds();

  BoundedLsqProblem p;
  p.A = A;
  for (int i = 0; i < 8; ++i) {
    if (lb_abs[i] == 0.0 && ub_abs[i] == 0.0) p.A.col(i).setZero();
  }
  const Wrench dw = w_sp - alloc.w_prev;
  p.b.resize(6);
  p.b << dw.force, dw.moment;
  p.lb = lb_abs - alloc.u_trim;
  p.ub = ub_abs - alloc.u_trim;

  // Small enough that an achievable wrench closes to 1e-8; still breaks the
  // tie toward the least-norm increment on the rank deficient rows.
  BoundedLsqOptions opt;
  opt.ridge = 1e-12;
  const BoundedLsqResult sol = solve_bounded_lsq(p, opt);

  AllocationResult out;
  out.status = sol.status;
  out.u_sp = alloc.u_trim + sol.x;
  const Eigen::VectorXd left = p.b - p.A * sol.x;
  out.residual.force = left.head<3>();
  out.residual.moment = left.tail<3>();
  out.saturated =
      out.residual.force.norm() > 0.5 || out.residual.moment.norm() > 0.1;
  return out;
}

Allocator::Allocator(const VehicleConfig& cfg) : cfg_(cfg) {
  u_trim_ = Vec8::Zero();
  u_trim_.head<4>().setConstant(cfg_.hover_rotor_cmd());
}

void Allocator::reset(const Vec8& u_trim) { u_trim_ = u_trim; }

AllocationResult Allocator::step(const Wrench& w_sp, const PlantState& state,
                                 const FailureSpec* fail) {
  AllocatorState st;
  st.u_trim = u_trim_;
  st.w_prev = actuator_wrench(state, u_trim_, cfg_);
  const Mat68 A = effectiveness_matrix(state, u_trim_, cfg_);
  AllocationResult out = allocate(w_sp, st, A, fail);
  if (out.status == LsqStatus::Converged) {
    u_trim_ = out.u_sp;
  } else {
    out.u_sp = u_trim_;  // hold the last good setpoint
  }
  return out;
}

}  // namespace tiltsim
