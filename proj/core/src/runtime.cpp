#include "tiltsim/runtime.hpp"

#include <cmath>
#include <numeric>

#include "tiltsim/baseline.hpp"
#include "tiltsim/velocity_mpc.hpp"

namespace tiltsim {

namespace {

bool finite(const PlantState& s) {
  return s.position.allFinite() && s.velocity.allFinite() &&
         s.attitude.allFinite() && s.body_rates.allFinite() &&
         s.tilt.allFinite();
}

/// Intersection of all active failures; nullopt when none is active.
std::optional<FailureSpec> merge_active(const std::vector<FailureSpec>& fails) {
  std::optional<FailureSpec> out;
  for (const FailureSpec& f : fails) {
    if (!f.latched) continue;
    if (!out) {
      out = f;
      continue;
    }
    out->lb_abs = out->lb_abs.cwiseMax(f.lb_abs);
    out->ub_abs = out->ub_abs.cwiseMin(f.ub_abs);
    out->tilt_lb = out->tilt_lb.cwiseMax(f.tilt_lb);
    out->tilt_ub = out->tilt_ub.cwiseMin(f.tilt_ub);
    if (out->jam_servo < 0) {
      out->jam_servo = f.jam_servo;
      out->jam_angle = f.jam_angle;
    }
  }
  return out;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& sc, const SimConfig& sim,
                       const VehicleConfig& cfg) {
  RunResult out;
  if (sim.plant_hz < sim.attitude_hz || sim.attitude_hz < sim.velocity_hz ||
      sim.velocity_hz <= 0) {
    out.fault = FaultRecord{0.0, "loop rates must nest: plant >= attitude >= velocity > 0"};
    return out;
  }
  const int base_hz =
      std::lcm(sim.plant_hz, std::lcm(sim.attitude_hz, sim.velocity_hz));
  const int plant_div = base_hz / sim.plant_hz;
  const int att_div = base_hz / sim.attitude_hz;
  const int vel_div = base_hz / sim.velocity_hz;

  const double duration = sim.duration > 0.0 ? sim.duration : sc.duration;
  const long n_base = std::lround(duration * base_hz);
  const double plant_dt = 1.0 / sim.plant_hz;
  const double vel_dt = 1.0 / sim.velocity_hz;

  PlantState s = sc.initial_state;
  std::vector<FailureSpec> fails = sc.failures;

  VelocityMpc mpc(cfg);
  BaselinePid pid(cfg, BaselineConfig{});
  AttitudeController att(default_attitude_gains(cfg.vehicle));
  Allocator alloc(cfg);

  // Held controller outputs (zero-order hold between ticks).
  Vec3 v_sp = Vec3::Zero();
  Vec3 psi_sp = Vec3::Zero();
  Vec3 accel_cmd = Vec3::Zero();
  Vec4 tilt_target = s.tilt;
  double thrust_sp = cfg.weight();
  int solver_status = 0;
  int solver_iters = 0;
  int mode = sim.controller == ControllerKind::Mpc ? -1 : 0;
  Vec8 u_sp = Vec8::Zero();
  u_sp.head<4>().setConstant(cfg.hover_rotor_cmd());
  Vec4 tilt_cmd = s.tilt;
  Wrench residual;
  bool saturated = false;

  out.log.reserve(static_cast<size_t>(n_base / plant_div) + 1);

  for (long tick = 0; tick < n_base; ++tick) {
    const double t = static_cast<double>(tick) / base_hz;

    if (tick % plant_div == 0) {
      for (FailureSpec& f : fails) {
        const bool was = f.latched;
        if (apply_failure(f, t, s) && !was && out.failure_time < 0.0) {
          out.failure_time = t;
        }
      }
    }
    const std::optional<FailureSpec> active = merge_active(fails);
    const FailureSpec* fail = active ? &*active : nullptr;

    if (tick % vel_div == 0) {
      v_sp = velocity_setpoint(sc, t);
      if (sim.controller == ControllerKind::Mpc) {
        const MpcCommand c = mpc.step(s, v_sp);
        if (c.status == NlpStatus::NumericFail &&
            !sim.fallback_on_numeric_fail) {
          out.fault = FaultRecord{t, "velocity solver numeric failure"};
          break;
        }
        psi_sp = c.psi_sp;
        thrust_sp = c.thrust_sp;
        tilt_target = c.tilt_target;
        accel_cmd = c.accel_cmd;
        solver_status = static_cast<int>(c.status);
        solver_iters = c.iterations;
      } else {
        const BaselineCommand c = pid.step(s, v_sp, vel_dt);
        psi_sp = c.psi_sp;
        thrust_sp = c.thrust_sp;
        tilt_target = c.tilt_target;
        accel_cmd = c.accel_cmd;
        solver_status = 0;
        solver_iters = 0;
        mode = static_cast<int>(c.mode);
      }
    }

    if (tick % att_div == 0) {
      const Vec3 tau = att.step(psi_sp, s);
      const Wrench w_sp =
          wrench_setpoint(accel_cmd, s.attitude, tau, cfg.vehicle);
      const AllocationResult a = alloc.step(w_sp, s, fail);
      if (a.status == LsqStatus::NumericFail && !sim.fallback_on_numeric_fail) {
        out.fault = FaultRecord{t, "allocation solver numeric failure"};
        break;
      }
      u_sp = a.u_sp;
      residual = a.residual;
      saturated = a.saturated;
      tilt_cmd = constrain_tilt_command(tilt_target, fail);
    }

    if (tick % plant_div == 0) {
      if (!finite(s)) {
        out.fault = FaultRecord{t, "non-finite plant state"};
        break;
      }
      if (std::abs(s.attitude.y()) > deg2rad(89.0)) {
        out.fault = FaultRecord{t, "pitch beyond 89 deg, Euler rates degenerate"};
        break;
      }

      // Failure effects bind at plant rate even mid-hold.
      Vec8 u_applied = u_sp;
      Vec4 tilt_applied = tilt_cmd;
      if (fail) {
        u_applied = u_applied.cwiseMax(fail->lb_abs).cwiseMin(fail->ub_abs);
        tilt_applied = constrain_tilt_command(tilt_applied, fail);
      }

      LogRecord r;
      r.t = t;
      r.position = s.position;
      r.v_sp = v_sp;
      r.v = s.velocity;
      r.attitude = s.attitude;
      r.attitude_sp = psi_sp;
      r.tilt = s.tilt;
      r.tilt_cmd = tilt_applied;
      r.rotor_cmd = u_applied.head<4>();
      r.surfaces = u_applied.tail<4>();
      r.residual = residual;
      r.thrust_sp = thrust_sp;
      r.solver_status = solver_status;
      r.solver_iterations = solver_iters;
      r.saturated = saturated;
      r.failure_active = fail != nullptr;
      r.mode = mode;
      out.log.push_back(r);

      ActuatorCommand cmd;
      cmd.rotor = u_applied.head<4>();
      cmd.aileron_left = u_applied[4];
      cmd.aileron_right = u_applied[5];
      cmd.elevator = u_applied[6];
      cmd.rudder = u_applied[7];
      cmd.tilt_mode = TiltCommandMode::Target;
      cmd.tilt = tilt_applied;
      s = integrate_rk4(s, cmd, plant_dt, cfg);
    }
  }

  out.completed = !out.fault.has_value();
  out.metrics = metrics_from_log(out.log, sc, out.failure_time);
  return out;
}

double settle_time_to(const std::vector<LogRecord>& log, double target,
                      double tol) {
  long last_bad = -1;
  for (size_t i = 0; i < log.size(); ++i) {
    if (std::abs(log[i].v.x() - target) >= tol) last_bad = static_cast<long>(i);
  }
  if (last_bad + 1 >= static_cast<long>(log.size())) return -1.0;
  return log[static_cast<size_t>(last_bad + 1)].t;
}

double recovery_time_after(const std::vector<LogRecord>& log, double t_fail,
                           double tol) {
  long last_bad = -1;
  long first = -1;
  for (size_t i = 0; i < log.size(); ++i) {
    if (log[i].t < t_fail) continue;
    if (first < 0) first = static_cast<long>(i);
    if ((log[i].v - log[i].v_sp).norm() >= tol) last_bad = static_cast<long>(i);
  }
  if (first < 0) return -1.0;
  const long idx = last_bad < 0 ? first : last_bad + 1;
  if (idx >= static_cast<long>(log.size())) return -1.0;
  return log[static_cast<size_t>(idx)].t - t_fail;
}

Metrics metrics_from_log(const std::vector<LogRecord>& log,
                         const ScenarioConfig& sc, double t_fail) {
  Metrics m;
  if (log.empty()) return m;

  Vec3 sq = Vec3::Zero();
  double rotor_sum = 0.0;
  double min_tilt = log.front().tilt_cmd.minCoeff();
  for (const LogRecord& r : log) {
    const Vec3 e = r.v - r.v_sp;
    sq += e.cwiseProduct(e);
    m.max_abs_pitch = std::max(m.max_abs_pitch, std::abs(r.attitude.y()));
    m.max_abs_vz = std::max(m.max_abs_vz, std::abs(r.v.z()));
    rotor_sum += r.rotor_cmd.mean();
    min_tilt = std::min(min_tilt, r.tilt_cmd.minCoeff());
  }
  m.rmse_v = (sq / static_cast<double>(log.size())).cwiseSqrt();
  m.mean_rotor_cmd = rotor_sum / static_cast<double>(log.size());
  m.min_tilt_cmd = min_tilt;

  const double t_end = log.back().t;
  double tilt_sum = 0.0;
  long tilt_n = 0;
  for (const LogRecord& r : log) {
    if (r.t >= t_end - 2.0) {
      tilt_sum += r.tilt_cmd.mean();
      ++tilt_n;
    }
  }
  m.mean_tilt_last2s = tilt_n > 0 ? tilt_sum / tilt_n : 0.0;

  if (sc.kind == ScenarioKind::Acceleration ||
      sc.kind == ScenarioKind::ServoJam) {
    m.settle_time = settle_time_to(log, sc.target_speed, 1.5);
  }
  if (t_fail >= 0.0) {
    m.recovery_time = recovery_time_after(log, t_fail, 1.0);
  }

  if (sc.kind == ScenarioKind::Circle || sc.kind == ScenarioKind::MotorOut) {
    // Steady circular phase: skip the entry transient, then fit a circle
    // (Kasa least squares) and measure radial misses against the commanded
    // radius around the fitted center.
    const double t0 = circle_entry_time(sc) + 5.0;
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    long n = 0;
    double speed_sq = 0.0;
    for (const LogRecord& r : log) {
      if (r.t < t0) continue;
      const double x = r.position.x();
      const double y = r.position.y();
      const Eigen::Vector3d row{x, y, 1.0};
      ata += row * row.transpose();
      atb += row * (x * x + y * y);
      const double dv = r.v.head<2>().norm() - r.v_sp.head<2>().norm();
      speed_sq += dv * dv;
      ++n;
    }
    if (n >= 3) {
      const Eigen::Vector3d abc = ata.ldlt().solve(atb);
      const double cx = 0.5 * abc[0];
      const double cy = 0.5 * abc[1];
      double worst = 0.0;
      for (const LogRecord& r : log) {
        if (r.t < t0) continue;
        const double d = std::hypot(r.position.x() - cx, r.position.y() - cy);
        worst = std::max(worst, std::abs(d - sc.radius));
      }
      m.circle_radius_error = worst;
      m.circle_speed_rmse = std::sqrt(speed_sq / n);
    }
  }
  return m;
}

}  // namespace tiltsim
