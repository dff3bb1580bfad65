#include "tiltsim/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace tiltsim {

namespace {

// Desired total inertial acceleration a vehicle sees when the rotors push
// thrust along chi and the airframe polar acts, all at the current attitude.
Vec3 accel_from_thrust(double thrust, double chi, const PlantState& plant,
                       const VehicleConfig& cfg) {
  const Vec3 thrust_body(thrust * std::sin(chi), 0.0, -thrust * std::cos(chi));
  const AirData ad = airdata(plant.velocity, plant.attitude, Vec3::Zero(), cfg.aero);
  const Wrench aero = aero_wrench(ad, 0.0, 0.0, 0.0, cfg.aero);
  const Mat3 r = rotation_body_to_inertial(plant.attitude);
  return (r * (thrust_body + aero.force)) / cfg.vehicle.mass +
         Vec3(0.0, 0.0, cfg.vehicle.gravity);
}

}  // namespace

void BaselinePid::reset() {
  mr_integral_.setZero();
  fw_speed_integral_ = 0.0;
  yaw_hold_ = 0.0;
  primed_ = false;
}

BaselineCommand BaselinePid::multirotor_law(const PlantState& plant,
                                            const Vec3& v_sp, double dt,
                                            double blend) {
  const double g = cfg_.vehicle.gravity;
  const double m = cfg_.vehicle.mass;

  // Pitch authority narrows sharply once the wing starts flying: the polar
  // grows with the square of alpha in degrees, so a multirotor-style lean
  // that is harmless at 4 m/s stalls the acceleration outright at 8.
  const AirData ad = airdata(plant.velocity, plant.attitude, Vec3::Zero(), cfg_.aero);
  const double fade =
      std::clamp((ad.airspeed - bc_.blend_airspeed) / 2.0, 0.0, 1.0);
  const double pitch_cap = deg2rad(35.0 * (1.0 - fade) + 6.0 * fade);

  Vec3 err = v_sp - plant.velocity;
  const double eh = err.head<2>().norm();
  if (eh > bc_.mr_max_speed) err.head<2>() *= bc_.mr_max_speed / eh;
  err.z() = std::clamp(err.z(), -bc_.mr_max_speed, bc_.mr_max_speed);

  // Freeze the integrator while blending out, it only causes windup there.
  if (blend <= 0.0) {
    mr_integral_ += bc_.mr_ki * err * dt;
    mr_integral_ = mr_integral_.cwiseMax(-2.0).cwiseMin(2.0);
  }

  Vec3 a_cmd = bc_.mr_kp * err + mr_integral_;
  const double ah = a_cmd.head<2>().norm();
  if (ah > bc_.mr_accel_max) a_cmd.head<2>() *= bc_.mr_accel_max / ah;
  a_cmd.z() = std::clamp(a_cmd.z(), -bc_.mr_accel_max_z, bc_.mr_accel_max_z);

  // Specific force request, then attitude that points the rotors along it.
  const Vec3 f = m * (a_cmd - Vec3(0.0, 0.0, g));
  const double yaw = plant.attitude.z();
  const double f_fwd = std::cos(yaw) * f.x() + std::sin(yaw) * f.y();
  const double f_side = -std::sin(yaw) * f.x() + std::cos(yaw) * f.y();
  const double f_up = std::max(-f.z(), 0.3 * m * g);

  BaselineCommand cmd;
  cmd.mode = FlightMode::Multirotor;
  cmd.psi_sp.x() = std::clamp(std::atan2(f_side, f_up), -kPi / 4.0, kPi / 4.0);
  cmd.psi_sp.y() = std::clamp(std::atan2(-f_fwd, f_up), -pitch_cap, pitch_cap);
  cmd.psi_sp.z() = yaw_hold_;
  cmd.thrust_sp = std::clamp(f.norm(), 0.0, 4.0 * cfg_.limits.rotor_thrust_max);
  cmd.tilt_target.setZero();
  cmd.accel_cmd = a_cmd;
  return cmd;
}

BaselineCommand BaselinePid::fixed_wing_law(const PlantState& plant,
                                            const Vec3& v_sp, double dt,
                                            double blend) {
  const AirData ad = airdata(plant.velocity, plant.attitude, Vec3::Zero(), cfg_.aero);

  const double v_target = v_sp.head<2>().norm();
  const double speed_err = v_target - ad.airspeed;
  if (blend >= 1.0) {
    fw_speed_integral_ += bc_.fw_speed_ki * speed_err * dt;
    // Cruise drag eats most of the rotor budget, leave the integrator room
    // to carry it.
    fw_speed_integral_ = std::clamp(fw_speed_integral_, -70.0, 70.0);
  }

  BaselineCommand cmd;
  cmd.mode = FlightMode::FixedWing;
  cmd.thrust_sp =
      std::clamp(bc_.fw_thrust_ff + bc_.fw_speed_kp * speed_err + fw_speed_integral_,
                 0.0, 4.0 * cfg_.limits.rotor_thrust_max);

  cmd.psi_sp.y() = std::clamp(
      bc_.fw_pitch_trim + bc_.fw_pitch_kp * (plant.velocity.z() - v_sp.z()),
      -kPi / 3.0, kPi / 3.0);

  const double course_sp = yaw_hold_;  // step() resolves the course first
  const double ground_speed = plant.velocity.head<2>().norm();
  const double course = ground_speed > 0.5
                            ? std::atan2(plant.velocity.y(), plant.velocity.x())
                            : plant.attitude.z();
  cmd.psi_sp.x() = std::clamp(bc_.fw_course_kp * angle_diff(course_sp, course),
                              -kPi / 4.0, kPi / 4.0);
  cmd.psi_sp.z() = course_sp;

  cmd.tilt_target.setConstant(deg2rad(90.0));
  cmd.accel_cmd = accel_from_thrust(cmd.thrust_sp, deg2rad(90.0), plant, cfg_);
  return cmd;
}

BaselineCommand BaselinePid::step(const PlantState& plant, const Vec3& v_sp,
                                  double dt) {
  if (!primed_) {
    yaw_hold_ = plant.attitude.z();
    primed_ = true;
  }
  if (v_sp.head<2>().norm() > bc_.course_speed_min) {
    yaw_hold_ = std::atan2(v_sp.y(), v_sp.x());
  }

  const AirData ad = airdata(plant.velocity, plant.attitude, Vec3::Zero(), cfg_.aero);
  const double blend =
      std::clamp((ad.airspeed - bc_.blend_airspeed) /
                     (bc_.transition_airspeed - bc_.blend_airspeed),
                 0.0, 1.0);

  if (blend <= 0.0) return multirotor_law(plant, v_sp, dt, blend);
  if (blend >= 1.0) return fixed_wing_law(plant, v_sp, dt, blend);

  const BaselineCommand mr = multirotor_law(plant, v_sp, dt, blend);
  const BaselineCommand fw = fixed_wing_law(plant, v_sp, dt, blend);

  BaselineCommand cmd;
  cmd.mode = FlightMode::Transition;
  cmd.psi_sp.x() = (1.0 - blend) * mr.psi_sp.x() + blend * fw.psi_sp.x();
  cmd.psi_sp.y() = (1.0 - blend) * mr.psi_sp.y() + blend * fw.psi_sp.y();
  // Both laws put yaw on the course track, blending is a no-op there.
  cmd.psi_sp.z() = yaw_hold_;
  cmd.thrust_sp = (1.0 - blend) * mr.thrust_sp + blend * fw.thrust_sp;
  cmd.tilt_target.setConstant(blend * deg2rad(90.0));
  cmd.accel_cmd = (1.0 - blend) * mr.accel_cmd + blend * fw.accel_cmd;
  return cmd;
}

}  // namespace tiltsim
