#pragma once

#include "tiltsim/dynamics.hpp"
#include "tiltsim/frames.hpp"
#include "tiltsim/vehicle.hpp"

namespace tiltsim {

enum class FlightMode { Multirotor, Transition, FixedWing };

/// Mode-switching PID stack in the style of the usual open source autopilots:
/// a multirotor velocity loop, a fixed wing loop, and a linear blend between
/// them over an airspeed band.
struct BaselineConfig {
  // Blending starts where the aero effectiveness ramp starts: past that
  // airspeed the polar punishes any real pitch angle, so acceleration has to
  // come from tilt, not from leaning the thrust vector.
  double mr_max_speed{10.0};         // m/s, velocity error clamp in MR mode
  double blend_airspeed{5.0};        // m/s, transition entry
  double transition_airspeed{20.0};  // m/s, fixed wing entry

  double mr_kp{1.2};                 // 1/s
  double mr_ki{0.3};                 // 1/s^2
  double mr_accel_max{6.0};          // m/s^2, horizontal clamp
  double mr_accel_max_z{4.0};        // m/s^2, vertical clamp

  double fw_speed_kp{4.0};           // N per m/s airspeed error
  double fw_speed_ki{1.0};           // N per m
  double fw_thrust_ff{40.0};         // N, cruise feedforward
  double fw_pitch_kp{0.10};          // rad per m/s vertical speed error
  double fw_pitch_trim{deg2rad(2.0)};
  double fw_course_kp{1.5};          // rad roll per rad course error

  double course_speed_min{1.0};      // m/s, hold yaw below this setpoint speed
};

struct BaselineCommand {
  Vec3 psi_sp{Vec3::Zero()};
  double thrust_sp{0.0};
  Vec4 tilt_target{Vec4::Zero()};
  Vec3 accel_cmd{Vec3::Zero()};  // desired total inertial acceleration
  FlightMode mode{FlightMode::Multirotor};
};

class BaselinePid {
 public:
  BaselinePid(const VehicleConfig& cfg, const BaselineConfig& bc)
      : cfg_(cfg), bc_(bc) {}

  BaselineCommand step(const PlantState& plant, const Vec3& v_sp, double dt);
  void reset();

 private:
  BaselineCommand multirotor_law(const PlantState& plant, const Vec3& v_sp,
                                 double dt, double blend);
  BaselineCommand fixed_wing_law(const PlantState& plant, const Vec3& v_sp,
                                 double dt, double blend);

  VehicleConfig cfg_;
  BaselineConfig bc_;
  Vec3 mr_integral_{Vec3::Zero()};  // m/s^2 contribution
  double fw_speed_integral_{0.0};   // N contribution
  double yaw_hold_{0.0};
  bool primed_{false};
};

}  // namespace tiltsim
