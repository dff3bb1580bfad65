#pragma once

#include <array>

#include "tiltsim/frames.hpp"

namespace tiltsim {

/// Rigid body and rotor constants. Defaults describe the desk scale tiltrotor
/// testbed; everything is overridable from the vehicle config file.
struct VehicleParams {
  double mass{7.427};                       // kg
  Vec3 inertia_diag{10.685, 5.7465, 4.6678};  // kg m^2, body x/y/z
  double thrust_coeff{27.36};               // N per unit squared rotor command
  double reaction_coeff{0.016 * 27.36};     // N m per unit squared rotor command
  // Rotor order: 1 front right, 2 front left, 3 rear left, 4 rear right.
  std::array<Vec3, 4> rotor_pos{Vec3{0.35, 0.40, 0.0}, Vec3{0.35, -0.40, 0.0},
                                Vec3{-0.35, -0.40, 0.0}, Vec3{-0.35, 0.40, 0.0}};
  // Spin direction sign of the reaction torque; alternating so the sum cancels.
  std::array<double, 4> spin_dir{1.0, -1.0, 1.0, -1.0};
  double gravity{9.81};  // m/s^2
};

/// Fixed wing surface constants. The drag and lift polars take the angle of
/// attack in degrees.
struct AeroParams {
  double rho{1.225};         // kg/m^3
  double wing_area{0.44};    // m^2
  double cd0{0.35};
  double cd_alpha{0.11};     // per deg^2
  double cz0{0.03};
  double cz_alpha{0.2};      // per deg^2
  double aileron_area{0.036};   // m^2, per pair
  double elevator_area{0.1364}; // m^2
  double rudder_area{0.004};    // m^2
  double span{2.0};          // m
  double chord{0.22};        // m
  double roll_eff{0.1173};   // aileron moment coefficient at full deflection
  double pitch_eff{0.556};   // elevator moment coefficient at full deflection
  double yaw_eff{0.0881};    // rudder moment coefficient at full deflection
  double eff_lo{5.0};        // m/s, surfaces dead below this airspeed
  double eff_hi{15.0};       // m/s, surfaces fully effective above this
};

/// Actuator travel and rate limits shared by the plant and the controllers.
struct Limits {
  double tilt_min{deg2rad(-7.0)};
  double tilt_max{deg2rad(95.0)};
  double tilt_rate_max{kPi / 4.0};   // rad/s
  double servo_tau{0.05};            // s, tilt servo tracking constant
  double rotor_thrust_max{27.36};    // N per rotor, plant saturation
};

/// One bundle for everything the dynamics and controllers need.
struct VehicleConfig {
  VehicleParams vehicle;
  AeroParams aero;
  Limits limits;

  double weight() const { return vehicle.mass * vehicle.gravity; }
  /// Rotor command that balances gravity with all tilts upright.
  double hover_rotor_cmd() const {
    return std::sqrt(weight() / (4.0 * vehicle.thrust_coeff));
  }
};

}  // namespace tiltsim
