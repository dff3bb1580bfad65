#pragma once

#include <utility>
#include <vector>

#include "tiltsim/allocator.hpp"

namespace tiltsim {

enum class ScenarioKind {
  Hover,
  Acceleration,
  AccelDecel,
  Circle,
  ServoJam,
  MotorOut,
  Custom,
};

/// Velocity setpoint profile, failure injection, and initial state of one run.
struct ScenarioConfig {
  ScenarioKind kind{ScenarioKind::Hover};
  double duration{10.0};

  double target_speed{27.74};  // m/s, cruise speed of the ramp profiles
  double accel_rate{2.0};      // m/s^2, ramp slope
  double hold_time{4.0};       // s at cruise before the decel ramp

  double radius{250.0};        // m, circle scenarios
  double circle_speed{26.0};   // m/s

  std::vector<FailureSpec> failures;
  PlantState initial_state;

  /// Custom profile: (t, v_sp) knots, linearly interpolated, held outside.
  std::vector<std::pair<double, Vec3>> setpoints;
};

/// Setpoint trajectory. Continuous in t for every kind: ramps, holds, and the
/// constant-speed circle tangent; vertical setpoint is zero throughout.
Vec3 velocity_setpoint(const ScenarioConfig& sc, double t);

/// When the acceleration ramp reaches the cruise speed.
double ramp_end_time(const ScenarioConfig& sc);

/// When the straight-line run-in of a circle scenario reaches circle speed
/// and the tangent starts sweeping.
double circle_entry_time(const ScenarioConfig& sc);

/// Canned scenario presets, failure specs included.
ScenarioConfig make_scenario(ScenarioKind kind);

}  // namespace tiltsim
