#include "tiltsim/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace tiltsim {

double ramp_end_time(const ScenarioConfig& sc) {
  return sc.target_speed / sc.accel_rate;
}

double circle_entry_time(const ScenarioConfig& sc) {
  return sc.circle_speed / sc.accel_rate;
}

namespace {

Vec3 ramp_profile(const ScenarioConfig& sc, double t) {
  return {std::min(sc.accel_rate * t, sc.target_speed), 0.0, 0.0};
}

Vec3 accel_decel_profile(const ScenarioConfig& sc, double t) {
  const double t_up = ramp_end_time(sc);
  const double t_down = t_up + sc.hold_time;
  if (t <= t_down) return ramp_profile(sc, t);
  const double vx = sc.target_speed - sc.accel_rate * (t - t_down);
  return {std::max(vx, 0.0), 0.0, 0.0};
}

Vec3 circle_profile(const ScenarioConfig& sc, double t) {
  const double t0 = circle_entry_time(sc);
  if (t < t0) return {sc.accel_rate * t, 0.0, 0.0};
  const double theta = (t - t0) * sc.circle_speed / sc.radius;
  return {sc.circle_speed * std::cos(theta), sc.circle_speed * std::sin(theta),
          0.0};
}

Vec3 custom_profile(const ScenarioConfig& sc, double t) {
  const auto& pts = sc.setpoints;
  if (pts.empty()) return Vec3::Zero();
  if (t <= pts.front().first) return pts.front().second;
  if (t >= pts.back().first) return pts.back().second;
  for (size_t i = 1; i < pts.size(); ++i) {
    if (t <= pts[i].first) {
      const double span = pts[i].first - pts[i - 1].first;
      const double s = span > 0.0 ? (t - pts[i - 1].first) / span : 1.0;
      return pts[i - 1].second + s * (pts[i].second - pts[i - 1].second);
    }
  }
  return pts.back().second;
}

}  // namespace

Vec3 velocity_setpoint(const ScenarioConfig& sc, double t) {
  switch (sc.kind) {
    case ScenarioKind::Hover:
      return Vec3::Zero();
    case ScenarioKind::Acceleration:
    case ScenarioKind::ServoJam:
      return ramp_profile(sc, t);
    case ScenarioKind::AccelDecel:
      return accel_decel_profile(sc, t);
    case ScenarioKind::Circle:
    case ScenarioKind::MotorOut:
      return circle_profile(sc, t);
    case ScenarioKind::Custom:
      return custom_profile(sc, t);
  }
  return Vec3::Zero();
}

ScenarioConfig make_scenario(ScenarioKind kind) {
  ScenarioConfig sc;
  sc.kind = kind;
  switch (kind) {
    case ScenarioKind::Hover:
      sc.duration = 10.0;
      break;
    case ScenarioKind::Acceleration:
      sc.duration = 32.0;
      break;
    case ScenarioKind::AccelDecel:
      // Ramp up, 4 s hold, mirrored ramp down, then a hover tail.
      sc.duration = 36.0;
      break;
    case ScenarioKind::Circle:
      // Run-in plus one full circumference and a little margin.
      sc.duration = 76.0;
      break;
    case ScenarioKind::ServoJam: {
      sc.duration = 32.0;
      FailureSpec jam;
      jam.jam_servo = 0;
      jam.jam_angle = deg2rad(60.0);
      jam.at_airspeed = 8.0;
      sc.failures.push_back(jam);
      break;
    }
    case ScenarioKind::MotorOut: {
      sc.duration = 76.0;
      FailureSpec dead;
      dead.lb_abs[0] = 0.0;
      dead.ub_abs[0] = 0.0;
      dead.at_yaw = kPi / 2.0;
      sc.failures.push_back(dead);
      break;
    }
    case ScenarioKind::Custom:
      break;
  }
  return sc;
}

}  // namespace tiltsim
