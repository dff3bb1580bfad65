#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tiltsim/scenario.hpp"

namespace tiltsim {

enum class ControllerKind { Mpc, BaselinePid };

/// Loop rates and runtime policy. Rates must nest: plant >= attitude >=
/// velocity, all dividing their least common multiple grid exactly.
struct SimConfig {
  int plant_hz{400};
  int attitude_hz{250};
  int velocity_hz{100};
  double duration{0.0};  // s; 0 takes the scenario's duration
  unsigned seed{0};      // reserved for randomized studies; the loop itself is deterministic
  ControllerKind controller{ControllerKind::Mpc};
  bool fallback_on_numeric_fail{true};
};

/// One row per plant step.
struct LogRecord {
  double t{0.0};
  Vec3 position{Vec3::Zero()};
  Vec3 v_sp{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 attitude{Vec3::Zero()};
  Vec3 attitude_sp{Vec3::Zero()};
  Vec4 tilt{Vec4::Zero()};
  Vec4 tilt_cmd{Vec4::Zero()};
  Vec4 rotor_cmd{Vec4::Zero()};
  Vec4 surfaces{Vec4::Zero()};  // aileron left/right, elevator, rudder
  Wrench residual;
  double thrust_sp{0.0};
  int solver_status{0};
  int solver_iterations{0};
  bool saturated{false};
  bool failure_active{false};
  int mode{-1};  // baseline flight mode; -1 when the mpc flies
};

struct FaultRecord {
  double t{0.0};
  std::string reason;
};

struct Metrics {
  Vec3 rmse_v{Vec3::Zero()};
  double max_abs_pitch{0.0};  // rad
  double max_abs_vz{0.0};     // m/s
  double settle_time{-1.0};   // s to the scenario cruise speed, -1 when n/a
  double recovery_time{-1.0};  // s from failure trigger back to tracking, -1 n/a
  double circle_radius_error{-1.0};  // m, worst radial miss, -1 when n/a
  double circle_speed_rmse{-1.0};    // m/s over the circular phase, -1 n/a
  double mean_rotor_cmd{0.0};
  double min_tilt_cmd{0.0};        // rad, smallest commanded tilt of the run
  double mean_tilt_last2s{0.0};    // rad
};

struct RunResult {
  std::vector<LogRecord> log;
  Metrics metrics;
  std::optional<FaultRecord> fault;
  double failure_time{-1.0};  // first trigger latch, -1 if none fired
  bool completed{false};
};

/// Closed-loop run: velocity controller, attitude loop plus allocation, and
/// the plant on their own clocks with zero-order hold between updates.
/// Deterministic: identical inputs give identical logs.
RunResult run_scenario(const ScenarioConfig& sc, const SimConfig& sim,
                       const VehicleConfig& cfg = {});

/// First time after which |v_x - target| stays below tol; -1 if never.
double settle_time_to(const std::vector<LogRecord>& log, double target,
                      double tol);

/// Time from t_fail until |v - v_sp| stays below tol; -1 if never.
double recovery_time_after(const std::vector<LogRecord>& log, double t_fail,
                           double tol);

Metrics metrics_from_log(const std::vector<LogRecord>& log,
                         const ScenarioConfig& sc, double t_fail = -1.0);

}  // namespace tiltsim
