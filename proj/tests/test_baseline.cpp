#include "tiltsim/baseline.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tiltsim;

namespace {

PlantState forward_flight(double speed) {
  PlantState s;
  s.velocity = Vec3(speed, 0.0, 0.0);
  return s;
}

}  // namespace

TEST(BaselinePid, ModeFollowsAirspeed) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  EXPECT_EQ(pid.step(forward_flight(0.0), Vec3::Zero(), 0.01).mode,
            FlightMode::Multirotor);
  pid.reset();
  EXPECT_EQ(pid.step(forward_flight(15.0), Vec3(20, 0, 0), 0.01).mode,
            FlightMode::Transition);
  pid.reset();
  EXPECT_EQ(pid.step(forward_flight(20.0), Vec3(25, 0, 0), 0.01).mode,
            FlightMode::FixedWing);
}

TEST(BaselinePid, TiltRampsLinearlyThroughTransition) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  const auto mr = pid.step(forward_flight(0.0), Vec3::Zero(), 0.01);
  EXPECT_NEAR(mr.tilt_target[0], 0.0, 1e-12);

  pid.reset();
  const auto mid = pid.step(forward_flight(12.5), Vec3(25, 0, 0), 0.01);
  EXPECT_NEAR(rad2deg(mid.tilt_target[0]), 45.0, 1e-9);

  pid.reset();
  const auto fw = pid.step(forward_flight(20.0), Vec3(25, 0, 0), 0.01);
  EXPECT_NEAR(rad2deg(fw.tilt_target[0]), 90.0, 1e-9);
}

TEST(BaselinePid, HoverHoldCommandsWeight) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  const auto cmd = pid.step(PlantState{}, Vec3::Zero(), 0.01);
  EXPECT_EQ(cmd.mode, FlightMode::Multirotor);
  EXPECT_NEAR(cmd.thrust_sp, cfg.weight(), 1e-6);
  EXPECT_NEAR(cmd.psi_sp.x(), 0.0, 1e-9);
  EXPECT_NEAR(cmd.psi_sp.y(), 0.0, 1e-9);
}

TEST(BaselinePid, ForwardSetpointPitchesNoseDown) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  const auto cmd = pid.step(PlantState{}, Vec3(5.0, 0.0, 0.0), 0.01);
  EXPECT_LT(cmd.psi_sp.y(), -0.05);
  EXPECT_GT(cmd.thrust_sp, cfg.weight() * 0.9);
}

TEST(BaselinePid, VelocityErrorClampBoundsPitch) {
  const VehicleConfig cfg;
  const BaselineConfig bc;
  BaselinePid pid(cfg, bc);

  // Huge speed error: error clamp at 10 m/s, accel clamp at 6 m/s^2, so the
  // commanded pitch stops near atan(6 / 9.81) = 31.5 deg nose down.
  const auto cmd = pid.step(PlantState{}, Vec3(27.74, 0.0, 0.0), 0.01);
  EXPECT_LT(rad2deg(cmd.psi_sp.y()), -25.0);
  EXPECT_GT(rad2deg(cmd.psi_sp.y()), -35.0);
}

TEST(BaselinePid, YawTracksCommandedCourse) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  const auto cmd = pid.step(PlantState{}, Vec3(0.0, 5.0, 0.0), 0.01);
  EXPECT_NEAR(cmd.psi_sp.z(), kPi / 2.0, 1e-9);

  pid.reset();
  // Below the course threshold the yaw setpoint holds the current heading.
  PlantState s;
  s.attitude.z() = 0.7;
  const auto hold = pid.step(s, Vec3(0.2, 0.2, 0.0), 0.01);
  EXPECT_NEAR(hold.psi_sp.z(), 0.7, 1e-9);
}

TEST(BaselinePid, FixedWingThrustTracksAirspeedError) {
  const VehicleConfig cfg;
  const BaselineConfig bc;
  BaselinePid pid(cfg, bc);

  const auto cmd = pid.step(forward_flight(25.0), Vec3(27.74, 0.0, 0.0), 0.01);
  ASSERT_EQ(cmd.mode, FlightMode::FixedWing);
  // Feedforward plus proportional term; the integrator has barely moved.
  const double expect = bc.fw_thrust_ff + bc.fw_speed_kp * (27.74 - 25.0);
  EXPECT_NEAR(cmd.thrust_sp, expect, 0.5);
}

TEST(BaselinePid, FixedWingClimbCommandPitchesUp) {
  const VehicleConfig cfg;
  BaselinePid pid(cfg, BaselineConfig{});

  // Climb setpoint (negative z in NED) while level: pitch must rise above trim.
  const auto climb = pid.step(forward_flight(25.0), Vec3(25.0, 0.0, -2.0), 0.01);
  pid.reset();
  const auto level = pid.step(forward_flight(25.0), Vec3(25.0, 0.0, 0.0), 0.01);
  EXPECT_GT(climb.psi_sp.y(), level.psi_sp.y());
}
