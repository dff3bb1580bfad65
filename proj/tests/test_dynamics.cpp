#include "tiltsim/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tiltsim;

namespace {

const VehicleConfig kCfg{};

double norm_of(const StateDerivative& d) {
  return std::sqrt(d.position_dot.squaredNorm() + d.velocity_dot.squaredNorm() +
                   d.attitude_dot.squaredNorm() + d.body_rates_dot.squaredNorm() +
                   d.tilt_dot.squaredNorm());
}

}  // namespace

TEST(AirData, AtRestEverythingIsZero) {
  const AirData ad = airdata(Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), kCfg.aero);
  EXPECT_EQ(ad.airspeed, 0.0);
  EXPECT_EQ(ad.alpha, 0.0);
  EXPECT_EQ(ad.beta, 0.0);
  EXPECT_EQ(ad.qbar, 0.0);
}

TEST(AirData, AlphaFromBodyVelocity) {
  // Level attitude, inertial velocity (10, 0, 1): alpha = atan2(1, 10).
  const AirData ad = airdata({10.0, 0.0, 1.0}, Vec3::Zero(), Vec3::Zero(), kCfg.aero);
  EXPECT_NEAR(rad2deg(ad.alpha), 5.710593, 1e-5);
  EXPECT_NEAR(ad.airspeed, std::sqrt(101.0), 1e-12);
  EXPECT_NEAR(ad.beta, 0.0, 1e-12);
}

TEST(AirData, DynamicPressureAt26) {
  const AirData ad = airdata({26.0, 0.0, 0.0}, Vec3::Zero(), Vec3::Zero(), kCfg.aero);
  EXPECT_NEAR(ad.qbar, 414.05, 1e-9);
}

TEST(AirData, WindIsSubtracted) {
  const AirData ad = airdata({10.0, 0.0, 0.0}, Vec3::Zero(), {4.0, 0.0, 0.0}, kCfg.aero);
  EXPECT_NEAR(ad.airspeed, 6.0, 1e-12);
}

TEST(AeroEffectiveness, RampEndpointsAndMidpoint) {
  EXPECT_EQ(aero_effectiveness(0.0, kCfg.aero), 0.0);
  EXPECT_EQ(aero_effectiveness(5.0, kCfg.aero), 0.0);
  EXPECT_EQ(aero_effectiveness(15.0, kCfg.aero), 1.0);
  EXPECT_EQ(aero_effectiveness(30.0, kCfg.aero), 1.0);
  EXPECT_NEAR(aero_effectiveness(10.0, kCfg.aero), 0.5, 1e-12);
}

TEST(AeroEffectiveness, MonotoneOnRamp) {
  double prev = -1.0;
  for (double v = 0.0; v <= 20.0; v += 0.25) {
    const double e = aero_effectiveness(v, kCfg.aero);
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(RotorWrench, HoverCommandCarriesTheWeight) {
  // Printed hover command 0.8160 gives 4 * 27.36 * 0.8160^2 = 72.87 N up.
  const Wrench w = rotor_wrench(Vec4::Constant(0.8160), Vec4::Zero(), kCfg.vehicle);
  EXPECT_NEAR(w.force.x(), 0.0, 1e-12);
  EXPECT_NEAR(w.force.y(), 0.0, 1e-12);
  EXPECT_NEAR(w.force.z(), -72.86, 0.02);
  EXPECT_NEAR(w.moment.norm(), 0.0, 1e-12);
}

TEST(RotorWrench, ExactHoverCommand) {
  const double cmd = kCfg.hover_rotor_cmd();
  EXPECT_NEAR(cmd, 0.8160, 1e-4);
  const Wrench w = rotor_wrench(Vec4::Constant(cmd), Vec4::Zero(), kCfg.vehicle);
  EXPECT_NEAR(w.force.z(), -kCfg.weight(), 1e-9);
}

TEST(RotorWrench, FullTiltPointsThrustForward) {
  const Wrench w = rotor_wrench({1.0, 0.0, 0.0, 0.0}, Vec4::Constant(kPi / 2.0),
                                kCfg.vehicle);
  EXPECT_NEAR(w.force.x(), 27.36, 1e-9);
  EXPECT_NEAR(w.force.z(), 0.0, 1e-9);
}

TEST(RotorWrench, FrontBiasPitchesNoseUp) {
  const Wrench w = rotor_wrench({0.9, 0.9, 0.7, 0.7}, Vec4::Zero(), kCfg.vehicle);
  EXPECT_GT(w.moment.y(), 0.0);
  EXPECT_NEAR(w.moment.x(), 0.0, 1e-12);
  EXPECT_NEAR(w.moment.z(), 0.0, 1e-12);
}

TEST(RotorWrench, ThrustSlopeAtHover) {
  // dFz/dcmd of one rotor at the hover point, finite differenced.
  const double cmd = 0.8160;
  const double h = 1e-7;
  Vec4 up = Vec4::Constant(cmd), dn = Vec4::Constant(cmd);
  up[0] += h;
  dn[0] -= h;
  const double slope = (rotor_wrench(up, Vec4::Zero(), kCfg.vehicle).force.z() -
                        rotor_wrench(dn, Vec4::Zero(), kCfg.vehicle).force.z()) /
                       (2.0 * h);
  EXPECT_NEAR(slope, -2.0 * kCfg.vehicle.thrust_coeff * cmd, 1e-5);
  EXPECT_NEAR(slope, -44.66, 0.02);
}

TEST(AeroWrench, TrimAlphaLiftsTheWeight) {
  // At 26 m/s the polar needs C_Z = mg / (qbar S); solve for alpha in degrees.
  const double qs = 414.05 * kCfg.aero.wing_area;
  const double cz = kCfg.weight() / qs;
  const double alpha_deg = std::sqrt((cz - kCfg.aero.cz0) / kCfg.aero.cz_alpha);
  EXPECT_NEAR(alpha_deg, 1.360, 1e-3);

  AirData ad;
  ad.airspeed = 26.0;
  ad.alpha = deg2rad(alpha_deg);
  ad.qbar = 414.05;
  const Wrench w = aero_wrench(ad, 0.0, 0.0, 0.0, kCfg.aero);
  const Vec3 f_wind = rotation_wind_to_body(ad.alpha, ad.beta).transpose() * w.force;
  EXPECT_NEAR(-f_wind.z(), kCfg.weight(), 1e-6);
  EXPECT_LT(f_wind.x(), 0.0);
}

TEST(AeroWrench, FullAileronRollMoment) {
  AirData ad;
  ad.airspeed = 26.0;
  ad.qbar = 414.05;
  const Wrench w = aero_wrench(ad, 1.0, 0.0, 0.0, kCfg.aero);
  EXPECT_NEAR(w.moment.x(), 3.497, 1e-3);
  EXPECT_EQ(w.moment.y(), 0.0);
  EXPECT_EQ(w.moment.z(), 0.0);
}

TEST(AeroWrench, DeadBelowEffectivenessFloor) {
  AirData ad;
  ad.airspeed = 4.0;
  ad.qbar = 0.5 * 1.225 * 16.0;
  const Wrench w = aero_wrench(ad, 1.0, 1.0, 1.0, kCfg.aero);
  EXPECT_EQ(w.force.norm(), 0.0);
  EXPECT_EQ(w.moment.norm(), 0.0);
}

TEST(GravityWrench, LevelAndInverted) {
  const Wrench level = gravity_wrench(Vec3::Zero(), kCfg.vehicle);
  EXPECT_TRUE(level.force.isApprox(Vec3{0.0, 0.0, kCfg.weight()}, 1e-12));

  const Wrench inverted = gravity_wrench({kPi, 0.0, 0.0}, kCfg.vehicle);
  EXPECT_NEAR(inverted.force.z(), -kCfg.weight(), 1e-9);
}

TEST(GravityWrench, VerticalFlight) {
  // Nose straight up: gravity pulls toward the tail, -x in body axes.
  const Wrench nose_up = gravity_wrench({0.0, kPi / 2.0, 0.0}, kCfg.vehicle);
  EXPECT_NEAR(nose_up.force.x(), -kCfg.weight(), 1e-9);
  EXPECT_NEAR(nose_up.force.z(), 0.0, 1e-9);

  const Wrench nose_down = gravity_wrench({0.0, -kPi / 2.0, 0.0}, kCfg.vehicle);
  EXPECT_NEAR(nose_down.force.x(), kCfg.weight(), 1e-9);
}

TEST(TotalDerivative, FreeFall) {
  const PlantState s{};
  const ActuatorCommand u{};
  const StateDerivative d = total_derivative(s, u, kCfg);
  EXPECT_TRUE(d.velocity_dot.isApprox(Vec3{0.0, 0.0, 9.81}, 1e-12));
  EXPECT_EQ(d.position_dot.norm(), 0.0);
  EXPECT_EQ(d.attitude_dot.norm(), 0.0);
  EXPECT_EQ(d.body_rates_dot.norm(), 0.0);
}

TEST(TotalDerivative, HoverTrimIsAnEquilibrium) {
  PlantState s{};
  ActuatorCommand u{};
  u.rotor = Vec4::Constant(kCfg.hover_rotor_cmd());
  const StateDerivative d = total_derivative(s, u, kCfg);
  EXPECT_LT(norm_of(d), 1e-6);
}

TEST(TotalDerivative, RotorCommandsSaturate) {
  PlantState s{};
  ActuatorCommand u{};
  u.rotor = Vec4::Constant(3.0);
  const StateDerivative d = total_derivative(s, u, kCfg);
  const double max_accel = 4.0 * kCfg.limits.rotor_thrust_max / kCfg.vehicle.mass;
  EXPECT_NEAR(d.velocity_dot.z(), 9.81 - max_accel, 1e-9);
}

TEST(TotalDerivative, TiltTargetTracksWithRateLimit) {
  PlantState s{};
  ActuatorCommand u{};
  u.tilt_mode = TiltCommandMode::Target;
  u.tilt = Vec4::Constant(1.0);  // far target, rate limit applies
  StateDerivative d = total_derivative(s, u, kCfg);
  EXPECT_NEAR(d.tilt_dot[0], kCfg.limits.tilt_rate_max, 1e-12);

  u.tilt = Vec4::Constant(0.01);  // near target, first order tracking
  d = total_derivative(s, u, kCfg);
  EXPECT_NEAR(d.tilt_dot[0], 0.01 / kCfg.limits.servo_tau, 1e-12);
}

TEST(TotalDerivative, TiltStopsAtTravelEnds) {
  PlantState s{};
  s.tilt = Vec4::Constant(kCfg.limits.tilt_max);
  ActuatorCommand u{};
  u.tilt = Vec4::Constant(1.0);  // keep pushing up
  const StateDerivative d = total_derivative(s, u, kCfg);
  EXPECT_EQ(d.tilt_dot[0], 0.0);
}

TEST(IntegrateRk4, FreeFallClosedForm) {
  // Airframe drag removed so the closed form v = g t holds exactly.
  VehicleConfig cfg = kCfg;
  cfg.aero.cd0 = cfg.aero.cd_alpha = cfg.aero.cz0 = cfg.aero.cz_alpha = 0.0;
  PlantState s{};
  const ActuatorCommand u{};
  const double dt = 1.0 / 400.0;
  for (int i = 0; i < 400; ++i) s = integrate_rk4(s, u, dt, cfg);
  EXPECT_NEAR(s.velocity.z(), 9.81, 1e-9);
  EXPECT_NEAR(s.position.z(), 0.5 * 9.81, 1e-9);
}

TEST(IntegrateRk4, YawStaysWrapped) {
  PlantState s{};
  s.attitude.z() = deg2rad(179.0);
  s.body_rates.z() = 1.0;
  ActuatorCommand u{};
  u.rotor = Vec4::Constant(kCfg.hover_rotor_cmd());
  for (int i = 0; i < 100; ++i) s = integrate_rk4(s, u, 0.0025, kCfg);
  EXPECT_LE(s.attitude.z(), kPi);
  EXPECT_GT(s.attitude.z(), -kPi);
}

TEST(IntegrateRk4, ConvergenceOrderIsFour) {
  // Step halving on a smooth transition state; order = log2 of the error ratio.
  PlantState s0{};
  s0.velocity = {12.0, 1.0, -1.0};
  s0.attitude = {0.05, -0.1, 0.3};
  s0.body_rates = {0.1, -0.2, 0.15};
  s0.tilt = {0.2, 0.3, 0.4, 0.5};
  ActuatorCommand u{};
  u.rotor = {0.7, 0.8, 0.75, 0.85};
  u.aileron_left = 0.1;
  u.aileron_right = 0.1;
  u.elevator = -0.2;
  u.rudder = 0.05;
  u.tilt = Vec4::Constant(0.1);

  auto propagate = [&](double h, int n) {
    PlantState s = s0;
    for (int i = 0; i < n; ++i) s = integrate_rk4(s, u, h, kCfg);
    return s;
  };
  auto dist = [](const PlantState& a, const PlantState& b) {
    return std::sqrt((a.position - b.position).squaredNorm() +
                     (a.velocity - b.velocity).squaredNorm() +
                     (a.attitude - b.attitude).squaredNorm() +
                     (a.body_rates - b.body_rates).squaredNorm() +
                     (a.tilt - b.tilt).squaredNorm());
  };

  const PlantState y1 = propagate(0.01, 10);
  const PlantState y2 = propagate(0.005, 20);
  const PlantState y4 = propagate(0.0025, 40);
  const double e1 = dist(y1, y2);
  const double e2 = dist(y2, y4);
  ASSERT_GT(e2, 1e-14);
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.9);
  EXPECT_LE(order, 6.0);
}
