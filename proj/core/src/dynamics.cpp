#include "tiltsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace tiltsim {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Vec3 tilt_axis(double chi) { return {std::sin(chi), 0.0, -std::cos(chi)}; }

}  // namespace

AirData airdata(const Vec3& velocity, const Vec3& attitude, const Vec3& wind,
                const AeroParams& aero) {
  const Vec3 rel = velocity - wind;
  const Vec3 vb = rotation_body_to_inertial(attitude).transpose() * rel;
  AirData ad;
  ad.airspeed = vb.norm();
  ad.qbar = 0.5 * aero.rho * ad.airspeed * ad.airspeed;
  if (ad.airspeed > 1e-9) {
    ad.alpha = std::atan2(vb.z(), vb.x());
    ad.beta = std::asin(clamp(vb.y() / ad.airspeed, -1.0, 1.0));
  }
  return ad;
}

double aero_effectiveness(double airspeed, const AeroParams& aero) {
  if (airspeed <= aero.eff_lo) return 0.0;
  if (airspeed >= aero.eff_hi) return 1.0;
  const double s = (airspeed - aero.eff_lo) / (aero.eff_hi - aero.eff_lo);
  return s * s * (3.0 - 2.0 * s);
}

Wrench rotor_wrench(const Vec4& rotor_cmd, const Vec4& tilt,
                    const VehicleParams& vp) {
  Wrench w;
  for (int i = 0; i < 4; ++i) {
    const double w2 = rotor_cmd[i] * rotor_cmd[i];
    const Vec3 axis = tilt_axis(tilt[i]);
    const Vec3 f = vp.thrust_coeff * w2 * axis;
    w.force += f;
    w.moment += vp.rotor_pos[i].cross(f);
    w.moment += vp.spin_dir[i] * vp.reaction_coeff * w2 * axis;
  }
  return w;
}

Wrench aero_wrench(const AirData& ad, double aileron, double elevator,
                   double rudder, const AeroParams& aero) {
  Wrench w;
  const double e = aero_effectiveness(ad.airspeed, aero);
  if (e <= 0.0 || ad.qbar <= 0.0) return w;
  const double a_deg = rad2deg(ad.alpha);
  const double drag = ad.qbar * aero.wing_area * (aero.cd0 + aero.cd_alpha * a_deg * a_deg);
  const double lift = ad.qbar * aero.wing_area * (aero.cz0 + aero.cz_alpha * a_deg * a_deg);
  w.force = rotation_wind_to_body(ad.alpha, ad.beta) * Vec3{-drag, 0.0, -lift};
  w.moment.x() = ad.qbar * aero.aileron_area * aero.span * aero.roll_eff * aileron;
  w.moment.y() = ad.qbar * aero.elevator_area * aero.chord * aero.pitch_eff * elevator;
  w.moment.z() = ad.qbar * aero.rudder_area * aero.span * aero.yaw_eff * rudder;
  w.force *= e;
  w.moment *= e;
  return w;
}

Wrench gravity_wrench(const Vec3& attitude, const VehicleParams& vp) {
  Wrench w;
  w.force = rotation_body_to_inertial(attitude).transpose() *
            Vec3{0.0, 0.0, vp.mass * vp.gravity};
  return w;
}

StateDerivative total_derivative(const PlantState& s, const ActuatorCommand& u,
                                 const VehicleConfig& cfg, const Vec3& wind) {
  const VehicleParams& vp = cfg.vehicle;
  const Limits& lim = cfg.limits;

  Vec4 rotor = u.rotor.cwiseMax(0.0).cwiseMin(1.0);
  // Per rotor thrust saturation expressed on the normalized command.
  const double cmd_max = std::sqrt(lim.rotor_thrust_max / vp.thrust_coeff);
  rotor = rotor.cwiseMin(cmd_max);
  const double ail = clamp(0.5 * (u.aileron_left + u.aileron_right), -1.0, 1.0);
  const double elev = clamp(u.elevator, -1.0, 1.0);
  const double rud = clamp(u.rudder, -1.0, 1.0);

  const AirData ad = airdata(s.velocity, s.attitude, wind, cfg.aero);
  Wrench w = rotor_wrench(rotor, s.tilt, vp);
  w += aero_wrench(ad, ail, elev, rud, cfg.aero);
  w += gravity_wrench(s.attitude, vp);

  const Mat3 r_bi = rotation_body_to_inertial(s.attitude);

  StateDerivative d;
  d.position_dot = s.velocity;
  d.velocity_dot = r_bi * w.force / vp.mass;
  d.attitude_dot = euler_rate_matrix(s.attitude) * s.body_rates;
  const Vec3 iw = vp.inertia_diag.cwiseProduct(s.body_rates);
  d.body_rates_dot = (w.moment - s.body_rates.cross(iw)).cwiseQuotient(vp.inertia_diag);

  for (int i = 0; i < 4; ++i) {
    double rate;
    if (u.tilt_mode == TiltCommandMode::Rate) {
      rate = u.tilt[i];
    } else {
      const double target = clamp(u.tilt[i], lim.tilt_min, lim.tilt_max);
      rate = (target - s.tilt[i]) / lim.servo_tau;
    }
    rate = clamp(rate, -lim.tilt_rate_max, lim.tilt_rate_max);
    // Hard stops.
    if ((s.tilt[i] <= lim.tilt_min && rate < 0.0) ||
        (s.tilt[i] >= lim.tilt_max && rate > 0.0)) {
      rate = 0.0;
    }
    d.tilt_dot[i] = rate;
  }
  return d;
}

namespace {

PlantState advance(const PlantState& s, const StateDerivative& d, double h) {
  PlantState n;
  n.position = s.position + h * d.position_dot;
  n.velocity = s.velocity + h * d.velocity_dot;
  n.attitude = s.attitude + h * d.attitude_dot;
  n.body_rates = s.body_rates + h * d.body_rates_dot;
  n.tilt = s.tilt + h * d.tilt_dot;
  return n;
}

StateDerivative combine(const StateDerivative& k1, const StateDerivative& k2,
                        const StateDerivative& k3, const StateDerivative& k4) {
  StateDerivative d;
  d.position_dot = (k1.position_dot + 2.0 * k2.position_dot + 2.0 * k3.position_dot + k4.position_dot) / 6.0;
  d.velocity_dot = (k1.velocity_dot + 2.0 * k2.velocity_dot + 2.0 * k3.velocity_dot + k4.velocity_dot) / 6.0;
  d.attitude_dot = (k1.attitude_dot + 2.0 * k2.attitude_dot + 2.0 * k3.attitude_dot + k4.attitude_dot) / 6.0;
  d.body_rates_dot = (k1.body_rates_dot + 2.0 * k2.body_rates_dot + 2.0 * k3.body_rates_dot + k4.body_rates_dot) / 6.0;
  d.tilt_dot = (k1.tilt_dot + 2.0 * k2.tilt_dot + 2.0 * k3.tilt_dot + k4.tilt_dot) / 6.0;
  return d;
}

}  // namespace

PlantState integrate_rk4(const PlantState& s, const ActuatorCommand& u,
                         double dt, const VehicleConfig& cfg, const Vec3& wind) {
  const StateDerivative k1 = total_derivative(s, u, cfg, wind);
  const StateDerivative k2 = total_derivative(advance(s, k1, 0.5 * dt), u, cfg, wind);
  const StateDerivative k3 = total_derivative(advance(s, k2, 0.5 * dt), u, cfg, wind);
  const StateDerivative k4 = total_derivative(advance(s, k3, dt), u, cfg, wind);
  PlantState n = advance(s, combine(k1, k2, k3, k4), dt);
  n.attitude.z() = wrap_angle(n.attitude.z());
  for (int i = 0; i < 4; ++i) {
    n.tilt[i] = clamp(n.tilt[i], cfg.limits.tilt_min, cfg.limits.tilt_max);
  }
  return n;
}

}  // namespace tiltsim
