#include "tiltsim/velocity_mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tiltsim {

using Eigen::VectorXd;

Eigen::VectorXd MpcState::pack() const {
  VectorXd z(16);
  z.segment<3>(0) = v;
  z.segment<4>(3) = chi;
  z.segment<3>(7) = psi;
  z.segment<3>(10) = psi_dot;
  z.segment<3>(13) = psi_dot_prev;
  return z;
}

MpcState MpcState::unpack(const Eigen::VectorXd& z) {
  MpcState x;
  x.v = z.segment<3>(0);
  x.chi = z.segment<4>(3);
  x.psi = z.segment<3>(7);
  x.psi_dot = z.segment<3>(10);
  x.psi_dot_prev = z.segment<3>(13);
  return x;
}

Eigen::VectorXd MpcInput::pack() const {
  VectorXd z(8);
  z.segment<4>(0) = chi_rate;
  z[4] = thrust;
  z.segment<3>(5) = psi_d;
  return z;
}

MpcInput MpcInput::unpack(const Eigen::VectorXd& z) {
  MpcInput u;
  u.chi_rate = z.segment<4>(0);
  u.thrust = z[4];
  u.psi_d = z.segment<3>(5);
  return u;
}

namespace {

// The exponential is fitted for tilts in [0, 90] deg. Below zero the raw
// formula would reward tilting backward at rest, so negative tilts map to
// zero. The ramp is C1 with zero slope at zero (no pull on a hovering
// vehicle, no kink for the solver) and is exact above one degree.
double tilt_floor_deg(double x) {
  constexpr double ramp = 1.0;
  if (x <= 0.0) return 0.0;
  if (x >= ramp) return x;
  const double t = x / ramp;
  return ramp * t * t * (2.0 - t);
}

}  // namespace

double mpc_soft_cost(double v_fwd, double mean_tilt_deg, const MpcWeights& w) {
  const double x = tilt_floor_deg(mean_tilt_deg);
  return std::exp(w.soft_a * v_fwd * x + w.soft_b * x + w.soft_c * v_fwd +
                  w.soft_d);
}

namespace {

// Above this exponent the residual grows only logarithmically. Keeps the
// Gauss-Newton products conditioned when an iterate strays deep into the
// expensive region while the pull-out gradient stays nonzero.
constexpr double kSoftArgKnee = 30.0;

double soft_residual(const MpcState& x, const MpcWeights& w) {
  const double v_fwd = (rotation_body_to_inertial(x.psi).transpose() * x.v).x();
  const double tilt_deg = tilt_floor_deg(rad2deg(x.chi.mean()));
  double arg = w.soft_a * v_fwd * tilt_deg + w.soft_b * tilt_deg +
               w.soft_c * v_fwd + w.soft_d;
  if (arg > kSoftArgKnee) arg = kSoftArgKnee + std::log1p(arg - kSoftArgKnee);
  return std::exp(0.5 * arg);
}

// 18 rows: velocity tracking (3), attitude (3), attitude rate (3), tilt rates
// (4), thrust about hover trim (1), attitude setpoint (3), soft term (1).
// Yaw entries are measured from yaw_ref so a steady heading costs nothing.
VectorXd stage_residual_impl(const MpcState& x, const MpcInput& u,
                             const Vec3& v_sp, const MpcWeights& w, double mg,
                             double yaw_ref) {
  VectorXd r(18);
  r.segment<3>(0) = w.q_ref.cwiseSqrt().cwiseProduct(x.v - v_sp);
  Vec3 psi_err(x.psi.x(), x.psi.y(), x.psi.z() - yaw_ref);
  r.segment<3>(3) = w.q_psi.cwiseSqrt().cwiseProduct(psi_err);
  r.segment<3>(6) = w.q_psidot.cwiseSqrt().cwiseProduct(x.psi_dot);
  r.segment<4>(9) = std::sqrt(w.r_tilt_rate) * u.chi_rate;
  r[13] = std::sqrt(w.r_thrust) * (u.thrust - mg);
  Vec3 psi_d_err(u.psi_d.x(), u.psi_d.y(), u.psi_d.z() - yaw_ref);
  r.segment<3>(14) = w.r_psi_d.cwiseSqrt().cwiseProduct(psi_d_err);
  r[17] = soft_residual(x, w);
  return r;
}

}  // namespace

double mpc_cost(const MpcState& x, const MpcInput& u, const Vec3& v_sp,
                const MpcWeights& w, const VehicleConfig& cfg, double yaw_ref) {
  return stage_residual_impl(x, u, v_sp, w, cfg.weight(), yaw_ref).squaredNorm();
}

MpcState mpc_predict(const MpcState& x, const MpcInput& u, double dt,
                     const AttitudeGains& g, const VehicleConfig& cfg) {
  const Mat3 r = rotation_body_to_inertial(x.psi);

  Vec3 thrust_body = Vec3::Zero();
  for (int i = 0; i < 4; ++i) {
    thrust_body += 0.25 * u.thrust *
                   Vec3(std::sin(x.chi[i]), 0.0, -std::cos(x.chi[i]));
  }
  const AirData ad = airdata(x.v, x.psi, Vec3::Zero(), cfg.aero);
  const Wrench aero = aero_wrench(ad, 0.0, 0.0, 0.0, cfg.aero);

  const Vec3 v_dot = (r * (thrust_body + aero.force)) / cfg.vehicle.mass +
                     Vec3(0.0, 0.0, cfg.vehicle.gravity);
  const Vec3 tau = attitude_torque(u.psi_d, x.psi, x.psi_dot, x.psi_dot_prev, g);

  MpcState n;
  n.v = x.v + dt * v_dot;
  n.chi = x.chi + dt * u.chi_rate;
  n.psi = x.psi + dt * x.psi_dot;
  n.psi_dot = x.psi_dot + dt * tau.cwiseQuotient(cfg.vehicle.inertia_diag);
  n.psi_dot_prev = x.psi_dot;
  return n;
}

VelocityMpc::VelocityMpc(const VehicleConfig& cfg, const MpcWeights& w,
                         const AttitudeGains& g, const MpcOptions& opt)
    : cfg_(cfg), weights_(w), gains_(g), opt_(opt) {}

VelocityMpc::VelocityMpc(const VehicleConfig& cfg)
    : VelocityMpc(cfg, MpcWeights{}, default_attitude_gains(cfg.vehicle)) {}

void VelocityMpc::reset() {
  warm_ = NlpSolution{};
  has_warm_ = false;
  primed_ = false;
  yaw_track_ = 0.0;
  last_yaw_meas_ = 0.0;
  prev_psi_dot_.setZero();
}

MpcCommand VelocityMpc::step(const PlantState& plant, const Vec3& v_sp_in) {
  const double inf = std::numeric_limits<double>::infinity();

  // Keep yaw on a continuous branch across wrap-arounds so setpoints, boxes
  // and the warm start all live on the same track.
  const double yaw_meas = plant.attitude.z();
  if (primed_) {
    yaw_track_ += angle_diff(yaw_meas, last_yaw_meas_);
  } else {
    yaw_track_ = yaw_meas;
  }
  last_yaw_meas_ = yaw_meas;

  const Vec3 psi_dot_now = euler_rate_matrix(plant.attitude) * plant.body_rates;
  const Vec3 psi_dot_prev = primed_ ? prev_psi_dot_ : psi_dot_now;
  prev_psi_dot_ = psi_dot_now;
  primed_ = true;

  MpcState x0;
  x0.v = plant.velocity;
  x0.chi = plant.tilt.cwiseMax(cfg_.limits.tilt_min).cwiseMin(cfg_.limits.tilt_max);
  x0.psi = Vec3(plant.attitude.x(), plant.attitude.y(), yaw_track_);
  x0.psi_dot = psi_dot_now;
  x0.psi_dot_prev = psi_dot_prev;

  const Vec3 v_box(30.0, 30.0, 10.0);
  const Vec3 v_sp = v_sp_in.cwiseMax(-v_box).cwiseMin(v_box);
  const double yaw_ref = yaw_track_;
  const double mg = cfg_.weight();

  NlpProblem p;
  p.horizon = opt_.horizon;
  p.state_dim = 16;
  p.input_dim = 8;
  p.x0 = x0.pack();
  p.dynamics = [this](int, const VectorXd& xz, const VectorXd& uz) {
    return mpc_predict(MpcState::unpack(xz), MpcInput::unpack(uz), opt_.dt,
                       gains_, cfg_)
        .pack();
  };
  p.stage_residual = [this, v_sp, mg, yaw_ref](int, const VectorXd& xz,
                                               const VectorXd& uz) {
    return stage_residual_impl(MpcState::unpack(xz), MpcInput::unpack(uz), v_sp,
                               weights_, mg, yaw_ref);
  };
  p.terminal_residual = [this, v_sp](const VectorXd& xz) -> VectorXd {
    const MpcState x = MpcState::unpack(xz);
    return weights_.q_f.cwiseSqrt().cwiseProduct(x.v - v_sp);
  };

  // Attitude setpoint travel is kept well inside the inner loop's comfort
  // zone; a deep pitch dive at transition speeds trades on quadratic-in-alpha
  // lift the airframe cannot actually ride through the low airspeed gate.
  const double roll_d_max = deg2rad(30.0);
  const double pitch_d_max = deg2rad(20.0);
  p.u_lb = VectorXd(8);
  p.u_ub = VectorXd(8);
  p.u_lb << -kPi / 4.0, -kPi / 4.0, -kPi / 4.0, -kPi / 4.0, 0.0, -roll_d_max,
      -pitch_d_max, yaw_ref - kPi / 2.0;
  p.u_ub << kPi / 4.0, kPi / 4.0, kPi / 4.0, kPi / 4.0, 92.0, roll_d_max,
      pitch_d_max, yaw_ref + kPi / 2.0;

  p.x_lb = VectorXd(16);
  p.x_ub = VectorXd(16);
  p.x_lb << -30.0, -30.0, -10.0, cfg_.limits.tilt_min, cfg_.limits.tilt_min,
      cfg_.limits.tilt_min, cfg_.limits.tilt_min, -deg2rad(35.0),
      -deg2rad(25.0), -inf, -kPi, -kPi, -kPi, -inf, -inf, -inf;
  p.x_ub << 30.0, 30.0, 10.0, cfg_.limits.tilt_max, cfg_.limits.tilt_max,
      cfg_.limits.tilt_max, cfg_.limits.tilt_max, deg2rad(35.0),
      deg2rad(25.0), inf, kPi, kPi, kPi, inf, inf, inf;
  p.state_penalty = 1e3;

  MpcInput hold;
  hold.thrust = mg;
  hold.psi_d = Vec3(0.0, 0.0, yaw_ref);
  p.u_guess = hold.pack();

  const NlpSolution sol =
      solve_nlp(p, has_warm_ ? &warm_ : nullptr, opt_.sqp);

  MpcCommand cmd;
  cmd.status = sol.status;
  cmd.iterations = sol.iterations;
  cmd.kkt_residual = sol.kkt_residual;
  cmd.cost = sol.cost;

  bool usable = sol.status != NlpStatus::NumericFail &&
                static_cast<int>(sol.inputs.size()) == opt_.horizon &&
                sol.inputs[0].allFinite();
  if (usable) {
    const MpcInput u0 = MpcInput::unpack(sol.inputs[0]);
    cmd.psi_sp = Vec3(u0.psi_d.x(), u0.psi_d.y(), wrap_angle(u0.psi_d.z()));
    cmd.thrust_sp = std::clamp(u0.thrust, 0.0, 92.0);
    cmd.tilt_target = (x0.chi + opt_.dt * u0.chi_rate)
                          .cwiseMax(cfg_.limits.tilt_min)
                          .cwiseMin(cfg_.limits.tilt_max);
    const MpcState next = mpc_predict(x0, u0, opt_.dt, gains_, cfg_);
    cmd.accel_cmd = (next.v - x0.v) / opt_.dt;
  } else {
    // Hold level and hover thrust; the runtime decides what to do with the
    // reported status.
    cmd.psi_sp = Vec3(0.0, 0.0, yaw_meas);
    cmd.thrust_sp = mg;
    cmd.tilt_target = x0.chi;
    cmd.accel_cmd.setZero();
  }

  if (sol.status == NlpStatus::Converged ||
      sol.status == NlpStatus::MaxIterations) {
    warm_ = sol;
    has_warm_ = true;
  } else {
    has_warm_ = false;
  }
  return cmd;
}

}  // namespace tiltsim
