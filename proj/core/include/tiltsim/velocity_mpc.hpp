#pragma once

#include <Eigen/Dense>

#include "tiltsim/attitude.hpp"
#include "tiltsim/dynamics.hpp"
#include "tiltsim/shooting_sqp.hpp"
#include "tiltsim/vehicle.hpp"

namespace tiltsim {

/// Prediction state of the velocity controller: inertial velocity, the four
/// tilt angles, attitude, attitude rate, and the attitude rate one controller
/// period earlier (feeds the D term of the embedded inner loop). 16 entries.
struct MpcState {
  Vec3 v{Vec3::Zero()};
  Vec4 chi{Vec4::Zero()};
  Vec3 psi{Vec3::Zero()};
  Vec3 psi_dot{Vec3::Zero()};
  Vec3 psi_dot_prev{Vec3::Zero()};

  Eigen::VectorXd pack() const;
  static MpcState unpack(const Eigen::VectorXd& z);
};

/// Decision input: tilt rates, collective thrust, attitude setpoint. 8 entries.
struct MpcInput {
  Vec4 chi_rate{Vec4::Zero()};
  double thrust{0.0};
  Vec3 psi_d{Vec3::Zero()};

  Eigen::VectorXd pack() const;
  static MpcInput unpack(const Eigen::VectorXd& z);
};

struct MpcWeights {
  Vec3 q_ref{20.0, 10.0, 50.0};
  Vec3 q_f{20.0, 10.0, 50.0};
  Vec3 q_psi{10.0, 20.0, 10.0};
  Vec3 q_psidot{3.0, 3.0, 3.0};
  double r_tilt_rate{1.0};
  double r_thrust{0.025};
  Vec3 r_psi_d{10.0, 20.0, 10.0};
  // Tilt/speed scheduling cost exp(a*v*X + b*X + c*v + d), X the mean tilt in
  // degrees, v the body-forward speed.
  double soft_a{-0.33};
  double soft_b{1.8};
  double soft_c{-0.477};
  double soft_d{-2.303};
};

/// The exponential scheduling term. Large when hovering with forward tilt or
/// cruising with upright rotors, small along the natural transition path.
double mpc_soft_cost(double v_fwd, double mean_tilt_deg, const MpcWeights& w);

/// Full stage cost: velocity tracking, attitude and rate regularization,
/// input cost (thrust counted relative to the hover trim m*g, yaw terms
/// relative to yaw_ref) and the soft scheduling term.
double mpc_cost(const MpcState& x, const MpcInput& u, const Vec3& v_sp,
                const MpcWeights& w, const VehicleConfig& cfg,
                double yaw_ref = 0.0);

/// One Euler-forward step of the prediction model with the attitude loop
/// embedded: thrust split equally over the four rotors along their own tilt
/// directions, the airframe polar at the predicted airspeed, gravity, and
/// torque from the shared attitude law.
MpcState mpc_predict(const MpcState& x, const MpcInput& u, double dt,
                     const AttitudeGains& g, const VehicleConfig& cfg);

struct MpcCommand {
  Vec3 psi_sp{Vec3::Zero()};
  double thrust_sp{0.0};
  Vec4 tilt_target{Vec4::Zero()};
  Vec3 accel_cmd{Vec3::Zero()};  // predicted inertial acceleration, stage 0
  NlpStatus status{NlpStatus::Converged};
  int iterations{0};
  double kkt_residual{0.0};
  double cost{0.0};
};

struct MpcOptions {
  int horizon{25};
  double dt{0.01};
  SqpOptions sqp{};
};

/// Receding horizon velocity controller. One instance per vehicle: owns the
/// warm start, the previous attitude rate, and a continuous yaw track so the
/// horizon never sees a wrap jump.
class VelocityMpc {
 public:
  VelocityMpc(const VehicleConfig& cfg, const MpcWeights& w,
              const AttitudeGains& g, const MpcOptions& opt = {});
  explicit VelocityMpc(const VehicleConfig& cfg);

  MpcCommand step(const PlantState& plant, const Vec3& v_sp);
  void reset();

  const NlpSolution& last_solution() const { return warm_; }
  const MpcWeights& weights() const { return weights_; }

 private:
  VehicleConfig cfg_;
  MpcWeights weights_;
  AttitudeGains gains_;
  MpcOptions opt_;

  NlpSolution warm_;
  bool has_warm_{false};
  bool primed_{false};
  double yaw_track_{0.0};
  double last_yaw_meas_{0.0};
  Vec3 prev_psi_dot_{Vec3::Zero()};
};

}  // namespace tiltsim
