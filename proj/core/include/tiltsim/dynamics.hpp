#pragma once

#include "tiltsim/vehicle.hpp"

namespace tiltsim {

struct Wrench {
  Vec3 force{Vec3::Zero()};
  Vec3 moment{Vec3::Zero()};

  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    moment += o.moment;
    return *this;
  }
  friend Wrench operator+(Wrench a, const Wrench& b) { return a += b; }
  friend Wrench operator-(Wrench a, const Wrench& b) {
    a.force -= b.force;
    a.moment -= b.moment;
    return a;
  }
};

struct AirData {
  double airspeed{0.0};  // m/s
  double alpha{0.0};     // rad
  double beta{0.0};      // rad
  double qbar{0.0};      // Pa
};

/// Plant state. Position and velocity are inertial NED, attitude is ZYX Euler
/// [roll, pitch, yaw], body_rates are p/q/r, tilt holds the four rotor tilt
/// angles (0 = thrust up, pi/2 = thrust forward).
struct PlantState {
  Vec3 position{Vec3::Zero()};
  Vec3 velocity{Vec3::Zero()};
  Vec3 attitude{Vec3::Zero()};
  Vec3 body_rates{Vec3::Zero()};
  Vec4 tilt{Vec4::Zero()};
};

enum class TiltCommandMode { Rate, Target };

/// Commands applied to the plant. Rotor entries are normalized [0, 1], surface
/// deflections normalized [-1, 1]. Tilt carries either rate commands (rad/s)
/// or target angles tracked by the servo model, per tilt_mode.
struct ActuatorCommand {
  Vec4 rotor{Vec4::Zero()};
  double aileron_left{0.0};
  double aileron_right{0.0};
  double elevator{0.0};
  double rudder{0.0};
  TiltCommandMode tilt_mode{TiltCommandMode::Rate};
  Vec4 tilt{Vec4::Zero()};
};

struct StateDerivative {
  Vec3 position_dot{Vec3::Zero()};
  Vec3 velocity_dot{Vec3::Zero()};
  Vec3 attitude_dot{Vec3::Zero()};
  Vec3 body_rates_dot{Vec3::Zero()};
  Vec4 tilt_dot{Vec4::Zero()};
};

/// Airspeed, angle of attack, sideslip and dynamic pressure from inertial
/// velocity, attitude and wind. Angles are zero when the relative speed
/// vanishes.
AirData airdata(const Vec3& velocity, const Vec3& attitude, const Vec3& wind,
                const AeroParams& aero);

/// Surface effectiveness ramp in [0, 1]: zero up to eff_lo, one above eff_hi,
/// smoothstep between.
double aero_effectiveness(double airspeed, const AeroParams& aero);

/// Total body frame force and moment of the four rotors, including thrust arm
/// moments and spin reaction torque. Rotor commands are used as given.
Wrench rotor_wrench(const Vec4& rotor_cmd, const Vec4& tilt,
                    const VehicleParams& vp);

/// Airframe polar plus control surface moments in the body frame, scaled by
/// the airspeed effectiveness ramp. aileron is the effective single-channel
/// deflection (average of the pair).
Wrench aero_wrench(const AirData& ad, double aileron, double elevator,
                   double rudder, const AeroParams& aero);

/// Gravity force rotated into the body frame.
Wrench gravity_wrench(const Vec3& attitude, const VehicleParams& vp);

/// Full rigid body derivative. Clamps rotor commands to [0, 1], surfaces to
/// [-1, 1], and converts tilt targets to servo tracking rates.
StateDerivative total_derivative(const PlantState& s, const ActuatorCommand& u,
                                 const VehicleConfig& cfg,
                                 const Vec3& wind = Vec3::Zero());

/// Classic fixed step RK4. Wraps yaw to (-pi, pi] and clamps tilt to its
/// travel range after the step.
PlantState integrate_rk4(const PlantState& s, const ActuatorCommand& u,
                         double dt, const VehicleConfig& cfg,
                         const Vec3& wind = Vec3::Zero());

}  // namespace tiltsim
