#pragma once

// Lumped-parameter rigid-body model of a three-wheeled differential-drive
// platform: two driven wheels on a common axle, one passive caster. Each
// drive motor couples to its wheel through a reducer, so rotor spin inertia
// is reflected to the axle by the square of the gear ratio. Lumping folds
// the wheel and rotor terms into a single translational mass and a single
// yaw inertia; the body dynamics then reduce to two channels driven by the
// torque sum (thrust) and the torque difference (steer).

#include <cmath>
#include <stdexcept>
#include <string>

#include "diffdrive/state.hpp"

namespace diffdrive {

struct RobotParams {
  double platform_mass = 10.0;          // kg, body without the drive wheels
  double wheel_mass = 0.5;              // kg, each drive wheel
  double platform_yaw_inertia = 0.2;    // kg m^2, about the vertical
  double wheel_spin_inertia = 6.0e-4;   // kg m^2, one wheel about its axle
  double wheel_yaw_inertia = 1.0e-3;    // kg m^2, one wheel about the vertical
  double rotor_inertia = 1.0e-4;        // kg m^2, motor shaft, before the reducer
  double gear_ratio = 2.0;              // rotor turns per wheel turn, >= 1
  double wheel_radius = 0.05;           // m
  double half_track = 0.15;             // m, wheel center to platform centerline
  double wheel_offset = 0.15;           // m, axle to mass center, yaw reduction arm

  // Throws std::invalid_argument naming the first offending field.
  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(platform_mass, "platform_mass");
    positive(wheel_mass, "wheel_mass");
    positive(platform_yaw_inertia, "platform_yaw_inertia");
    positive(wheel_spin_inertia, "wheel_spin_inertia");
    positive(wheel_yaw_inertia, "wheel_yaw_inertia");
    positive(rotor_inertia, "rotor_inertia");
    positive(wheel_radius, "wheel_radius");
    positive(half_track, "half_track");
    if (!(wheel_offset >= 0.0) || !std::isfinite(wheel_offset))
      throw std::invalid_argument("wheel_offset must be non-negative");
    if (!(gear_ratio >= 1.0) || !std::isfinite(gear_ratio))
      throw std::invalid_argument("gear_ratio must be at least 1");
  }

  friend bool operator==(const RobotParams&, const RobotParams&) = default;
};

// Coefficients of the reduced two-channel dynamics. All are fixed once the
// geometry is fixed; none depend on the state.
struct LumpedParams {
  double mass = 0.0;              // kg, platform + wheels + reflected spin inertia
  double yaw_inertia = 0.0;       // kg m^2, full turning inertia about the mass center
  double axle_spin_inertia = 0.0; // kg m^2, one wheel plus its geared rotor
  double coriolis_lin = 0.0;      // m;   speed_dot gain on yaw_rate^2
  double coriolis_yaw = 0.0;      // 1/m; yaw_accel gain on speed*yaw_rate, negative
  double thrust_gain = 0.0;       // 1/(kg m);   torque sum -> linear acceleration
  double steer_gain = 0.0;        // 1/(kg m^3); torque difference -> yaw acceleration

  friend bool operator==(const LumpedParams&, const LumpedParams&) = default;
};

// Folds the component masses and inertias into the reduced coefficients.
// Postconditions for valid inputs: mass > platform_mass, yaw_inertia > 0,
// thrust_gain * mass * wheel_radius == 1 and steer_gain * yaw_inertia *
// wheel_radius == 1 up to rounding.
//
// Guards here are deliberately weaker than RobotParams::validate(): the
// degenerate massless-wheel limit (wheel terms all zero, so mass collapses
// to platform_mass) is a legitimate analytical case, while negative values
// and a zero chassis, radius, or track are always rejected by field name.
inline LumpedParams lump_params(const RobotParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be non-negative");
  };
  positive(p.platform_mass, "platform_mass");
  positive(p.wheel_radius, "wheel_radius");
  positive(p.half_track, "half_track");
  non_negative(p.wheel_mass, "wheel_mass");
  non_negative(p.platform_yaw_inertia, "platform_yaw_inertia");
  non_negative(p.wheel_spin_inertia, "wheel_spin_inertia");
  non_negative(p.wheel_yaw_inertia, "wheel_yaw_inertia");
  non_negative(p.rotor_inertia, "rotor_inertia");
  non_negative(p.wheel_offset, "wheel_offset");
  if (!(p.gear_ratio >= 1.0) || !std::isfinite(p.gear_ratio))
    throw std::invalid_argument("gear_ratio must be at least 1");
  LumpedParams lp;
  lp.axle_spin_inertia =
      p.wheel_spin_inertia + p.gear_ratio * p.gear_ratio * p.rotor_inertia;
  lp.mass = p.platform_mass + 2.0 * p.wheel_mass +
            2.0 * lp.axle_spin_inertia / (p.wheel_radius * p.wheel_radius);
  lp.yaw_inertia = p.platform_yaw_inertia + 2.0 * p.wheel_yaw_inertia +
                   (lp.mass - p.platform_mass) * p.wheel_offset * p.wheel_offset +
                   p.platform_mass * p.half_track * p.half_track;
  lp.coriolis_lin = p.platform_mass * p.half_track / lp.mass;
  lp.coriolis_yaw = -p.platform_mass * p.half_track / lp.yaw_inertia;
  lp.thrust_gain = 1.0 / (lp.mass * p.wheel_radius);
  lp.steer_gain = 1.0 / (lp.yaw_inertia * p.wheel_radius);
  return lp;
}

// Kinetic energy of the reduced model, J.
inline double kinetic_energy(const LumpedParams& lp, const PoseState& s) {
  return 0.5 * (lp.mass * s.speed * s.speed +
                lp.yaw_inertia * s.yaw_rate * s.yaw_rate);
}

// Wheel spin rates consistent with a body twist: the outer wheel of a turn
// runs faster by yaw_rate * half_track / wheel_radius.
inline WheelSpeeds wheel_speeds(const PoseState& s, const RobotParams& p) {
  WheelSpeeds w;
  w.right = (s.speed + p.half_track * s.yaw_rate) / p.wheel_radius;
  w.left = (s.speed - p.half_track * s.yaw_rate) / p.wheel_radius;
  return w;
}

}  // namespace diffdrive
