#pragma once

// Inverse problem: a planar reference with derivatives to order three fully
// determines heading, body rates, body accelerations and finally the two
// wheel torques — the platform is differentially flat in (x, y). The map
// degenerates as planar speed approaches zero (heading and curvature become
// undefined), so every entry point enforces an explicit speed floor instead
// of returning garbage.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "diffdrive/dynamics.hpp"
#include "diffdrive/errors.hpp"
#include "diffdrive/model.hpp"
#include "diffdrive/trajectory.hpp"

namespace diffdrive {

// Speed floor of the bare algebraic map: below this the numbers are noise.
inline constexpr double kMapSpeedFloor = 1e-6;  // m/s
// Stricter floor for torque planning, where the curvature quotient is
// divided by speed squared twice and amplifies reference jitter.
inline constexpr double kPlanSpeedFloor = 1e-3;  // m/s

// Body-frame view of one reference sample.
struct BodyRates {
  double heading = 0.0;    // rad, principal value from atan2
  double speed = 0.0;      // m/s
  double yaw_rate = 0.0;   // rad/s
  double accel = 0.0;      // m/s^2, along-track
  double yaw_accel = 0.0;  // rad/s^2
};

// Shifts angle by whole turns to land within pi of previous. Planners call
// this on consecutive headings so yaw never jumps across the atan2 seam.
inline double unwrap_angle(double angle, double previous) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double d = angle - previous;
  return previous + (d - two_pi * std::round(d / two_pi));
}

inline BodyRates flat_to_body(const TrajectorySample& ts, double v_min = kMapSpeedFloor) {
  const double sq = ts.dx * ts.dx + ts.dy * ts.dy;
  if (!(sq >= v_min * v_min)) throw SingularSpeed(std::sqrt(sq), v_min, ts.t);
  BodyRates br;
  br.heading = std::atan2(ts.dy, ts.dx);
  br.speed = std::sqrt(sq);
  const double cross2 = ts.ddy * ts.dx - ts.dy * ts.ddx;
  const double along = ts.dx * ts.ddx + ts.dy * ts.ddy;
  const double cross3 = ts.dddy * ts.dx - ts.dy * ts.dddx;
  br.yaw_rate = cross2 / sq;
  br.accel = along / br.speed;
  // d/dt of cross2/sq by the quotient rule; d(sq)/dt = 2*along
  br.yaw_accel = cross3 / sq - 2.0 * along * cross2 / (sq * sq);
  return br;
}

// Solves the two-channel dynamics for the wheel torques that realize the
// given body rates and accelerations. Exact algebraic inverse of the forward
// field: the common mode carries thrust, the differential mode carries steer.
inline WheelTorques body_to_torques(const BodyRates& br, const LumpedParams& lp) {
  const double common =
      (br.accel - lp.coriolis_lin * br.yaw_rate * br.yaw_rate) / (2.0 * lp.thrust_gain);
  const double diff =
      (lp.coriolis_yaw * br.speed * br.yaw_rate - br.yaw_accel) / (2.0 * lp.steer_gain);
  return {common - diff, common + diff};
}

// Torque change that produces the given acceleration deltas at fixed state.
// Linearity of the dynamics in the torques makes this exact, which lets a
// feedback loop add corrections on top of a feedforward plan.
inline WheelTorques torque_response(double accel, double yaw_accel, const LumpedParams& lp) {
  const double common = accel / (2.0 * lp.thrust_gain);
  const double diff = yaw_accel / (2.0 * lp.steer_gain);
  return {common + diff, common - diff};
}

// Precomputed zero-order-hold torque plan: entry n holds over
// [t0 + n*dt, t0 + (n+1)*dt). Lookup clamps to the planned span.
struct TorqueSchedule {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<WheelTorques> entries;

  WheelTorques at(double t) const {
    if (entries.empty()) throw std::logic_error("torque schedule is empty");
    const double idx = std::floor((t - t0) / dt);
    const std::size_t last = entries.size() - 1;
    if (idx <= 0.0) return entries.front();
    if (idx >= static_cast<double>(last)) return entries.back();
    return entries[static_cast<std::size_t>(idx)];
  }
};

// Plans feedforward torques along a trajectory by sampling the flat map at
// each step midpoint (matching the simulator's hold convention). Propagates
// SingularSpeed with the offending timestamp when the reference dips below
// the planning floor.
inline TorqueSchedule plan_open_loop(const Trajectory& traj, const LumpedParams& lp,
                                     double t0, double duration, double dt,
                                     double v_min = kPlanSpeedFloor) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("plan_open_loop: dt must be positive");
  const long steps = step_count(duration, dt);
  if (steps < 1) throw std::invalid_argument("plan_open_loop: duration shorter than one step");
  TorqueSchedule plan;
  plan.t0 = t0;
  plan.dt = dt;
  plan.entries.reserve(static_cast<std::size_t>(steps));
  double prev_heading = 0.0;
  for (long n = 0; n < steps; ++n) {
    const double t_mid = t0 + (static_cast<double>(n) + 0.5) * dt;
    BodyRates br = flat_to_body(traj.sample(t_mid), v_min);
    br.heading = (n == 0) ? br.heading : unwrap_angle(br.heading, prev_heading);
    prev_heading = br.heading;
    plan.entries.push_back(body_to_torques(br, lp));
  }
  return plan;
}

}  // namespace diffdrive
