#pragma once

// Trajectory-tracking loops. The open loop integrates the plant under the
// planned feedforward torques alone. The closed loop runs the identical
// feedforward path and adds a torque correction computed from the measured
// state: a PD(+I) regulator on planar position produces a commanded
// acceleration delta, which maps through the body frame and the exact torque
// response of the model. With all gains zero the correction is identically
// zero and the closed loop reproduces the open loop bit for bit.
//
// The regulator designs the controller on the nominal parameters while the
// plant may integrate perturbed ones (ParamScales), which is how modelling
// error is injected for robustness runs.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffdrive/dynamics.hpp"
#include "diffdrive/errors.hpp"
#include "diffdrive/inverse.hpp"
#include "diffdrive/model.hpp"
#include "diffdrive/motor.hpp"
#include "diffdrive/trajectory.hpp"

namespace diffdrive {

// Electrical substeps per mechanical step when an SRM drive is in the loop.
inline constexpr int kElectricalSubsteps = 100;

// Position-loop gains. kp/kd/ki act per world axis on the Cartesian error.
// kw aligns the measured yaw rate with the reference yaw rate at the
// torque-conversion stage. It is structurally required, not a tuning nicety:
// lateral world acceleration equals speed times yaw rate, so the yaw-torque
// input only reaches lateral position through three integrations, and a
// position PD alone leaves that loop with no damping at the acceleration
// level (characteristic s^3 + kd s + kp, always unstable). kw supplies the
// missing s^2 term; the loop is stable for kw*kd > kp and ki < kp modestly.
struct RegulatorGains {
  double kp = 25.0;          // 1/s^2, on position error
  double kd = 10.0;          // 1/s, on velocity error
  double ki = 0.0;           // 1/s^3, on integrated position error
  double kw = 5.0;           // 1/s, on yaw-rate misalignment
  double torque_limit = 1.0; // N m, per-wheel saturation, must be positive

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("gains: " + msg); };
    if (!(kp >= 0.0) || !std::isfinite(kp)) fail("kp must be non-negative");
    if (!(kd >= 0.0) || !std::isfinite(kd)) fail("kd must be non-negative");
    if (!(ki >= 0.0) || !std::isfinite(ki)) fail("ki must be non-negative");
    if (!(kw >= 0.0) || !std::isfinite(kw)) fail("kw must be non-negative");
    if (!(torque_limit > 0.0) || !std::isfinite(torque_limit))
      fail("torque_limit must be positive");
  }

  friend bool operator==(const RegulatorGains&, const RegulatorGains&) = default;
};

// Multiplicative perturbation of the plant's physical parameters. The
// controller never sees these: they model the gap between the design model
// and reality.
struct ParamScales {
  double platform_mass = 1.0;
  double wheel_mass = 1.0;
  double platform_yaw_inertia = 1.0;
  double wheel_spin_inertia = 1.0;
  double wheel_yaw_inertia = 1.0;
  double rotor_inertia = 1.0;
  double gear_ratio = 1.0;
  double wheel_radius = 1.0;
  double half_track = 1.0;
  double wheel_offset = 1.0;

  RobotParams apply(RobotParams p) const {
    p.platform_mass *= platform_mass;
    p.wheel_mass *= wheel_mass;
    p.platform_yaw_inertia *= platform_yaw_inertia;
    p.wheel_spin_inertia *= wheel_spin_inertia;
    p.wheel_yaw_inertia *= wheel_yaw_inertia;
    p.rotor_inertia *= rotor_inertia;
    p.gear_ratio *= gear_ratio;
    p.wheel_radius *= wheel_radius;
    p.half_track *= half_track;
    p.wheel_offset *= wheel_offset;
    return p;
  }

  bool identity() const { return *this == ParamScales{}; }

  friend bool operator==(const ParamScales&, const ParamScales&) = default;
};

enum class LoopMode { open, closed };
enum class DriveModel { ideal, srm };

struct LoopConfig {
  LoopMode mode = LoopMode::open;
  RegulatorGains gains;
  double dt = 1e-3;        // s
  double duration = 20.0;  // s
  double v_min = kPlanSpeedFloor;  // m/s, reference speed floor for planning
  DriveModel drive = DriveModel::ideal;
  ParamScales plant_scales;
  MotorParams motor;  // consulted only when drive == srm

  friend bool operator==(const LoopConfig&, const LoopConfig&) = default;
};

// Planar acceleration command: reference feedforward plus PD(+I) feedback on
// the position error, per world axis.
inline Vec2 position_regulator(const TrajectorySample& ref, const PoseState& meas,
                               const Vec2& integ, const RegulatorGains& g) {
  const double vx = meas.speed * std::cos(meas.heading);
  const double vy = meas.speed * std::sin(meas.heading);
  return {ref.ddx + g.kd * (ref.dx - vx) + g.kp * (ref.x - meas.x) + g.ki * integ.x,
          ref.ddy + g.kd * (ref.dy - vy) + g.kp * (ref.y - meas.y) + g.ki * integ.y};
}

struct BodyAccel {
  double accel = 0.0;      // m/s^2
  double yaw_accel = 0.0;  // rad/s^2
  bool heading_hold = false;  // yaw channel dropped: too slow to steer by accel
};

// Projects a planar acceleration command onto the body channels at the
// measured state. Lateral acceleration steers via yaw only when moving;
// below the floor the yaw command is zeroed rather than divided by ~0.
inline BodyAccel accel_to_body(const Vec2& cmd, const PoseState& meas,
                               double v_min = kPlanSpeedFloor) {
  const double c = std::cos(meas.heading), s = std::sin(meas.heading);
  BodyAccel out;
  out.accel = cmd.x * c + cmd.y * s;
  const double lateral = cmd.y * c - cmd.x * s;
  if (std::abs(meas.speed) < v_min) {
    out.yaw_accel = 0.0;
    out.heading_hold = true;
  } else {
    out.yaw_accel = lateral / meas.speed;
  }
  return out;
}

// Per-channel symmetric clamp. Sets *clamped when any channel was cut.
inline WheelTorques saturate(const WheelTorques& u, double limit, bool* clamped = nullptr) {
  if (!(limit > 0.0) || !std::isfinite(limit))
    throw std::invalid_argument("saturate: limit must be positive");
  WheelTorques out = u;
  bool hit = false;
  if (out.left > limit) { out.left = limit; hit = true; }
  else if (out.left < -limit) { out.left = -limit; hit = true; }
  if (out.right > limit) { out.right = limit; hit = true; }
  else if (out.right < -limit) { out.right = -limit; hit = true; }
  if (clamped) *clamped = hit;
  return out;
}

namespace detail {

inline Telemetry run_loop(const RobotParams& robot, const Trajectory& traj,
                          const LoopConfig& cfg, bool closed) {
  cfg.gains.validate();
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw std::invalid_argument("loop: dt must be positive");
  const long steps = step_count(cfg.duration, cfg.dt);
  if (steps < 1) throw std::invalid_argument("loop: duration shorter than one step");
  if (cfg.duration > traj.spec().duration * (1.0 + 1e-9))
    throw std::invalid_argument("loop: duration exceeds the trajectory domain");

  const LumpedParams nominal = lump_params(robot);
  const RobotParams plant_robot = cfg.plant_scales.apply(robot);
  const LumpedParams plant = lump_params(plant_robot);
  const double t0 = traj.spec().t0;

  // Runs start pinned to the reference: position, heading and both rates.
  const BodyRates start = flat_to_body(traj.sample(t0), kMapSpeedFloor);
  const TrajectorySample first = traj.sample(t0);
  PoseState s{first.x, first.y, start.heading, start.speed, start.yaw_rate};

  const bool with_motor = cfg.drive == DriveModel::srm;
  std::optional<SrmDrive> left_drive, right_drive;
  if (with_motor) {
    left_drive.emplace(cfg.motor);
    right_drive.emplace(cfg.motor);
  }

  Telemetry tel;
  tel.dt = cfg.dt;
  tel.closed_loop = closed;
  tel.rows.reserve(static_cast<std::size_t>(steps));
  if (closed) tel.control.reserve(static_cast<std::size_t>(steps));

  auto field = [&plant](const PoseState& st, const WheelTorques& uu) {
    return state_derivative(plant, st, uu);
  };

  Vec2 integ{};
  double prev_heading = start.heading;
  for (long n = 0; n < steps; ++n) {
    const double t = t0 + static_cast<double>(n) * cfg.dt;
    // Feedforward: flat map at the step midpoint, matching the hold.
    BodyRates ff = flat_to_body(traj.sample(t + 0.5 * cfg.dt), cfg.v_min);
    ff.heading = unwrap_angle(ff.heading, prev_heading);
    prev_heading = ff.heading;
    WheelTorques u = body_to_torques(ff, nominal);

    const TrajectorySample ref = traj.sample(t);
    const Vec2 err{ref.x - s.x, ref.y - s.y};
    if (closed) {
      const Vec2 total = position_regulator(ref, s, integ, cfg.gains);
      const Vec2 corr{total.x - ref.ddx, total.y - ref.ddy};
      const BodyAccel ba = accel_to_body(corr, s, cfg.v_min);
      // kw closes the yaw-rate gap against the reference, compared at the
      // step start like the other feedback terms; see RegulatorGains.
      const double ref_speed_sq = ref.dx * ref.dx + ref.dy * ref.dy;
      const double ref_yaw_rate =
          ref_speed_sq > kMapSpeedFloor * kMapSpeedFloor
              ? (ref.ddy * ref.dx - ref.dy * ref.ddx) / ref_speed_sq
              : s.yaw_rate;  // degenerate reference: no alignment torque
      const double yaw_corr =
          ba.yaw_accel + cfg.gains.kw * (ref_yaw_rate - s.yaw_rate);
      const WheelTorques delta = torque_response(ba.accel, yaw_corr, nominal);
      u.left += delta.left;
      u.right += delta.right;
    }
    bool clamped = false;
    u = saturate(u, cfg.gains.torque_limit, &clamped);
    if (clamped) ++tel.clamp_events;
    if (closed) {
      tel.control.push_back({integ.x, integ.y, clamped});
      // Anti-windup: the integrator freezes while saturation is active.
      if (!clamped) {
        integ.x += err.x * cfg.dt;
        integ.y += err.y * cfg.dt;
      }
    }

    WheelTorques applied = u;
    if (with_motor) {
      const WheelSpeeds ws = wheel_speeds(s, plant_robot);
      applied.left = left_drive->step(u.left, plant_robot.gear_ratio * ws.left,
                                      cfg.dt, kElectricalSubsteps);
      applied.right = right_drive->step(u.right, plant_robot.gear_ratio * ws.right,
                                        cfg.dt, kElectricalSubsteps);
      tel.motor.push_back({u.left, u.right, left_drive->state().currents,
                           right_drive->state().currents});
    }

    TelemetryRow row{t, s, applied, kinetic_energy(plant, s)};
    row.ref_x = ref.x;
    row.ref_y = ref.y;
    row.err = std::hypot(err.x, err.y);
    tel.rows.push_back(std::move(row));

    s = rk4_step(field, s, applied, cfg.dt);
    if (!s.finite())
      throw DivergenceError(n, t, "speed=" + std::to_string(s.speed) +
                                      " yaw_rate=" + std::to_string(s.yaw_rate));
  }
  tel.final_time = t0 + static_cast<double>(steps) * cfg.dt;
  tel.final_state = s;
  return tel;
}

}  // namespace detail

// Feedforward-only tracking: plan from the flat map, integrate, never look
// at the simulated state.
inline Telemetry run_open_loop(const RobotParams& robot, const Trajectory& traj,
                               const LoopConfig& cfg) {
  return detail::run_loop(robot, traj, cfg, false);
}

// Feedforward plus feedback correction with saturation and anti-windup.
inline Telemetry run_closed_loop(const RobotParams& robot, const Trajectory& traj,
                                 const LoopConfig& cfg) {
  return detail::run_loop(robot, traj, cfg, true);
}

}  // namespace diffdrive
