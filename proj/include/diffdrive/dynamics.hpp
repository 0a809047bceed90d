#pragma once

// Forward dynamics of the reduced platform model and a fixed-step RK4
// integrator with step-indexed telemetry. The vector field couples the two
// body channels: yaw rate feeds back into the speed equation (centripetal
// term from the mass-center offset) and speed times yaw rate back into the
// yaw equation; torque sum drives speed, torque difference drives yaw.

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diffdrive/errors.hpp"
#include "diffdrive/model.hpp"
#include "diffdrive/state.hpp"

namespace diffdrive {

struct PoseDeriv {
  double dx = 0.0;
  double dy = 0.0;
  double dheading = 0.0;
  double dspeed = 0.0;
  double dyaw_rate = 0.0;
};

inline PoseDeriv state_derivative(const LumpedParams& lp, const PoseState& s,
                                  const WheelTorques& u) {
  PoseDeriv d;
  d.dx = s.speed * std::cos(s.heading);
  d.dy = s.speed * std::sin(s.heading);
  d.dheading = s.yaw_rate;
  d.dspeed = lp.coriolis_lin * s.yaw_rate * s.yaw_rate +
             lp.thrust_gain * (u.left + u.right);
  d.dyaw_rate = lp.coriolis_yaw * s.speed * s.yaw_rate +
                lp.steer_gain * (u.left - u.right);
  return d;
}

namespace detail {
inline PoseState advanced(const PoseState& s, const PoseDeriv& d, double h) {
  return {s.x + h * d.dx, s.y + h * d.dy, s.heading + h * d.dheading,
          s.speed + h * d.dspeed, s.yaw_rate + h * d.dyaw_rate};
}
}  // namespace detail

// One classical Runge-Kutta step under zero-order-hold torque.
// Field must be callable as field(PoseState, WheelTorques) -> PoseDeriv.
template <class Field>
PoseState rk4_step(Field&& field, const PoseState& s, const WheelTorques& u, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("rk4_step: dt must be positive");
  const PoseDeriv k1 = field(s, u);
  const PoseDeriv k2 = field(detail::advanced(s, k1, 0.5 * dt), u);
  const PoseDeriv k3 = field(detail::advanced(s, k2, 0.5 * dt), u);
  const PoseDeriv k4 = field(detail::advanced(s, k3, dt), u);
  const double w = dt / 6.0;
  PoseState out = s;
  out.x += w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.y += w * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  out.heading += w * (k1.dheading + 2.0 * k2.dheading + 2.0 * k3.dheading + k4.dheading);
  out.speed += w * (k1.dspeed + 2.0 * k2.dspeed + 2.0 * k3.dspeed + k4.dspeed);
  out.yaw_rate += w * (k1.dyaw_rate + 2.0 * k2.dyaw_rate + 2.0 * k3.dyaw_rate + k4.dyaw_rate);
  return out;
}

// One telemetry row per step n: the state entering the step at t = t0 + n*dt,
// the torque held over [t, t+dt), and the kinetic energy of that state.
// Reference fields are NaN unless a tracking loop filled them in.
struct TelemetryRow {
  double t = 0.0;
  PoseState state;
  WheelTorques torque;
  double energy = 0.0;
  double ref_x = std::numeric_limits<double>::quiet_NaN();
  double ref_y = std::numeric_limits<double>::quiet_NaN();
  double err = std::numeric_limits<double>::quiet_NaN();
};

// Regulator internals, one entry per step for regulated runs.
struct ControlTraceRow {
  double integ_x = 0.0, integ_y = 0.0;  // m s, accumulated position error
  bool clamped = false;                 // torque saturation active this step
};

// Electric drive internals, one entry per step when the drive is simulated.
struct MotorTraceRow {
  double ref_left = 0.0, ref_right = 0.0;       // N m, torque requests
  std::vector<double> currents_left, currents_right;  // A, per phase, end of step
};

struct Telemetry {
  double dt = 0.0;
  bool closed_loop = false;  // reference columns serialize only when true
  std::vector<TelemetryRow> rows;
  std::vector<ControlTraceRow> control;  // empty unless a regulator ran
  std::vector<MotorTraceRow> motor;      // empty unless the drive was simulated
  long clamp_events = 0;
  double final_time = 0.0;  // t0 + steps*dt; rows hold states strictly before it
  PoseState final_state;
};

inline long step_count(double duration, double dt) {
  // tolerant of duration being a hair under an integer multiple of dt
  return static_cast<long>(std::floor(duration / dt + 1e-6));
}

// Integrates from s0 for floor(duration/dt) steps. torque_at(t) is sampled
// once per step at the step midpoint and held constant across the step,
// which keeps the zero-order-hold error second order in dt.
// Throws DivergenceError as soon as a state stops being finite.
template <class TorqueFn>
Telemetry simulate(const LumpedParams& lp, const PoseState& s0, TorqueFn&& torque_at,
                   double dt, double duration) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("simulate: dt must be positive");
  const long steps = step_count(duration, dt);
  if (steps < 1) throw std::invalid_argument("simulate: duration shorter than one step");
  Telemetry tel;
  tel.dt = dt;
  tel.rows.reserve(static_cast<std::size_t>(steps));
  PoseState s = s0;
  auto field = [&lp](const PoseState& st, const WheelTorques& uu) {
    return state_derivative(lp, st, uu);
  };
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    const WheelTorques u = torque_at(t + 0.5 * dt);
    tel.rows.push_back({t, s, u, kinetic_energy(lp, s)});
    s = rk4_step(field, s, u, dt);
    if (!s.finite())
      throw DivergenceError(n, t, "speed=" + std::to_string(s.speed) +
                                      " yaw_rate=" + std::to_string(s.yaw_rate));
  }
  tel.final_time = steps * dt;
  tel.final_state = s;
  return tel;
}

// Largest relative defect between the per-step kinetic energy increment and
// the mechanical input power. The increment over one zero-order-hold step is
// compared against a Simpson average of instantaneous power, with the
// midpoint state recovered by re-integrating half a step. Residuals are
// normalized by the run's power scale max(max|P|, E_max / 1 s) so quiet runs
// do not divide by zero.
inline double power_balance_max_residual(const Telemetry& tel, const LumpedParams& lp) {
  if (tel.rows.size() < 1 || !(tel.dt > 0.0))
    throw std::invalid_argument("power balance: telemetry is empty");
  const double wheel_radius = 1.0 / (lp.mass * lp.thrust_gain);
  auto power = [&](const PoseState& s, const WheelTorques& u) {
    return ((u.left + u.right) * s.speed + (u.left - u.right) * s.yaw_rate) / wheel_radius;
  };
  auto field = [&lp](const PoseState& st, const WheelTorques& uu) {
    return state_derivative(lp, st, uu);
  };
  const std::size_t n = tel.rows.size();
  std::vector<double> defect(n);
  double power_scale = 0.0, energy_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const TelemetryRow& row = tel.rows[i];
    const PoseState& s_next = (i + 1 < n) ? tel.rows[i + 1].state : tel.final_state;
    const PoseState s_mid = rk4_step(field, row.state, row.torque, 0.5 * tel.dt);
    const double de = kinetic_energy(lp, s_next) - kinetic_energy(lp, row.state);
    const double p_avg = (power(row.state, row.torque) +
                          4.0 * power(s_mid, row.torque) +
                          power(s_next, row.torque)) / 6.0;
    defect[i] = std::abs(de / tel.dt - p_avg);
    power_scale = std::max(power_scale, std::abs(p_avg));
    energy_max = std::max(energy_max, kinetic_energy(lp, row.state));
  }
  const double denom = std::max({power_scale, energy_max / 1.0, 1e-9});
  double worst = 0.0;
  for (double d : defect) worst = std::max(worst, d / denom);
  return worst;
}

}  // namespace diffdrive
