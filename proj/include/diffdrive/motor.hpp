#pragma once

// Minimal switched-reluctance drive. Each phase has a sinusoidal saliency
// profile in rotor angle (magnetically linear, no saturation), produces
// reluctance torque i^2 dL/dtheta, and is fed by a half-bridge that can apply
// +V, 0 or -V. A hysteresis relay picks the phase whose saliency slope has
// the productive sign and bangs the supply to keep total torque inside the
// band around the request; unselected phases are actively demagnetized.
// Currents are unipolar: a reluctance machine cannot use negative current,
// so integration clamps at zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffdrive/state.hpp"

namespace diffdrive {

// Defaults are sized so the rated torque sits at the drive's symmetric
// operating point: at peak saliency slope the rated current is close to
// supply_voltage / (2 * resistance), where one substep of magnetization and
// one substep of freewheel decay move the torque by equal amounts. That
// balance keeps the relay's chatter unbiased, so window-averaged torque
// lands on the request instead of consistently under it.
struct MotorParams {
  int phase_count = 3;
  double resistance = 2.5;          // ohm, per phase
  double inductance_mean = 6.0e-4;  // H
  double inductance_swing = 3.0e-4; // H, must stay below the mean
  int rotor_poles = 16;             // saliency periods per mechanical turn
  double supply_voltage = 16.0;     // V
  double hysteresis = 1.0e-3;       // N m, relay band on the torque error
  double demag_current = 1.0e-2;    // A, phase counts as discharged below this
  double rated_torque = 0.05;       // N m, request magnitude the loop is sized for
  bool half_torque_factor = false;  // use (1/2) i^2 dL/dtheta instead of i^2 dL/dtheta

  void validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("motor: " + msg); };
    if (phase_count < 1) fail("phase_count must be at least 1");
    if (!(resistance > 0.0) || !std::isfinite(resistance)) fail("resistance must be positive");
    if (!(inductance_mean > 0.0) || !std::isfinite(inductance_mean))
      fail("inductance_mean must be positive");
    if (!(inductance_swing >= 0.0) || !(inductance_swing < inductance_mean))
      fail("inductance_swing must be in [0, inductance_mean)");
    if (rotor_poles < 1) fail("rotor_poles must be at least 1");
    if (!(supply_voltage > 0.0) || !std::isfinite(supply_voltage))
      fail("supply_voltage must be positive");
    if (!(hysteresis > 0.0) || !std::isfinite(hysteresis)) fail("hysteresis must be positive");
    if (!(demag_current > 0.0) || !std::isfinite(demag_current))
      fail("demag_current must be positive");
    if (!(rated_torque > 0.0) || !std::isfinite(rated_torque))
      fail("rated_torque must be positive");
  }

  friend bool operator==(const MotorParams&, const MotorParams&) = default;
};

struct MotorState {
  std::vector<double> currents;  // A, one per phase, never negative
  double theta = 0.0;            // rad, mechanical rotor angle
  double omega = 0.0;            // rad/s, mechanical rotor speed
};

struct PhaseInductance {
  double inductance = 0.0;  // H
  double slope = 0.0;       // H/rad, d(inductance)/d(theta)
};

// Phase index k is 1-based. Phases are offset evenly over one saliency period.
inline PhaseInductance phase_inductance(const MotorParams& mp, int k, double theta) {
  if (k < 1 || k > mp.phase_count)
    throw std::out_of_range("motor: phase index " + std::to_string(k) + " out of 1.." +
                            std::to_string(mp.phase_count));
  const double beta = mp.rotor_poles * theta -
                      2.0 * std::numbers::pi * (k - 1) / mp.phase_count;
  return {mp.inductance_mean + mp.inductance_swing * std::cos(beta),
          -mp.inductance_swing * mp.rotor_poles * std::sin(beta)};
}

// Reluctance torque of one phase. Quadratic in current: only the saliency
// slope controls the sign.
inline double phase_torque(const MotorParams& mp, int k, double theta, double current) {
  const double factor = mp.half_torque_factor ? 0.5 : 1.0;
  return factor * current * current * phase_inductance(mp, k, theta).slope;
}

inline double total_torque(const MotorParams& mp, const MotorState& ms) {
  double sum = 0.0;
  for (int k = 1; k <= mp.phase_count; ++k)
    sum += phase_torque(mp, k, ms.theta, ms.currents[static_cast<std::size_t>(k - 1)]);
  return sum;
}

// Phase current dynamics under applied voltage: the saliency slope times the
// rotor speed appears as a motional back-emf on the winding.
inline double current_derivative(const MotorParams& mp, const MotorState& ms, int k,
                                 double voltage) {
  const PhaseInductance pl = phase_inductance(mp, k, ms.theta);
  const double i = ms.currents[static_cast<std::size_t>(k - 1)];
  return (voltage - i * mp.resistance - i * pl.slope * ms.omega) / pl.inductance;
}

// Sliding-mode torque regulator: relay with hysteresis on the torque error.
// Holds its previous output inside the band, so it has one word of state per
// phase and must be stepped, not sampled. The drive is unipolar (currents
// never reverse), so the active phase's down action is freewheel (0 V):
// reversing the supply would dump current much faster than the supply can
// rebuild it, and that slew asymmetry would bias the chattering mean below
// the request. Non-productive phases still get the reversed supply, since
// their job is to discharge outright, not to balance a chatter cycle.
class SlidingTorqueLoop {
 public:
  explicit SlidingTorqueLoop(const MotorParams& mp)
      : params_(mp), hold_(static_cast<std::size_t>(mp.phase_count), 0.0) {
    params_.validate();
  }

  // Voltages to hold until the next decision.
  std::vector<double> command(const MotorState& ms, double torque_ref) {
    const int n = params_.phase_count;
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    const int sgn = (torque_ref > kRefEps) - (torque_ref < -kRefEps);
    int active = -1;
    double best = 0.0;
    if (sgn != 0) {
      for (int k = 0; k < n; ++k) {
        const double productive =
            sgn * phase_inductance(params_, k + 1, ms.theta).slope;
        if (productive > best) { best = productive; active = k; }
      }
    }
    const double now = total_torque(params_, ms);
    for (int k = 0; k < n; ++k) {
      if (k == active) {
        const double shortfall = sgn * (torque_ref - now);
        if (shortfall > params_.hysteresis) u[k] = params_.supply_voltage;
        else if (shortfall < -params_.hysteresis) u[k] = 0.0;
        else u[k] = hold_[k];
      } else {
        u[k] = ms.currents[static_cast<std::size_t>(k)] > params_.demag_current
                   ? -params_.supply_voltage
                   : 0.0;
      }
    }
    hold_ = u;
    return u;
  }

  void reset() { std::fill(hold_.begin(), hold_.end(), 0.0); }

 private:
  static constexpr double kRefEps = 1e-12;
  MotorParams params_;
  std::vector<double> hold_;
};

// One motor plus its torque loop, integrated with forward Euler at an
// electrical substep well below the winding time constant.
class SrmDrive {
 public:
  explicit SrmDrive(const MotorParams& mp) : params_(mp), loop_(mp) {
    params_.validate();
    state_.currents.assign(static_cast<std::size_t>(params_.phase_count), 0.0);
  }

  // Advances the electrical state across one mechanical step of length dt,
  // rotor speed held constant; returns the mean delivered torque over the
  // step. substeps must put the electrical step below the winding time
  // constant for the Euler integration to be meaningful.
  double step(double torque_ref, double rotor_speed, double dt, int substeps) {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("motor: dt must be positive");
    if (substeps < 1) throw std::invalid_argument("motor: substeps must be at least 1");
    state_.omega = rotor_speed;
    const double h = dt / substeps;
    double torque_acc = 0.0;
    for (int m = 0; m < substeps; ++m) {
      const std::vector<double> u = loop_.command(state_, torque_ref);
      for (int k = 0; k < params_.phase_count; ++k) {
        const double didt = current_derivative(params_, state_, k + 1, u[k]);
        double& i = state_.currents[static_cast<std::size_t>(k)];
        i = std::max(0.0, i + h * didt);
      }
      state_.theta += rotor_speed * h;
      torque_acc += total_torque(params_, state_);
    }
    return torque_acc / substeps;
  }

  const MotorState& state() const { return state_; }
  const MotorParams& params() const { return params_; }

  void reset() {
    std::fill(state_.currents.begin(), state_.currents.end(), 0.0);
    state_.theta = 0.0;
    state_.omega = 0.0;
    loop_.reset();
  }

 private:
  MotorParams params_;
  MotorState state_;
  SlidingTorqueLoop loop_;
};

}  // namespace diffdrive
