#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace diffdrive {

// Scenario / configuration problems. Messages carry file:line[:col] where known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The planar reference speed fell below the floor the flatness map needs.
// Heading and curvature are undefined at zero velocity, so the inverse
// problem refuses to evaluate there instead of emitting garbage torques.
class SingularSpeed : public std::runtime_error {
 public:
  SingularSpeed(double speed, double floor,
                double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(describe(speed, floor, time)),
        speed_(speed), floor_(floor), time_(time) {}

  double speed() const noexcept { return speed_; }
  double floor() const noexcept { return floor_; }
  double time() const noexcept { return time_; }  // NaN when no timestamp applies

 private:
  static std::string describe(double speed, double floor, double time) {
    std::string msg = "reference speed " + std::to_string(speed) +
                      " m/s is below the floor " + std::to_string(floor) + " m/s";
    if (!std::isnan(time)) msg += " at t=" + std::to_string(time) + " s";
    return msg;
  }

  double speed_;
  double floor_;
  double time_;
};

// A simulated state stopped being finite. No silent clamping: the run aborts
// and reports where.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, double time, const std::string& state_text)
      : std::runtime_error("simulation diverged at step " + std::to_string(step) +
                           " (t=" + std::to_string(time) + " s): " + state_text),
        step_(step), time_(time) {}

  long step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  long step_;
  double time_;
};

}  // namespace diffdrive
