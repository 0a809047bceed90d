#pragma once

#include <cmath>

namespace diffdrive {

// Planar body state of the platform. Heading is not wrapped: integrators and
// planners keep it continuous so yaw never jumps by 2*pi mid-run.
struct PoseState {
  double x = 0.0;         // m, world frame
  double y = 0.0;         // m, world frame
  double heading = 0.0;   // rad, x-axis of the body frame vs world x
  double speed = 0.0;     // m/s, along the heading
  double yaw_rate = 0.0;  // rad/s

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(heading) &&
           std::isfinite(speed) && std::isfinite(yaw_rate);
  }

  friend bool operator==(const PoseState&, const PoseState&) = default;
};

// Drive torques at the two wheel axles, N m. In this model a positive
// left-minus-right difference drives positive yaw.
struct WheelTorques {
  double left = 0.0;
  double right = 0.0;

  bool finite() const { return std::isfinite(left) && std::isfinite(right); }

  friend bool operator==(const WheelTorques&, const WheelTorques&) = default;
};

// Wheel spin rates, rad/s, wheel side of the gear.
struct WheelSpeeds {
  double left = 0.0;
  double right = 0.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

}  // namespace diffdrive
