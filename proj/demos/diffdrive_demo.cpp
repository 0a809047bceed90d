// Minimal consumer of the library: plans a circle and a figure-eight,
// runs the open- and closed-loop simulations, and prints a short report.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "diffdrive/control.hpp"
#include "diffdrive/model.hpp"
#include "diffdrive/trajectory.hpp"

namespace dd = diffdrive;

namespace {

double rms_error(const dd::Telemetry& tel) {
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& row : tel.rows) {
    if (std::isnan(row.err)) continue;
    acc += row.err * row.err;
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(acc / static_cast<double>(n));
}

double final_path_error(const dd::Telemetry& tel, const dd::Trajectory& traj) {
  const auto ref = traj.sample(tel.final_time);
  return std::hypot(tel.final_state.x - ref.x, tel.final_state.y - ref.y);
}

}  // namespace

int main() {
  const dd::RobotParams robot;  // catalogue defaults
  const dd::LumpedParams lumped = dd::lump_params(robot);
  std::printf("lumped model: mass %.3f kg, yaw inertia %.4f kg*m^2\n",
              lumped.mass, lumped.yaw_inertia);

  // Open loop: constant-speed circle, feedforward torques only.
  dd::TrajectorySpec circle;
  circle.kind = dd::PathKind::circle;
  circle.duration = 20.0;
  circle.speed.cruise = 0.5;
  circle.center_y = 1.0;
  circle.start_angle = -std::numbers::pi / 2.0;

  dd::LoopConfig open_cfg;
  open_cfg.mode = dd::LoopMode::open;
  open_cfg.dt = 1e-3;
  open_cfg.duration = 20.0;

  const dd::Trajectory circle_traj(circle);
  const auto open_tel = dd::run_open_loop(robot, circle_traj, open_cfg);
  std::printf("open circle:  final drift %.3e m after %.0f s\n",
              final_path_error(open_tel, circle_traj), open_cfg.duration);

  // Closed loop: figure-eight with a 20 % heavier plant than the model.
  dd::TrajectorySpec eight;
  eight.kind = dd::PathKind::lemniscate;
  eight.duration = 20.0;
  eight.speed.cruise = 0.22;

  dd::LoopConfig closed_cfg;
  closed_cfg.mode = dd::LoopMode::closed;
  closed_cfg.dt = 1e-3;
  closed_cfg.duration = 20.0;
  closed_cfg.gains.kp = 25.0;
  closed_cfg.gains.kd = 10.0;
  closed_cfg.gains.ki = 10.0;
  closed_cfg.gains.torque_limit = 1.0;
  closed_cfg.plant_scales.platform_mass = 1.2;

  const dd::Trajectory eight_traj(eight);
  const auto closed_tel = dd::run_closed_loop(robot, eight_traj, closed_cfg);
  std::printf("closed eight: rms error %.3e m, %ld clamp events\n",
              rms_error(closed_tel), closed_tel.clamp_events);
  return 0;
}
