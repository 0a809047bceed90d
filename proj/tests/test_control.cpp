// Control loop: regulator algebra, body projection, saturation, anti-windup,
// and the open/closed tracking runs on matched and mismatched plants.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "diffdrive/control.hpp"
#include "testutil.hpp"

using diffdrive::BodyAccel;
using diffdrive::DriveModel;
using diffdrive::LoopConfig;
using diffdrive::PoseState;
using diffdrive::RegulatorGains;
using diffdrive::RobotParams;
using diffdrive::Telemetry;
using diffdrive::Trajectory;
using diffdrive::TrajectorySample;
using diffdrive::TrajectorySpec;
using diffdrive::Vec2;
using diffdrive::WheelTorques;

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

TrajectorySpec lemniscate_spec() {
  TrajectorySpec spec;
  spec.kind = diffdrive::PathKind::lemniscate;
  spec.scale = 1.0;
  spec.speed.cruise = 0.22;
  spec.duration = 20.0;
  return spec;
}

TrajectorySpec circle_spec() {
  TrajectorySpec spec;
  spec.center_y = 1.0;
  spec.speed.cruise = 0.5;
  spec.duration = 20.0;
  return spec;
}

RegulatorGains zero_gains() {
  RegulatorGains g;
  g.kp = 0.0;
  g.kd = 0.0;
  g.ki = 0.0;
  g.kw = 0.0;
  return g;
}

double max_row_err(const Telemetry& tel) {
  double worst = 0.0;
  for (const auto& row : tel.rows) worst = std::max(worst, row.err);
  return worst;
}

double terminal_err(const Telemetry& tel, const Trajectory& traj) {
  const TrajectorySample end = traj.sample(tel.final_time);
  return std::hypot(tel.final_state.x - end.x, tel.final_state.y - end.y);
}

}  // namespace

TEST_CASE("position regulator: feedforward plus per-axis PD(+I) feedback",
          "[control]") {
  TrajectorySample ref;
  ref.x = 1.0;
  ref.y = -2.0;
  ref.dx = 0.3;
  ref.dy = 0.1;
  ref.ddx = 0.05;
  ref.ddy = -0.02;

  PoseState meas;
  meas.x = 0.8;
  meas.y = -2.3;
  meas.heading = 0.0;
  meas.speed = 0.25;  // world velocity (0.25, 0)

  // zero gains pass the feedforward through untouched
  const Vec2 ff = diffdrive::position_regulator(ref, meas, Vec2{}, zero_gains());
  CHECK(ff.x == ref.ddx);
  CHECK(ff.y == ref.ddy);

  // pure P
  RegulatorGains p = zero_gains();
  p.kp = 2.0;
  const Vec2 up = diffdrive::position_regulator(ref, meas, Vec2{}, p);
  CHECK_THAT(up.x, WithinRel(0.05 + 2.0 * 0.2, 1e-12));
  CHECK_THAT(up.y, WithinRel(-0.02 + 2.0 * 0.3, 1e-12));

  // full PD+I, with the measured velocity resolved through the heading
  RegulatorGains g = zero_gains();
  g.kp = 2.0;
  g.kd = 3.0;
  g.ki = 0.5;
  const Vec2 integ{0.4, -0.6};
  const Vec2 u = diffdrive::position_regulator(ref, meas, integ, g);
  CHECK_THAT(u.x, WithinRel(0.05 + 3.0 * (0.3 - 0.25) + 2.0 * 0.2 + 0.5 * 0.4, 1e-12));
  CHECK_THAT(u.y, WithinRel(-0.02 + 3.0 * 0.1 + 2.0 * 0.3 + 0.5 * (-0.6), 1e-12));
}

TEST_CASE("critically damped regulator settles without overshoot", "[control]") {
  RegulatorGains g = zero_gains();
  g.kp = 1.0;
  g.kd = 2.0;  // kd^2 = 4 kp: critical damping
  TrajectorySample origin;  // rest reference at (0, 0)
  double x = 1.0, v = 0.0;
  double min_x = x;
  const double dt = 1e-3;
  for (int n = 0; n < 20000; ++n) {
    PoseState meas;
    meas.x = x;
    meas.speed = v;  // heading 0: speed is the x velocity
    const Vec2 u = diffdrive::position_regulator(origin, meas, Vec2{}, g);
    v += u.x * dt;
    x += v * dt;
    min_x = std::min(min_x, x);
  }
  CHECK(min_x >= -1e-9);  // never crosses the setpoint
  CHECK(x > 0.0);
  CHECK(std::abs(x) < 1e-6);  // settled (continuous limit 21 e^-20)
}

TEST_CASE("acceleration commands project onto thrust and steering", "[control]") {
  // aligned: all of the command lands in the thrust channel
  PoseState fwd;
  fwd.speed = 0.5;
  const BodyAccel a = diffdrive::accel_to_body(Vec2{0.3, 0.0}, fwd);
  CHECK_THAT(a.accel, WithinRel(0.3, 1e-14));
  CHECK(a.yaw_accel == 0.0);
  CHECK_FALSE(a.heading_hold);

  // lateral: steering picks up command / speed
  const BodyAccel b = diffdrive::accel_to_body(Vec2{0.0, 0.2}, fwd);
  CHECK(b.accel == 0.0);
  CHECK_THAT(b.yaw_accel, WithinRel(0.4, 1e-14));

  // reversing flips the steering sense
  PoseState rev = fwd;
  rev.speed = -0.5;
  CHECK_THAT(diffdrive::accel_to_body(Vec2{0.0, 0.2}, rev).yaw_accel,
             WithinRel(-0.4, 1e-14));

  // below the speed floor the yaw channel is dropped, not divided by ~0
  PoseState crawl;
  crawl.speed = 1e-4;
  const BodyAccel c = diffdrive::accel_to_body(Vec2{0.1, 0.2}, crawl, 1e-3);
  CHECK(c.yaw_accel == 0.0);
  CHECK(c.heading_hold);

  // round trip: reassembling the world vector from the body channels
  for (int i = 0; i < 200; ++i) {
    PoseState s;
    s.heading = testutil::rand_in(-3.0, 3.0);
    s.speed = testutil::rand_in(0.2, 1.5);
    const Vec2 cmd{testutil::rand_in(-2.0, 2.0), testutil::rand_in(-2.0, 2.0)};
    const BodyAccel ba = diffdrive::accel_to_body(cmd, s);
    const double lat = ba.yaw_accel * s.speed;
    const double ch = std::cos(s.heading), sh = std::sin(s.heading);
    CHECK_THAT(ba.accel * ch - lat * sh, WithinAbs(cmd.x, 1e-14));
    CHECK_THAT(ba.accel * sh + lat * ch, WithinAbs(cmd.y, 1e-14));
  }
}

TEST_CASE("saturation clamps per channel and reports the cut", "[control]") {
  bool clamped = true;
  const WheelTorques inside = diffdrive::saturate({0.3, -0.2}, 0.5, &clamped);
  CHECK(inside.left == 0.3);
  CHECK(inside.right == -0.2);
  CHECK_FALSE(clamped);

  const WheelTorques both = diffdrive::saturate({2.0, -3.0}, 1.0, &clamped);
  CHECK(both.left == 1.0);
  CHECK(both.right == -1.0);
  CHECK(clamped);

  const WheelTorques one = diffdrive::saturate({0.2, 5.0}, 1.0, &clamped);
  CHECK(one.left == 0.2);
  CHECK(one.right == 1.0);
  CHECK(clamped);

  CHECK_NOTHROW(diffdrive::saturate({9.0, 9.0}, 1.0));  // flag is optional
  CHECK_THROWS_WITH(diffdrive::saturate({0.0, 0.0}, 0.0),
                    ContainsSubstring("saturate: limit must be positive"));
  CHECK_THROWS_WITH(diffdrive::saturate({0.0, 0.0}, -1.0),
                    ContainsSubstring("limit must be positive"));
}

TEST_CASE("zero feedback gains make the closed loop the open loop, bitwise",
          "[control]") {
  const RobotParams robot;
  const Trajectory traj{lemniscate_spec()};
  LoopConfig cfg;
  cfg.gains = zero_gains();
  cfg.duration = 20.0;

  const Telemetry open = diffdrive::run_open_loop(robot, traj, cfg);
  const Telemetry closed = diffdrive::run_closed_loop(robot, traj, cfg);
  REQUIRE(open.rows.size() == closed.rows.size());
  CHECK(open.final_state == closed.final_state);
  for (std::size_t i = 0; i < open.rows.size(); ++i) {
    REQUIRE(open.rows[i].state == closed.rows[i].state);
    REQUIRE(open.rows[i].torque == closed.rows[i].torque);
  }
  CHECK_FALSE(open.closed_loop);
  CHECK(closed.closed_loop);
  CHECK(open.control.empty());
  CHECK(closed.control.size() == closed.rows.size());
}

TEST_CASE("on a matched plant the feedback has nothing to say", "[control]") {
  const RobotParams robot;
  const Trajectory traj{lemniscate_spec()};
  LoopConfig cfg;  // default gains kp 25, kd 10, kw 5
  cfg.duration = 20.0;

  const Telemetry open = diffdrive::run_open_loop(robot, traj, cfg);
  const Telemetry closed = diffdrive::run_closed_loop(robot, traj, cfg);
  double max_du = 0.0;
  for (std::size_t i = 0; i < open.rows.size(); ++i) {
    max_du = std::max(max_du, std::abs(open.rows[i].torque.left -
                                       closed.rows[i].torque.left));
    max_du = std::max(max_du, std::abs(open.rows[i].torque.right -
                                       closed.rows[i].torque.right));
  }
  CHECK(max_du <= 1e-9);  // measured 5.0e-10
  CHECK(closed.clamp_events == 0);
}

TEST_CASE("runs start pinned to the reference", "[control]") {
  const RobotParams robot;
  const Trajectory traj{circle_spec()};
  LoopConfig cfg;
  cfg.duration = 1.0;
  const Telemetry tel = diffdrive::run_open_loop(robot, traj, cfg);
  const TrajectorySample first = traj.sample(0.0);
  CHECK(tel.rows[0].state.x == first.x);
  CHECK(tel.rows[0].state.y == first.y);
  CHECK_THAT(tel.rows[0].state.speed, WithinAbs(0.5, 1e-12));
  CHECK_THAT(tel.rows[0].state.yaw_rate, WithinAbs(0.5, 1e-12));
  CHECK(tel.rows[0].err == 0.0);
  CHECK(tel.rows[0].ref_x == first.x);
  CHECK(tel.rows[0].ref_y == first.y);
}

TEST_CASE("a 20% heavier platform: open loop drifts away, closed loop holds on",
          "[control]") {
  const RobotParams robot;
  const Trajectory traj{lemniscate_spec()};
  LoopConfig cfg;
  cfg.duration = 20.0;
  cfg.plant_scales.platform_mass = 1.2;

  const Telemetry open = diffdrive::run_open_loop(robot, traj, cfg);
  CHECK(terminal_err(open, traj) > 0.1);  // measured 0.74 m adrift

  const Telemetry closed = diffdrive::run_closed_loop(robot, traj, cfg);
  const double worst = max_row_err(closed);
  CHECK(worst < 1e-3);  // measured 8.4e-4
  CHECK(worst * 50.0 < terminal_err(open, traj));
  CHECK(closed.final_state.finite());
}

TEST_CASE("feedback absorbs a +-50% platform mass error without saturating",
          "[control]") {
  const RobotParams robot;
  const Trajectory traj{lemniscate_spec()};
  for (double scale : {0.5, 1.5}) {
    LoopConfig cfg;
    cfg.duration = 20.0;
    cfg.plant_scales.platform_mass = scale;
    const Telemetry tel = diffdrive::run_closed_loop(robot, traj, cfg);
    INFO("mass scale " << scale);
    CHECK(tel.final_state.finite());
    CHECK(max_row_err(tel) < 5e-3);  // measured 2.0e-3 and 2.1e-3
    CHECK(tel.clamp_events == 0);
  }
}

TEST_CASE("anti-windup freezes the integrator while the torque is cut",
          "[control]") {
  const RobotParams robot;
  const Trajectory traj{circle_spec()};
  LoopConfig cfg;
  cfg.duration = 2.0;
  cfg.gains.ki = 10.0;
  cfg.gains.torque_limit = 1e-9;  // the drive can deliver essentially nothing

  const Telemetry tel = diffdrive::run_closed_loop(robot, traj, cfg);
  REQUIRE(tel.rows.size() == 2000);
  CHECK(tel.clamp_events == 2000);  // every step saturates
  REQUIRE(tel.control.size() == 2000);
  for (const auto& c : tel.control) {
    REQUIRE(c.clamped);
    REQUIRE(c.integ_x == 0.0);  // frozen at its pre-saturation value forever
    REQUIRE(c.integ_y == 0.0);
  }
}

TEST_CASE("the reluctance drive chatters around the ideal torque request",
          "[control]") {
  const RobotParams robot;
  const Trajectory traj{circle_spec()};
  LoopConfig cfg;
  cfg.duration = 2.0;
  cfg.drive = DriveModel::srm;  // cfg.motor holds the catalogue defaults
  cfg.gains.torque_limit = 0.05;

  const Telemetry tel = diffdrive::run_open_loop(robot, traj, cfg);
  REQUIRE(tel.rows.size() == 2000);
  REQUIRE(tel.motor.size() == 2000);

  double bias_acc = 0.0;
  double worst_after_start = 0.0;
  for (std::size_t i = 0; i < tel.rows.size(); ++i) {
    const auto& m = tel.motor[i];
    // the left request is the difference of two nearly equal products, so it
    // is zero only up to one rounding ulp of the operands, not bitwise
    CHECK(std::abs(m.ref_left) < 1e-15);
    if (i > 0) CHECK_THAT(m.ref_right, WithinRel(-0.01875, 1e-9));
    REQUIRE(m.currents_left.size() == 3);
    REQUIRE(m.currents_right.size() == 3);
    for (double c : m.currents_left) REQUIRE(c >= 0.0);
    for (double c : m.currents_right) REQUIRE(c >= 0.0);
    const double err = tel.rows[i].torque.right - m.ref_right;
    bias_acc += err;
    if (i >= 50) worst_after_start = std::max(worst_after_start, std::abs(err));
  }
  // delivered torque per step stays close to the request and nearly unbiased
  CHECK(worst_after_start < 5e-3);  // measured 1.9e-3 at 23 rad/s
  CHECK(std::abs(bias_acc / 2000.0) < 1e-3);  // measured 1.3e-4
  CHECK(tel.final_state.finite());
}

TEST_CASE("loop configuration is validated with named errors", "[control]") {
  const RobotParams robot;
  const Trajectory traj{circle_spec()};

  LoopConfig bad_dt;
  bad_dt.dt = 0.0;
  CHECK_THROWS_WITH(diffdrive::run_open_loop(robot, traj, bad_dt),
                    ContainsSubstring("loop: dt must be positive"));

  LoopConfig short_run;
  short_run.duration = 5e-4;  // dt 1e-3: not even one step
  CHECK_THROWS_WITH(diffdrive::run_open_loop(robot, traj, short_run),
                    ContainsSubstring("duration shorter than one step"));

  LoopConfig too_long;
  too_long.duration = 25.0;
  CHECK_THROWS_WITH(diffdrive::run_open_loop(robot, traj, too_long),
                    ContainsSubstring("duration exceeds the trajectory domain"));

  LoopConfig bad_gain;
  bad_gain.gains.kp = -1.0;
  CHECK_THROWS_WITH(diffdrive::run_closed_loop(robot, traj, bad_gain),
                    ContainsSubstring("gains: kp must be non-negative"));

  LoopConfig bad_limit;
  bad_limit.gains.torque_limit = 0.0;
  CHECK_THROWS_WITH(diffdrive::run_open_loop(robot, traj, bad_limit),
                    ContainsSubstring("torque_limit must be positive"));
}
