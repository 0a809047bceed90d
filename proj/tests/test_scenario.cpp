// Scenario files: strict INI parsing, cross-field validation, canonical
// emission, and the parse/emit round trip over the shipped catalogue.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "diffdrive/scenario.hpp"
#include "testutil.hpp"

using diffdrive::ConfigError;
using diffdrive::DriveModel;
using diffdrive::LoopMode;
using diffdrive::PathKind;
using diffdrive::RobotParams;
using diffdrive::Scenario;

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

// the smallest text that parses: defaults everywhere, unit circle, open loop
std::string minimal(const std::string& robot_extra = "",
                    const std::string& loop_extra = "",
                    const std::string& traj_extra = "",
                    const std::string& output_extra = "") {
  return "[robot]\n" + robot_extra +
         "[trajectory]\n"
         "kind = circle\n"
         "duration_s = 20\n"
         "speed_mps = 0.5\n"
         "radius_m = 1.0\n" +
         traj_extra +
         "[loop]\n"
         "mode = open\n" +
         loop_extra + "[output]\n" + output_extra;
}

void expect_error(const std::string& text, const char* needle) {
  CHECK_THROWS_WITH(diffdrive::parse_scenario(text), ContainsSubstring(needle));
}

}  // namespace

TEST_CASE("the shipped circle scenario parses to the catalogue numbers",
          "[scenario]") {
  const Scenario sc = diffdrive::parse_scenario_file(
      std::filesystem::path(DIFFDRIVE_SCENARIO_DIR) / "circle.scn");

  CHECK(sc.robot == RobotParams{});

  CHECK(sc.trajectory.kind == PathKind::circle);
  CHECK(sc.trajectory.duration == 20.0);
  CHECK(sc.trajectory.speed.cruise == 0.5);
  CHECK(sc.trajectory.speed.ramp_time == 0.0);
  CHECK(sc.trajectory.center_x == 0.0);
  CHECK(sc.trajectory.center_y == 1.0);
  CHECK(sc.trajectory.radius == 1.0);
  CHECK(sc.trajectory.start_angle == -1.5707963267948966);
  CHECK_FALSE(sc.trajectory.clockwise);

  CHECK(sc.loop.mode == LoopMode::open);
  CHECK(sc.loop.dt == 0.001);
  CHECK(sc.loop.duration == 20.0);
  CHECK(sc.loop.gains.torque_limit == 1.0);
  CHECK(sc.loop.gains.kp == 25.0);  // untouched defaults in open mode
  CHECK(sc.loop.drive == DriveModel::ideal);
  CHECK(sc.loop.plant_scales.identity());

  CHECK(sc.output.csv == "circle.csv");
  CHECK(sc.output.svg == "circle.svg");
  CHECK(sc.output.decimation == 1);
}

TEST_CASE("the minimal scenario text parses with defaults", "[scenario]") {
  const Scenario sc = diffdrive::parse_scenario(minimal());
  CHECK(sc.robot == RobotParams{});
  CHECK(sc.loop.dt == 1e-3);
  CHECK(sc.loop.duration == 20.0);  // falls back to the trajectory duration
  CHECK(sc.output.csv == "telemetry.csv");
  CHECK(sc.output.svg == "path.svg");
}

TEST_CASE("structural INI errors carry file and line", "[scenario]") {
  expect_error("", "missing required section [robot]");
  expect_error("[robot]\n", "missing required section [trajectory]");
  expect_error("[robot]\n[trajectory]\nkind = circle\nduration_s = 20\n"
               "speed_mps = 0.5\nradius_m = 1\n[loop]\nmode = open\n",
               "missing required section [output]");

  expect_error("wheel_radius_m = 0.05\n" + minimal(),
               "key 'wheel_radius_m' appears before any section");
  expect_error(minimal() + "[robot\n", "malformed section header");
  expect_error(minimal() + "[robot]\n", "duplicate section [robot]");
  expect_error(minimal("gear_ratio = 2\ngear_ratio = 2\n"),
               "duplicate key 'gear_ratio'");
  expect_error(minimal("just a phrase\n"), "expected 'key = value'");
  expect_error(minimal() + "[extras]\nfoo = 1\n", "unknown section [extras]");

  // a malformed value names its key and line: the 2nd line of the file here
  try {
    diffdrive::parse_scenario(minimal("wheel_radius_m = fast\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("<string>:2:"));
    CHECK_THAT(e.what(),
               ContainsSubstring("'wheel_radius_m' is not a finite number: 'fast'"));
  }
}

TEST_CASE("comments and whitespace are inert", "[scenario]") {
  const Scenario plain = diffdrive::parse_scenario(minimal());
  const Scenario commented = diffdrive::parse_scenario(
      "# leading banner\n\n[robot]   # trailing\n\n"
      "  [trajectory]\n kind = circle  # the shape\n duration_s   =   20\n"
      "speed_mps = 0.5\nradius_m = 1.0\n\n[loop]\nmode = open\n\n[output]\n# end\n");
  CHECK(plain == commented);
}

TEST_CASE("field-level validation points at the offending key", "[scenario]") {
  expect_error(minimal("wheel_radius_m = -0.05\n"), "wheel_radius_m must be positive");
  expect_error(minimal("wheel_offset_m = -0.1\n"), "wheel_offset_m must be non-negative");
  expect_error(minimal("gear_ratio = 0.5\n"), "gear_ratio must be at least 1");
  expect_error(minimal("flux_capacitor = 1.21\n"), "unknown key 'flux_capacitor' in [robot]");
  expect_error(minimal("", "kd = -1\n"), "kd must be non-negative");
  expect_error(minimal("", "", "", "decimation = 0\n"),
               "'decimation' must be at least 1");
  expect_error(minimal("", "", "", "decimation = 2.5\n"),
               "'decimation' must be an integer");
  expect_error(minimal("", "", "", "csv = /tmp/out.csv\n"),
               "csv path must be relative to the output directory");
  expect_error(minimal("", "", "", "svg =\n"), "svg path must not be empty");

  std::string bad_kind = minimal();
  const std::string from = "kind = circle";
  bad_kind.replace(bad_kind.find(from), from.size(), "kind = oval");
  expect_error(bad_kind, "'kind' must be one of: line, circle, lemniscate, polyline");
}

TEST_CASE("trajectory keys are checked per kind", "[scenario]") {
  expect_error("[robot]\n[trajectory]\nkind = circle\nduration_s = 20\n"
               "speed_mps = 0.5\n[loop]\nmode = open\n[output]\n",
               "[trajectory] is missing required key 'radius_m'");
  expect_error(minimal("", "", "ramp_start_speed_mps = 0.2\n"),
               "ramp_start_speed_mps requires ramp_time_s > 0");
  expect_error(minimal("", "", "ramp_time_s = 2.0\n"),
               "[trajectory] is missing required key 'ramp_start_speed_mps'");
  expect_error(minimal("", "", "scale_m = 1.0\n"),
               "unknown key 'scale_m' in [trajectory]");

  // geometric validation runs at parse time, named after the file
  expect_error("[robot]\n[trajectory]\nkind = polyline\nduration_s = 20\n"
               "speed_mps = 0.5\nwaypoints_m = 0,0; 0.1,0; 0.1,1\n"
               "[loop]\nmode = open\n[output]\n",
               "corner_smoothing too large for segment");

  expect_error("[robot]\n[trajectory]\nkind = polyline\nduration_s = 20\n"
               "speed_mps = 0.5\nwaypoints_m = 0,0; 1 0\n[loop]\nmode = open\n[output]\n",
               "waypoint '1 0' must be 'x, y'");
  expect_error("[robot]\n[trajectory]\nkind = polyline\nduration_s = 20\n"
               "speed_mps = 0.5\nwaypoints_m = 0,0; 1,zebra\n[loop]\nmode = open\n[output]\n",
               "waypoint coordinate 'zebra' is not a number");
  expect_error("[robot]\n[trajectory]\nkind = polyline\nduration_s = 20\n"
               "speed_mps = 0.5\nwaypoints_m = 0,0\n[loop]\nmode = open\n[output]\n",
               "waypoints need at least two points");
}

TEST_CASE("loop cross-checks: closed gains, durations, and the motor pairing",
          "[scenario]") {
  std::string closed = minimal();
  const std::string from = "mode = open";
  closed.replace(closed.find(from), from.size(), "mode = closed");
  expect_error(closed.substr(0, closed.find("[output]")) + "kp = 0\n[output]\n",
               "kp must be positive in closed mode");
  expect_error(closed.substr(0, closed.find("[output]")) + "kd = 0\n[output]\n",
               "kd must be positive in closed mode");
  CHECK_NOTHROW(diffdrive::parse_scenario(closed));  // default gains regulate

  expect_error(minimal("", "duration_s = 25\n"),
               "loop duration exceeds the trajectory duration");
  expect_error(minimal("", "duration_s = 0.0005\n"),
               "loop duration is shorter than one step");
  expect_error(minimal("", "drive_model = srm\n"),
               "drive_model = srm requires a [motor] section");
  expect_error(minimal("", "drive_model = srm\ntorque_limit_nm = 0.2\n") +
                   "[motor]\n",
               "torque_limit_nm exceeds the motor's rated_torque_nm");
  CHECK_NOTHROW(diffdrive::parse_scenario(
      minimal("", "drive_model = srm\ntorque_limit_nm = 0.05\n") + "[motor]\n"));

  expect_error(minimal() + "[motor]\ninductance_swing_h = 0.01\n",
               "[motor] motor: inductance_swing must be in [0, inductance_mean)");
  expect_error(minimal() + "[mismatch]\ngear_ratio_scale = 0.25\n",
               "[mismatch] perturbed robot is invalid");
}

TEST_CASE("mismatch scales land on the plant, not the planner", "[scenario]") {
  const Scenario sc = diffdrive::parse_scenario(
      minimal() + "[mismatch]\nplatform_mass_scale = 1.2\n");
  CHECK(sc.loop.plant_scales.platform_mass == 1.2);
  CHECK_FALSE(sc.loop.plant_scales.identity());
  const auto nominal = diffdrive::lump_params(sc.robot);
  const auto plant = diffdrive::scenario_plant_params(sc);
  CHECK_THAT(nominal.mass, WithinRel(11.8, 1e-12));
  CHECK_THAT(plant.mass, WithinRel(13.8, 1e-12));  // +20% of the 10 kg platform
}

TEST_CASE("emission is canonical: parse(emit(s)) == s for the whole catalogue",
          "[scenario]") {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(DIFFDRIVE_SCENARIO_DIR)) {
    if (entry.path().extension() != ".scn") continue;
    ++seen;
    INFO(entry.path().filename().string());
    const Scenario sc = diffdrive::parse_scenario_file(entry.path());
    const std::string emitted = diffdrive::emit_scenario(sc);
    const Scenario back = diffdrive::parse_scenario(emitted, "emitted");
    REQUIRE(back == sc);
    // and emission is a fixed point
    CHECK(diffdrive::emit_scenario(back) == emitted);
  }
  CHECK(seen == 6);
}

TEST_CASE("emission round-trips an in-memory polyline scenario", "[scenario]") {
  Scenario sc;
  sc.trajectory.kind = PathKind::polyline;
  sc.trajectory.waypoints = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
  sc.trajectory.corner_smoothing = 0.2;
  sc.trajectory.speed.cruise = 0.3;
  sc.trajectory.duration = 6.0;
  sc.trajectory.speed.ramp_time = 1.5;
  sc.trajectory.speed.ramp_start = 0.1;
  sc.loop.mode = LoopMode::closed;
  sc.loop.duration = 6.0;
  sc.loop.gains.ki = 10.0;
  sc.loop.plant_scales.half_track = 1.05;
  sc.output.csv = "poly.csv";
  sc.output.svg = "poly.svg";
  const Scenario back = diffdrive::parse_scenario(diffdrive::emit_scenario(sc), "emitted");
  CHECK(back == sc);
}
