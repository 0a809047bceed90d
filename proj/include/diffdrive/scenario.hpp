#pragma once

// Scenario files: INI-style sections with snake_case keys carrying explicit
// units, so a scenario doubles as experiment documentation. Parsing is
// strict — unknown keys, duplicate keys and malformed values are errors with
// file:line diagnostics — and every model-level invariant is checked at load
// time so a scenario that parses will start.
//
//   [robot]       physical parameters            (all keys optional, defaulted)
//   [trajectory]  reference path and speed       (kind selects the key set)
//   [loop]        mode, step, gains, drive       (mode required)
//   [mismatch]    plant-vs-design scale factors  (optional section)
//   [motor]       reluctance drive parameters    (required when drive_model = srm)
//   [output]      csv/svg names and decimation
//
// '#' starts a comment, full-line or trailing.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "diffdrive/control.hpp"
#include "diffdrive/csv.hpp"
#include "diffdrive/errors.hpp"
#include "diffdrive/svg.hpp"

namespace diffdrive {

struct OutputSpec {
  std::string csv = "telemetry.csv";
  std::string svg = "path.svg";
  int decimation = 1;  // CSV keeps every n-th row

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct Scenario {
  RobotParams robot;
  TrajectorySpec trajectory;
  LoopConfig loop;
  OutputSpec output;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

struct IniEntry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

struct IniSection {
  int line = 0;
  std::map<std::string, IniEntry> entries;
  std::vector<std::string> order;  // file order, for diagnostics
};

struct IniDoc {
  std::string filename;
  std::map<std::string, IniSection> sections;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    if (line > 0) throw ConfigError(filename + ":" + std::to_string(line) + ": " + msg);
    throw ConfigError(filename + ": " + msg);
  }
};

inline std::string_view trimmed(std::string_view s) {
  const auto notspace = [](char c) { return c != ' ' && c != '\t' && c != '\r'; };
  while (!s.empty() && !notspace(s.front())) s.remove_prefix(1);
  while (!s.empty() && !notspace(s.back())) s.remove_suffix(1);
  return s;
}

inline IniDoc parse_ini(std::string_view text, std::string filename) {
  IniDoc doc;
  doc.filename = std::move(filename);
  IniSection* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        doc.fail(line_no, "malformed section header '" + std::string(line) + "'");
      const std::string name{trimmed(line.substr(1, line.size() - 2))};
      if (doc.sections.count(name)) doc.fail(line_no, "duplicate section [" + name + "]");
      current = &doc.sections[name];
      current->line = line_no;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      doc.fail(line_no, "expected 'key = value', got '" + std::string(line) + "'");
    const std::string key{trimmed(line.substr(0, eq))};
    const std::string value{trimmed(line.substr(eq + 1))};
    if (key.empty()) doc.fail(line_no, "empty key");
    if (!current) doc.fail(line_no, "key '" + key + "' appears before any section");
    if (current->entries.count(key)) doc.fail(line_no, "duplicate key '" + key + "'");
    current->entries[key] = {value, line_no};
    current->order.push_back(key);
    if (pos > text.size()) break;
  }
  return doc;
}

// Typed, consuming view of one section. finish() rejects leftovers, so a key
// the reader never asked about is an "unknown key" error pointing at it.
class SectionReader {
 public:
  SectionReader(const IniDoc& doc, const std::string& name)
      : doc_(doc), name_(name), sec_(&doc.sections.at(name)) {}

  bool has(const std::string& key) const { return sec_->entries.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = sec_->entries.find(key);
    doc_.fail(it != sec_->entries.end() ? it->second.line : sec_->line, msg);
  }

  std::string text(const std::string& key) {
    const IniEntry* e = consume(key);
    if (!e) doc_.fail(sec_->line, "[" + name_ + "] is missing required key '" + key + "'");
    return e->value;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const IniEntry* e = consume(key);
    return e ? e->value : fallback;
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed,
                     const char* fallback = nullptr) {
    const IniEntry* e = consume(key);
    if (!e) {
      if (fallback) return fallback;
      doc_.fail(sec_->line, "[" + name_ + "] is missing required key '" + key + "'");
    }
    for (const char* a : allowed)
      if (e->value == a) return e->value;
    std::string opts;
    for (const char* a : allowed) {
      if (!opts.empty()) opts += ", ";
      opts += a;
    }
    doc_.fail(e->line, "'" + key + "' must be one of: " + opts);
  }

  double number(const std::string& key) { return require_number(key, nullptr); }
  double number(const std::string& key, double fallback) {
    return require_number(key, &fallback);
  }

  double positive(const std::string& key) { return checked(key, nullptr, 1); }
  double positive(const std::string& key, double fallback) { return checked(key, &fallback, 1); }
  double non_negative(const std::string& key, double fallback) {
    return checked(key, &fallback, 0);
  }

  int integer(const std::string& key, int fallback, int min_value) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "'" + key + "' must be an integer");
    if (v < min_value)
      fail(key, "'" + key + "' must be at least " + std::to_string(min_value));
    return static_cast<int>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    const IniEntry* e = consume(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    doc_.fail(e->line, "'" + key + "' must be true or false");
  }

  int line() const { return sec_->line; }

  void finish() const {
    for (const std::string& key : sec_->order) {
      const IniEntry& e = sec_->entries.at(key);
      if (!e.used)
        doc_.fail(e.line, "unknown key '" + key + "' in [" + name_ + "]");
    }
  }

 private:
  const IniEntry* consume(const std::string& key) {
    const auto it = sec_->entries.find(key);
    if (it == sec_->entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  double parse_double(const IniEntry& e, const std::string& key) const {
    std::string_view v{e.value};
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
      doc_.fail(e.line, "'" + key + "' is not a finite number: '" + e.value + "'");
    return out;
  }

  double require_number(const std::string& key, const double* fallback) {
    const IniEntry* e = consume(key);
    if (!e) {
      if (fallback) return *fallback;
      doc_.fail(sec_->line, "[" + name_ + "] is missing required key '" + key + "'");
    }
    return parse_double(*e, key);
  }

  // floor_kind: 1 = strictly positive, 0 = non-negative
  double checked(const std::string& key, const double* fallback, int floor_kind) {
    const IniEntry* e = consume(key);
    if (!e) {
      if (fallback) return *fallback;
      doc_.fail(sec_->line, "[" + name_ + "] is missing required key '" + key + "'");
    }
    const double v = parse_double(*e, key);
    if (floor_kind == 1 && !(v > 0.0))
      doc_.fail(e->line, key + " must be positive");
    if (floor_kind == 0 && !(v >= 0.0))
      doc_.fail(e->line, key + " must be non-negative");
    return v;
  }

  const IniDoc& doc_;
  std::string name_;
  const IniSection* sec_;
};

inline std::vector<Vec2> parse_waypoints(const std::string& value, SectionReader& rd,
                                         const std::string& key) {
  std::vector<Vec2> pts;
  std::size_t pos = 0;
  const std::string_view v{value};
  while (pos < v.size()) {
    std::size_t semi = v.find(';', pos);
    if (semi == std::string_view::npos) semi = v.size();
    const std::string_view pair = trimmed(v.substr(pos, semi - pos));
    pos = semi + 1;
    if (pair.empty()) continue;
    const std::size_t comma = pair.find(',');
    if (comma == std::string_view::npos)
      rd.fail(key, "waypoint '" + std::string(pair) + "' must be 'x, y'");
    auto parse_one = [&](std::string_view cell) {
      cell = trimmed(cell);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double out = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(out))
        rd.fail(key, "waypoint coordinate '" + std::string(cell) + "' is not a number");
      return out;
    };
    pts.push_back({parse_one(pair.substr(0, comma)), parse_one(pair.substr(comma + 1))});
  }
  if (pts.size() < 2) rd.fail(key, "waypoints need at least two points");
  return pts;
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text, const std::string& filename = "<string>") {
  const detail::IniDoc doc = detail::parse_ini(text, filename);
  for (const char* required : {"robot", "trajectory", "loop", "output"})
    if (!doc.sections.count(required))
      doc.fail(0, "missing required section [" + std::string(required) + "]");
  for (const auto& [name, sec] : doc.sections)
    if (name != "robot" && name != "trajectory" && name != "loop" && name != "output" &&
        name != "mismatch" && name != "motor")
      doc.fail(sec.line, "unknown section [" + name + "]");

  Scenario sc;

  {
    detail::SectionReader rd(doc, "robot");
    RobotParams& p = sc.robot;
    p.platform_mass = rd.positive("platform_mass_kg", p.platform_mass);
    p.wheel_mass = rd.positive("wheel_mass_kg", p.wheel_mass);
    p.platform_yaw_inertia = rd.positive("platform_yaw_inertia_kgm2", p.platform_yaw_inertia);
    p.wheel_spin_inertia = rd.positive("wheel_spin_inertia_kgm2", p.wheel_spin_inertia);
    p.wheel_yaw_inertia = rd.positive("wheel_yaw_inertia_kgm2", p.wheel_yaw_inertia);
    p.rotor_inertia = rd.positive("rotor_inertia_kgm2", p.rotor_inertia);
    p.gear_ratio = rd.positive("gear_ratio", p.gear_ratio);
    if (p.gear_ratio < 1.0) rd.fail("gear_ratio", "gear_ratio must be at least 1");
    p.wheel_radius = rd.positive("wheel_radius_m", p.wheel_radius);
    p.half_track = rd.positive("half_track_m", p.half_track);
    p.wheel_offset = rd.non_negative("wheel_offset_m", p.wheel_offset);
    rd.finish();
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      doc.fail(rd.line(), std::string("[robot] ") + e.what());
    }
  }

  {
    detail::SectionReader rd(doc, "trajectory");
    TrajectorySpec& t = sc.trajectory;
    const std::string kind = rd.choice("kind", {"line", "circle", "lemniscate", "polyline"});
    t.t0 = rd.number("t0_s", 0.0);
    t.duration = rd.positive("duration_s");
    t.speed.cruise = rd.positive("speed_mps");
    t.speed.ramp_time = rd.non_negative("ramp_time_s", 0.0);
    if (t.speed.ramp_time > 0.0) {
      t.speed.ramp_start = rd.positive("ramp_start_speed_mps");
    } else if (rd.has("ramp_start_speed_mps")) {
      rd.fail("ramp_start_speed_mps", "ramp_start_speed_mps requires ramp_time_s > 0");
    }
    if (kind == "line") {
      t.kind = PathKind::line;
      t.start_x = rd.number("start_x_m", 0.0);
      t.start_y = rd.number("start_y_m", 0.0);
      t.heading = rd.number("heading_rad", 0.0);
    } else if (kind == "circle") {
      t.kind = PathKind::circle;
      t.center_x = rd.number("center_x_m", 0.0);
      t.center_y = rd.number("center_y_m", 0.0);
      t.radius = rd.positive("radius_m");
      t.start_angle = rd.number("start_angle_rad", t.start_angle);
      t.clockwise = rd.choice("direction", {"ccw", "cw"}, "ccw") == std::string("cw");
    } else if (kind == "lemniscate") {
      t.kind = PathKind::lemniscate;
      t.center_x = rd.number("center_x_m", 0.0);
      t.center_y = rd.number("center_y_m", 0.0);
      t.scale = rd.positive("scale_m");
      t.start_phase = rd.number("start_phase_rad", t.start_phase);
    } else {
      t.kind = PathKind::polyline;
      t.waypoints = detail::parse_waypoints(rd.text("waypoints_m"), rd, "waypoints_m");
      t.corner_smoothing = rd.positive("corner_smoothing_m", t.corner_smoothing);
    }
    rd.finish();
  }

  {
    detail::SectionReader rd(doc, "loop");
    LoopConfig& l = sc.loop;
    l.mode = rd.choice("mode", {"open", "closed"}) == std::string("closed")
                 ? LoopMode::closed
                 : LoopMode::open;
    l.dt = rd.positive("dt_s", l.dt);
    l.duration = rd.positive("duration_s", sc.trajectory.duration);
    l.gains.kp = rd.non_negative("kp", l.gains.kp);
    l.gains.kd = rd.non_negative("kd", l.gains.kd);
    l.gains.ki = rd.non_negative("ki", l.gains.ki);
    l.gains.kw = rd.non_negative("kw", l.gains.kw);
    l.gains.torque_limit = rd.positive("torque_limit_nm", l.gains.torque_limit);
    l.v_min = rd.positive("v_min_mps", l.v_min);
    l.drive = rd.choice("drive_model", {"ideal", "srm"}, "ideal") == std::string("srm")
                  ? DriveModel::srm
                  : DriveModel::ideal;
    if (l.mode == LoopMode::closed) {
      // a configured closed loop must actually regulate
      if (!(l.gains.kp > 0.0)) rd.fail("kp", "kp must be positive in closed mode");
      if (!(l.gains.kd > 0.0)) rd.fail("kd", "kd must be positive in closed mode");
    }
    if (l.duration > sc.trajectory.duration * (1.0 + 1e-9))
      rd.fail("duration_s", "loop duration exceeds the trajectory duration");
    if (step_count(l.duration, l.dt) < 1)
      rd.fail("dt_s", "loop duration is shorter than one step");
    rd.finish();
  }

  if (doc.sections.count("mismatch")) {
    detail::SectionReader rd(doc, "mismatch");
    ParamScales& m = sc.loop.plant_scales;
    m.platform_mass = rd.positive("platform_mass_scale", 1.0);
    m.wheel_mass = rd.positive("wheel_mass_scale", 1.0);
    m.platform_yaw_inertia = rd.positive("platform_yaw_inertia_scale", 1.0);
    m.wheel_spin_inertia = rd.positive("wheel_spin_inertia_scale", 1.0);
    m.wheel_yaw_inertia = rd.positive("wheel_yaw_inertia_scale", 1.0);
    m.rotor_inertia = rd.positive("rotor_inertia_scale", 1.0);
    m.gear_ratio = rd.positive("gear_ratio_scale", 1.0);
    m.wheel_radius = rd.positive("wheel_radius_scale", 1.0);
    m.half_track = rd.positive("half_track_scale", 1.0);
    m.wheel_offset = rd.non_negative("wheel_offset_scale", 1.0);
    rd.finish();
    try {
      sc.loop.plant_scales.apply(sc.robot).validate();
    } catch (const std::invalid_argument& e) {
      doc.fail(rd.line(), std::string("[mismatch] perturbed robot is invalid: ") + e.what());
    }
  }

  if (doc.sections.count("motor")) {
    detail::SectionReader rd(doc, "motor");
    MotorParams& m = sc.loop.motor;
    m.phase_count = rd.integer("phase_count", m.phase_count, 1);
    m.resistance = rd.positive("phase_resistance_ohm", m.resistance);
    m.inductance_mean = rd.positive("inductance_mean_h", m.inductance_mean);
    m.inductance_swing = rd.non_negative("inductance_swing_h", m.inductance_swing);
    m.rotor_poles = rd.integer("rotor_poles", m.rotor_poles, 1);
    m.supply_voltage = rd.positive("supply_voltage_v", m.supply_voltage);
    m.hysteresis = rd.positive("hysteresis_nm", m.hysteresis);
    m.demag_current = rd.positive("demag_current_a", m.demag_current);
    m.rated_torque = rd.positive("rated_torque_nm", m.rated_torque);
    m.half_torque_factor = rd.flag("torque_half_factor", m.half_torque_factor);
    rd.finish();
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      doc.fail(rd.line(), std::string("[motor] ") + e.what());
    }
  }

  if (sc.loop.drive == DriveModel::srm) {
    if (!doc.sections.count("motor"))
      doc.fail(doc.sections.at("loop").line, "drive_model = srm requires a [motor] section");
    if (sc.loop.gains.torque_limit > sc.loop.motor.rated_torque * (1.0 + 1e-9))
      doc.fail(doc.sections.at("loop").line,
               "torque_limit_nm exceeds the motor's rated_torque_nm");
  }

  {
    detail::SectionReader rd(doc, "output");
    OutputSpec& o = sc.output;
    o.csv = rd.text("csv", o.csv);
    o.svg = rd.text("svg", o.svg);
    o.decimation = rd.integer("decimation", o.decimation, 1);
    auto check_path = [&rd](const char* key, const std::string& path) {
      if (path.empty()) rd.fail(key, std::string(key) + " path must not be empty");
      if (std::filesystem::path(path).is_absolute())
        rd.fail(key, std::string(key) + " path must be relative to the output directory");
    };
    check_path("csv", o.csv);
    check_path("svg", o.svg);
    rd.finish();
  }

  // A scenario that parses must be runnable: construct the trajectory now so
  // geometric problems surface here with the file name attached.
  try {
    (void)Trajectory(sc.trajectory);
  } catch (const std::invalid_argument& e) {
    doc.fail(doc.sections.at("trajectory").line, e.what());
  }

  return sc;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.filename().string());
}

// Canonical emission: every section, every key, fixed order. Numbers use
// shortest round-trip form, so parse(emit(sc)) == sc exactly.
inline std::string emit_scenario(const Scenario& sc) {
  std::string out;
  auto kv = [&out](const char* key, double v) {
    out += key;
    out += " = ";
    detail::append_number(out, v);
    out += '\n';
  };
  auto kvs = [&out](const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
  };

  out += "[robot]\n";
  kv("platform_mass_kg", sc.robot.platform_mass);
  kv("wheel_mass_kg", sc.robot.wheel_mass);
  kv("platform_yaw_inertia_kgm2", sc.robot.platform_yaw_inertia);
  kv("wheel_spin_inertia_kgm2", sc.robot.wheel_spin_inertia);
  kv("wheel_yaw_inertia_kgm2", sc.robot.wheel_yaw_inertia);
  kv("rotor_inertia_kgm2", sc.robot.rotor_inertia);
  kv("gear_ratio", sc.robot.gear_ratio);
  kv("wheel_radius_m", sc.robot.wheel_radius);
  kv("half_track_m", sc.robot.half_track);
  kv("wheel_offset_m", sc.robot.wheel_offset);

  out += "\n[trajectory]\n";
  const TrajectorySpec& t = sc.trajectory;
  switch (t.kind) {
    case PathKind::line: kvs("kind", "line"); break;
    case PathKind::circle: kvs("kind", "circle"); break;
    case PathKind::lemniscate: kvs("kind", "lemniscate"); break;
    case PathKind::polyline: kvs("kind", "polyline"); break;
  }
  kv("t0_s", t.t0);
  kv("duration_s", t.duration);
  kv("speed_mps", t.speed.cruise);
  kv("ramp_time_s", t.speed.ramp_time);
  if (t.speed.ramp_time > 0.0) kv("ramp_start_speed_mps", t.speed.ramp_start);
  switch (t.kind) {
    case PathKind::line:
      kv("start_x_m", t.start_x);
      kv("start_y_m", t.start_y);
      kv("heading_rad", t.heading);
      break;
    case PathKind::circle:
      kv("center_x_m", t.center_x);
      kv("center_y_m", t.center_y);
      kv("radius_m", t.radius);
      kv("start_angle_rad", t.start_angle);
      kvs("direction", t.clockwise ? "cw" : "ccw");
      break;
    case PathKind::lemniscate:
      kv("center_x_m", t.center_x);
      kv("center_y_m", t.center_y);
      kv("scale_m", t.scale);
      kv("start_phase_rad", t.start_phase);
      break;
    case PathKind::polyline: {
      std::string wp;
      for (const Vec2& p : t.waypoints) {
        if (!wp.empty()) wp += "; ";
        detail::append_number(wp, p.x);
        wp += ", ";
        detail::append_number(wp, p.y);
      }
      kvs("waypoints_m", wp);
      kv("corner_smoothing_m", t.corner_smoothing);
      break;
    }
  }

  out += "\n[loop]\n";
  kvs("mode", sc.loop.mode == LoopMode::closed ? "closed" : "open");
  kv("dt_s", sc.loop.dt);
  kv("duration_s", sc.loop.duration);
  kv("kp", sc.loop.gains.kp);
  kv("kd", sc.loop.gains.kd);
  kv("ki", sc.loop.gains.ki);
  kv("kw", sc.loop.gains.kw);
  kv("torque_limit_nm", sc.loop.gains.torque_limit);
  kv("v_min_mps", sc.loop.v_min);
  kvs("drive_model", sc.loop.drive == DriveModel::srm ? "srm" : "ideal");

  out += "\n[mismatch]\n";
  const ParamScales& m = sc.loop.plant_scales;
  kv("platform_mass_scale", m.platform_mass);
  kv("wheel_mass_scale", m.wheel_mass);
  kv("platform_yaw_inertia_scale", m.platform_yaw_inertia);
  kv("wheel_spin_inertia_scale", m.wheel_spin_inertia);
  kv("wheel_yaw_inertia_scale", m.wheel_yaw_inertia);
  kv("rotor_inertia_scale", m.rotor_inertia);
  kv("gear_ratio_scale", m.gear_ratio);
  kv("wheel_radius_scale", m.wheel_radius);
  kv("half_track_scale", m.half_track);
  kv("wheel_offset_scale", m.wheel_offset);

  out += "\n[motor]\n";
  const MotorParams& mp = sc.loop.motor;
  kv("phase_count", mp.phase_count);
  kv("phase_resistance_ohm", mp.resistance);
  kv("inductance_mean_h", mp.inductance_mean);
  kv("inductance_swing_h", mp.inductance_swing);
  kv("rotor_poles", mp.rotor_poles);
  kv("supply_voltage_v", mp.supply_voltage);
  kv("hysteresis_nm", mp.hysteresis);
  kv("demag_current_a", mp.demag_current);
  kv("rated_torque_nm", mp.rated_torque);
  kvs("torque_half_factor", mp.half_torque_factor ? "true" : "false");

  out += "\n[output]\n";
  kvs("csv", sc.output.csv);
  kvs("svg", sc.output.svg);
  kv("decimation", sc.output.decimation);
  return out;
}

// Lumped parameters the plant actually integrates (after mismatch scaling).
inline LumpedParams scenario_plant_params(const Scenario& sc) {
  return lump_params(sc.loop.plant_scales.apply(sc.robot));
}

struct RunArtifacts {
  std::filesystem::path csv_path;
  std::filesystem::path svg_path;
  Telemetry telemetry;
};

// Runs the scenario and writes its artifacts under out_dir. The SVG's actual
// path is rebuilt from the serialized CSV — the plot stays reproducible from
// the file alone — while the reference curve is re-sampled from the spec.
inline RunArtifacts run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
  const Trajectory traj(sc.trajectory);
  Telemetry tel = sc.loop.mode == LoopMode::closed ? run_closed_loop(sc.robot, traj, sc.loop)
                                                   : run_open_loop(sc.robot, traj, sc.loop);
  const std::string csv = telemetry_to_csv(tel, sc.output.decimation);

  RunArtifacts art;
  art.csv_path = out_dir / sc.output.csv;
  art.svg_path = out_dir / sc.output.svg;
  for (const auto& p : {art.csv_path, art.svg_path})
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  write_text_file(art.csv_path, csv);

  const CsvTable table = parse_csv(csv);
  const std::size_t ct = table.column("t");
  const std::size_t cx = table.column("x");
  const std::size_t cy = table.column("y");
  std::vector<PathPoint> actual, reference;
  actual.reserve(table.rows.size());
  reference.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    actual.push_back({row[cx], row[cy]});
    const TrajectorySample ref = traj.sample(row[ct]);
    reference.push_back({ref.x, ref.y});
  }
  write_text_file(art.svg_path, emit_svg(actual, reference));

  art.telemetry = std::move(tel);
  return art;
}

}  // namespace diffdrive
