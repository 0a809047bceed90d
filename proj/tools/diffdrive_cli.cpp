// Scenario runner for the differential-drive simulation library.
//
//   diffdrive run <scenario>... [--out-dir DIR] [--dt-override DT] [--jobs N]
//   diffdrive validate <scenario>...
//   diffdrive list-scenarios
//
// Scenario arguments are file paths, or bare names resolved against the
// scenario directory (--scenario-dir, $DIFFDRIVE_SCENARIOS, or the shipped
// set). Exit codes: 0 success, 2 configuration error, 3 numeric divergence,
// 4 planner singularity, 1 anything else.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "diffdrive/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitSingular = 4;

#ifndef DIFFDRIVE_SCENARIO_DIR
#define DIFFDRIVE_SCENARIO_DIR "scenarios"
#endif

fs::path scenario_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DIFFDRIVE_SCENARIOS"); env && *env) return env;
  return DIFFDRIVE_SCENARIO_DIR;
}

fs::path output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("DIFFDRIVE_OUT"); env && *env) return env;
  return ".";
}

// A scenario argument may be a path or a name from the scenario directory.
fs::path resolve_scenario(const std::string& arg, const fs::path& dir) {
  if (fs::exists(arg)) return arg;
  const fs::path named = dir / arg;
  if (fs::exists(named)) return named;
  const fs::path with_ext = dir / (arg + ".scn");
  if (fs::exists(with_ext)) return with_ext;
  throw diffdrive::ConfigError("no scenario '" + arg + "' (tried the path itself, " +
                               named.string() + ", " + with_ext.string() + ")");
}

struct Outcome {
  int code = kExitOk;
  std::string out;  // stdout payload
  std::string err;  // stderr payload
};

template <class Fn>
Outcome guarded(const std::string& label, Fn&& fn) {
  Outcome res;
  try {
    res.out = fn();
  } catch (const diffdrive::ConfigError& e) {
    res.code = kExitConfig;
    res.err = label + ": configuration error: " + e.what() + "\n";
  } catch (const diffdrive::SingularSpeed& e) {
    res.code = kExitSingular;
    res.err = label + ": planner singularity: " + e.what() + "\n";
  } catch (const diffdrive::DivergenceError& e) {
    res.code = kExitDiverged;
    res.err = label + ": " + std::string(e.what()) + "\n";
  } catch (const std::exception& e) {
    res.code = kExitOther;
    res.err = label + ": error: " + e.what() + "\n";
  }
  return res;
}

int emit_outcomes(const std::vector<Outcome>& results) {
  int code = kExitOk;
  for (const Outcome& r : results) {
    std::cout << r.out;
    std::cerr << r.err;
    if (r.code != kExitOk && code == kExitOk) code = r.code;
  }
  return code;
}

std::string apply_dt_override(diffdrive::Scenario& sc, std::optional<double> dt) {
  if (!dt) return {};
  if (!(*dt > 0.0))
    throw diffdrive::ConfigError("--dt-override must be positive");
  if (diffdrive::step_count(sc.loop.duration, *dt) < 1)
    throw diffdrive::ConfigError("--dt-override leaves less than one step in " +
                                 std::to_string(sc.loop.duration) + " s");
  sc.loop.dt = *dt;
  return " (dt overridden to " + std::to_string(*dt) + " s)";
}

int cmd_run(const std::vector<std::string>& names, const fs::path& dir, const fs::path& out,
            std::optional<double> dt_override, int jobs) {
  std::vector<Outcome> results(names.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < names.size();) {
      results[i] = guarded(names[i], [&, i] {
        diffdrive::Scenario sc = diffdrive::parse_scenario_file(resolve_scenario(names[i], dir));
        const std::string note = apply_dt_override(sc, dt_override);
        const diffdrive::RunArtifacts art = diffdrive::run_scenario(sc, out);
        const std::size_t csv_rows =
            (art.telemetry.rows.size() + sc.output.decimation - 1) /
            static_cast<std::size_t>(sc.output.decimation);
        return names[i] + ": wrote " + art.csv_path.string() + " (" +
               std::to_string(csv_rows) + " rows) and " + art.svg_path.string() + note + "\n";
      });
    }
  };
  const int n_threads = std::clamp<int>(jobs, 1, static_cast<int>(names.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return emit_outcomes(results);
}

int cmd_validate(const std::vector<std::string>& names, const fs::path& dir) {
  std::vector<Outcome> results;
  results.reserve(names.size());
  for (const std::string& name : names) {
    results.push_back(guarded(name, [&] {
      const fs::path path = resolve_scenario(name, dir);
      const diffdrive::Scenario sc = diffdrive::parse_scenario_file(path);
      const diffdrive::Trajectory traj(sc.trajectory);
      std::string msg = name + ": ok (" +
                        std::string(sc.loop.mode == diffdrive::LoopMode::closed ? "closed" : "open") +
                        " loop, " +
                        std::to_string(diffdrive::step_count(sc.loop.duration, sc.loop.dt)) +
                        " steps)\n";
      if (traj.min_speed() < sc.loop.v_min)
        msg += name + ": warning: certified reference speed " +
               std::to_string(traj.min_speed()) + " m/s is below v_min_mps " +
               std::to_string(sc.loop.v_min) + "; the planner may abort\n";
      return msg;
    }));
  }
  return emit_outcomes(results);
}

int cmd_list(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "scenario directory not found: " << dir.string() << "\n";
    return kExitOther;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".scn")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    std::string blurb;
    const std::string text = diffdrive::read_text_file(f);
    if (text.rfind("# ", 0) == 0) {
      const std::size_t eol = text.find('\n');
      blurb = text.substr(2, eol == std::string::npos ? std::string::npos : eol - 2);
    }
    std::cout << f.stem().string();
    if (!blurb.empty()) std::cout << " - " << blurb;
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differential-drive trajectory simulation scenarios"};
  app.require_subcommand(1);

  std::string dir_flag;
  app.add_option("--scenario-dir", dir_flag,
                 "directory searched for scenario names (default: shipped set, or "
                 "$DIFFDRIVE_SCENARIOS)");

  std::vector<std::string> run_names;
  std::string out_flag;
  double dt_flag = 0.0;
  unsigned seed_flag = 0;
  int jobs_flag = 1;
  CLI::App* run = app.add_subcommand("run", "run scenarios and write CSV + SVG artifacts");
  run->fallthrough();  // app-level options may follow the subcommand
  run->add_option("scenario", run_names, "scenario files or names")->required();
  run->add_option("--out-dir", out_flag, "output directory (default: $DIFFDRIVE_OUT or .)");
  CLI::Option* dt_opt =
      run->add_option("--dt-override", dt_flag, "replace the scenario's loop step, seconds");
  run->add_option("--seed", seed_flag, "reserved; current scenarios are deterministic");
  run->add_option("--jobs", jobs_flag, "run up to N scenarios in parallel")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> validate_names;
  CLI::App* validate =
      app.add_subcommand("validate", "parse scenarios and report problems without running");
  validate->fallthrough();
  validate->add_option("scenario", validate_names, "scenario files or names")->required();

  app.add_subcommand("list-scenarios", "list scenarios available in the scenario directory")
      ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const fs::path dir = scenario_dir(dir_flag);
  if (run->parsed())
    return cmd_run(run_names, dir, output_dir(out_flag),
                   dt_opt->count() ? std::optional<double>(dt_flag) : std::nullopt, jobs_flag);
  if (validate->parsed()) return cmd_validate(validate_names, dir);
  return cmd_list(dir);
}
