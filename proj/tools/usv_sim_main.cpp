// Command-line front end: single runs, weight/wave sweeps, stored-metrics
// comparison, and the bundled six-scenario reference table.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <vector>

#include "usv/config.hpp"
#include "usv/io.hpp"
#include "usv/log.hpp"
#include "usv/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct GlobalOpts {
  std::string out_dir;
  int parallel = 1;
  bool quiet = false;
  unsigned seed = 0;  // reserved
};

fs::path resolve_out_dir(const GlobalOpts& g, const std::string& scenario_dir) {
  if (!g.out_dir.empty()) return g.out_dir;
  if (!scenario_dir.empty()) return scenario_dir;
  if (const char* env = std::getenv("USV_OUT_DIR")) return env;
  return "out";
}

struct RunOutput {
  usv::Metrics metrics;
  fs::path csv_path;
  fs::path json_path;
};

RunOutput run_one(const fs::path& scenario_path, const GlobalOpts& g) {
  const usv::Scenario scenario = usv::load_scenario(scenario_path);
  const auto [file_dir, formats] = usv::detail::output_settings(scenario_path);
  const fs::path out_dir = resolve_out_dir(g, file_dir);
  fs::create_directories(out_dir);

  auto [record, metrics] = usv::run_closed_loop(scenario);

  RunOutput out;
  out.metrics = metrics;
  if (formats.find("csv") != std::string::npos) {
    out.csv_path = out_dir / (scenario.label + "_trajectory.csv");
    usv::write_trajectory_csv(record, out.csv_path);
  }
  if (formats.find("json") != std::string::npos) {
    out.json_path = out_dir / (scenario.label + "_metrics.json");
    usv::write_metrics_json(metrics, scenario.label, out.json_path);
  }
  return out;
}

void print_metrics_line(const usv::Metrics& m) {
  std::cout << m.label << ": avg_roll=" << m.avg_roll_deg
            << " deg, max_roll=" << m.max_roll_deg << " deg, time_to_wpt=";
  if (m.aborted) {
    std::cout << "aborted (" << m.abort_reason << ")";
  } else if (m.time_to_waypoint) {
    std::cout << *m.time_to_waypoint << " s";
  } else {
    std::cout << "not reached";
  }
  std::cout << ", mean_solve=" << m.mean_solve_time << " s\n";
}

int cmd_run(const std::string& scenario, const GlobalOpts& g) {
  const RunOutput out = run_one(scenario, g);
  print_metrics_line(out.metrics);
  return out.metrics.aborted ? kExitRuntime : kExitOk;
}

int cmd_sweep(const std::string& spec_path, const GlobalOpts& g) {
  usv::SweepSpec spec = usv::load_sweep(spec_path);
  if (g.parallel > 1) spec.parallel = g.parallel;
  const fs::path out_dir = resolve_out_dir(g, "");
  fs::create_directories(out_dir);

  const std::vector<usv::SweepCell> cells = usv::run_sweep(spec);
  size_t failed = 0;
  for (const usv::SweepCell& cell : cells) {
    usv::write_metrics_json(cell.metrics, cell.label,
                            out_dir / (cell.label + "_metrics.json"));
    if (cell.failed) ++failed;
  }

  std::cout << "sweep: " << cells.size() << " cells, " << failed
            << " failed; ranking by average roll:\n";
  std::cout << std::left << std::setw(32) << "label" << std::right
            << std::setw(14) << "avg_roll_deg" << std::setw(14) << "max_roll_deg"
            << std::setw(16) << "time_to_wpt_s" << "\n";
  for (const usv::SweepCell* cell : usv::sweep_ranking(cells)) {
    std::cout << std::left << std::setw(32) << cell->label << std::right
              << std::fixed << std::setprecision(2) << std::setw(14)
              << cell->metrics.avg_roll_deg << std::setw(14)
              << cell->metrics.max_roll_deg;
    if (cell->failed) {
      std::cout << std::setw(16) << "FAILED";
    } else if (cell->metrics.time_to_waypoint) {
      std::cout << std::setw(16) << *cell->metrics.time_to_waypoint;
    } else {
      std::cout << std::setw(16) << "not reached";
    }
    std::cout << "\n";
    std::cout.unsetf(std::ios::fixed);
  }
  return failed == cells.size() ? kExitRuntime : kExitOk;
}

int cmd_compare(const std::vector<std::string>& files) {
  std::vector<std::pair<std::string, usv::Metrics>> results;
  for (const std::string& f : files) {
    usv::Metrics m = usv::read_metrics_json(f);
    results.emplace_back(m.label, std::move(m));
  }
  const auto rows = usv::compare_runs(results, results.front().first);
  usv::print_comparison(rows, std::cout);
  return kExitOk;
}

int cmd_table3(const std::string& scenario_dir, const GlobalOpts& g) {
  // Fixed ordering; the Direct run is the comparison baseline.
  const std::vector<std::pair<std::string, std::string>> entries = {
      {"Direct", "direct.scenario"},     {"Indirect", "indirect.scenario"},
      {"Low Roll", "low_roll.scenario"}, {"Low Q", "low_q.scenario"},
      {"Low Tack", "low_tack.scenario"}, {"Balanced", "balanced.scenario"},
  };
  std::vector<std::pair<std::string, usv::Metrics>> results;
  bool any_abort = false;
  for (const auto& [label, file] : entries) {
    const fs::path path = fs::path(scenario_dir) / file;
    if (!fs::exists(path)) {
      throw usv::ConfigError("table3: missing scenario file '" + path.string() +
                             "'");
    }
    RunOutput out = run_one(path, g);
    out.metrics.label = label;
    any_abort = any_abort || out.metrics.aborted;
    if (!g.quiet) print_metrics_line(out.metrics);
    results.emplace_back(label, std::move(out.metrics));
  }
  const auto rows = usv::compare_runs(results, "Direct");
  usv::print_comparison(rows, std::cout);
  return any_abort ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop roll-aware NMPC simulator for a twin-thruster USV"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--out-dir", g.out_dir, "Output directory (overrides scenario/[output])");
  app.add_option("--parallel", g.parallel, "Worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed (reserved; runs are deterministic)");
  app.add_flag("--quiet", g.quiet, "Suppress warnings and per-run chatter");

  std::string scenario_file, sweep_file;
  std::string scenarios_dir = "scenarios";
  std::vector<std::string> metrics_files;

  CLI::App* run = app.add_subcommand("run", "Run one scenario closed-loop");
  run->fallthrough();
  run->add_option("scenario", scenario_file, "Scenario file")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Run a cross-product sweep");
  sweep->fallthrough();
  sweep->add_option("spec", sweep_file, "Sweep spec file")->required();

  CLI::App* compare =
      app.add_subcommand("compare", "Compare stored metrics JSON files");
  compare->fallthrough();
  compare
      ->add_option("files", metrics_files,
                   "Baseline metrics JSON followed by candidates")
      ->required()
      ->expected(-2);

  CLI::App* table3 = app.add_subcommand(
      "table3", "Run the six bundled reference scenarios and compare");
  table3->fallthrough();
  table3->add_option("--scenarios-dir", scenarios_dir,
                     "Directory holding the bundled scenario files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  usv::log::set_quiet(g.quiet);

  try {
    if (run->parsed()) return cmd_run(scenario_file, g);
    if (sweep->parsed()) return cmd_sweep(sweep_file, g);
    if (compare->parsed()) return cmd_compare(metrics_files);
    if (table3->parsed()) return cmd_table3(scenarios_dir, g);
  } catch (const usv::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}
