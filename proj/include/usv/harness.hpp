// Closed-loop simulation: controller and plant stepped at the control
// period, trajectory logging, arrival/timeout termination, and the roll/time
// metrics used to compare weight configurations.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usv/nmpc.hpp"

namespace usv {

struct Scenario {
  std::string label = "scenario";
  VesselParams vessel;
  WaveParams wave;
  CostWeights weights;
  NmpcConfig nmpc;
  Pose initial_pose;
  Twist initial_twist;
  double arrival_radius = 2.0;  // m
  double t_max = 180.0;         // s
  double wave_force_sign = 1.0;
  int plant_substeps = 5;
  unsigned seed = 0;            // reserved; the core loop is deterministic

  void validate() const;
};

struct TrajectoryRow {
  double t = 0.0;
  Pose eta;
  Twist nu;
  ControlInput applied;
  double alpha = 0.0;       // wave angle at the vessel
  double stage_cost = 0.0;
  double solve_time = 0.0;  // s; 0 for rows without a solve
  bool solver_converged = true;
  int solver_iterations = 0;
  double solver_kkt_residual = 0.0;
  bool used_fallback = false;
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
};

struct Metrics {
  std::string label;
  double avg_roll_deg = 0.0;  // mean |phi|
  double max_roll_deg = 0.0;
  std::optional<double> time_to_waypoint;  // s; empty = not reached
  double mean_solve_time = 0.0;            // s
  double max_solve_time = 0.0;
  bool reached_waypoint = false;
  bool aborted = false;                    // run ended in an error
  std::string abort_reason;
};

// Runs the receding-horizon loop until arrival (planar distance <= radius)
// or t >= t_max. Deterministic. Singularity/solver errors abort the run with
// the partial log retained and an error marker in the metrics.
std::pair<TrajectoryRecord, Metrics> run_closed_loop(const Scenario& scenario);

// Metrics over a logged trajectory; throws on an empty record.
Metrics compute_metrics(const TrajectoryRecord& traj, const Scenario& scenario);

struct ComparisonRow {
  std::string label;
  Metrics metrics;
  bool is_baseline = false;
  std::optional<double> avg_roll_change_pct;  // vs baseline; empty for aborted
  std::optional<double> max_roll_change_pct;
};

// Percentage change of the roll metrics versus the run labelled `baseline`.
// Throws ConfigError when the baseline is missing or fewer than two runs are
// given. Aborted runs are excluded from comparison and flagged.
std::vector<ComparisonRow> compare_runs(
    const std::vector<std::pair<std::string, Metrics>>& results,
    const std::string& baseline);

}  // namespace usv
