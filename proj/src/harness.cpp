#include "usv/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "usv/log.hpp"

namespace usv {

void Scenario::validate() const {
  vessel.validate();
  wave.validate();
  weights.validate();
  nmpc.validate();
  if (arrival_radius <= 0.0) throw ConfigError("sim: arrival_radius must be > 0");
  if (t_max <= 0.0) throw ConfigError("sim: t_max must be > 0");
  if (plant_substeps < 1) throw ConfigError("sim: substeps must be >= 1");
  if (std::abs(std::abs(wave_force_sign) - 1.0) > 1e-12)
    throw ConfigError("wave: force_sign must be +1 or -1");
  if (std::abs(initial_pose.theta) >= kThetaGuard)
    throw ConfigError("sim: initial pitch outside the attitude guard");
}

std::pair<TrajectoryRecord, Metrics> run_closed_loop(const Scenario& scenario) {
  scenario.validate();
  const VesselModel model(scenario.vessel);
  NmpcSolver solver;

  const double T = scenario.nmpc.T;
  const long k_max = std::lround(scenario.t_max / T);

  TrajectoryRecord record;
  record.rows.reserve(static_cast<size_t>(k_max) + 1);

  Pose eta = scenario.initial_pose;
  Twist nu = scenario.initial_twist;
  NmpcSolution prev;
  bool have_prev = false;
  ControlInput last_applied{};

  CouplingOptions plant_opts;
  plant_opts.force_sign = scenario.wave_force_sign;
  plant_opts.plant_substeps = scenario.plant_substeps;

  bool aborted = false;
  std::string abort_reason;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * T;
    TrajectoryRow row;
    row.t = t;
    row.eta = eta;
    row.nu = nu;
    row.alpha = wave_angle(scenario.wave, eta.y, t);

    const double dist = distance_to_waypoint(eta, scenario.nmpc.waypoint);
    const bool arrived = dist <= scenario.arrival_radius;
    if (arrived || k >= k_max) {
      // Terminal row: no control is applied, so the rate term is zero.
      row.stage_cost = dist > 1e-6
                           ? stage_cost(eta, Vec2::Zero(), scenario.weights,
                                        scenario.nmpc.waypoint, scenario.vessel)
                           : 0.0;
      record.rows.push_back(row);
      break;
    }

    try {
      auto [u, sol] = solver.receding_horizon_step(
          eta, nu, scenario.wave, t, scenario.weights, scenario.nmpc, model,
          have_prev ? &prev : nullptr, scenario.wave_force_sign);
      prev = std::move(sol);
      have_prev = true;

      u.tau_X = std::clamp(u.tau_X, -scenario.vessel.tau_X_max,
                           scenario.vessel.tau_X_max);
      u.tau_N = std::clamp(u.tau_N, -scenario.vessel.tau_N_max,
                           scenario.vessel.tau_N_max);
      row.applied = u;
      row.solve_time = prev.solve_time;
      row.solver_converged = prev.converged;
      row.solver_iterations = prev.iterations;
      row.solver_kkt_residual = prev.kkt_residual;
      row.used_fallback = prev.used_fallback;
      const Vec2 rate((u.tau_X - last_applied.tau_X) / T,
                      (u.tau_N - last_applied.tau_N) / T);
      row.stage_cost = stage_cost(eta, rate, scenario.weights,
                                  scenario.nmpc.waypoint, scenario.vessel);
      record.rows.push_back(row);

      plant_step(eta, nu, u, scenario.wave, t, T, model, plant_opts);
      last_applied = u;
    } catch (const Error& err) {
      aborted = true;
      abort_reason = err.what();
      record.rows.push_back(row);
      log::warn("run '" + scenario.label + "' aborted at t=" + std::to_string(t) +
                ": " + abort_reason);
      break;
    }
  }

  Metrics m = compute_metrics(record, scenario);
  m.aborted = aborted;
  m.abort_reason = abort_reason;
  return {std::move(record), std::move(m)};
}

Metrics compute_metrics(const TrajectoryRecord& traj, const Scenario& scenario) {
  if (traj.rows.empty()) throw Error("compute_metrics: empty trajectory");
  Metrics m;
  m.label = scenario.label;

  double sum_abs_phi = 0.0, max_abs_phi = 0.0;
  double sum_solve = 0.0, max_solve = 0.0;
  int n_solves = 0;
  for (const TrajectoryRow& row : traj.rows) {
    const double a = std::abs(row.eta.phi);
    sum_abs_phi += a;
    max_abs_phi = std::max(max_abs_phi, a);
    if (row.solve_time > 0.0) {
      sum_solve += row.solve_time;
      max_solve = std::max(max_solve, row.solve_time);
      ++n_solves;
    }
    if (!m.time_to_waypoint &&
        distance_to_waypoint(row.eta, scenario.nmpc.waypoint) <=
            scenario.arrival_radius) {
      m.time_to_waypoint = row.t;
    }
  }
  m.avg_roll_deg = rad2deg(sum_abs_phi / traj.rows.size());
  m.max_roll_deg = rad2deg(max_abs_phi);
  m.reached_waypoint = m.time_to_waypoint.has_value();
  m.mean_solve_time = n_solves > 0 ? sum_solve / n_solves : 0.0;
  m.max_solve_time = max_solve;
  return m;
}

std::vector<ComparisonRow> compare_runs(
    const std::vector<std::pair<std::string, Metrics>>& results,
    const std::string& baseline) {
  if (results.size() < 2)
    throw ConfigError("compare: need at least two runs");
  const Metrics* base = nullptr;
  for (const auto& [label, m] : results) {
    if (label == baseline) base = &m;
  }
  if (!base) throw ConfigError("compare: baseline '" + baseline + "' not found");
  if (base->aborted)
    throw ConfigError("compare: baseline run '" + baseline + "' aborted");

  std::vector<ComparisonRow> rows;
  for (const auto& [label, m] : results) {
    ComparisonRow row;
    row.label = label;
    row.metrics = m;
    row.is_baseline = label == baseline;
    if (!m.aborted) {
      row.avg_roll_change_pct =
          100.0 * (m.avg_roll_deg - base->avg_roll_deg) / base->avg_roll_deg;
      row.max_roll_change_pct =
          100.0 * (m.max_roll_deg - base->max_roll_deg) / base->max_roll_deg;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace usv
