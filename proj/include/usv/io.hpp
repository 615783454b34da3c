// Flat-file result serialization: the 19-column trajectory CSV and the
// per-run metrics JSON, plus the text comparison table.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "usv/harness.hpp"

namespace usv {

// Columns, in order: t, x, y, z, phi, theta, psi, u, v, w, p, q, r, tau_X,
// tau_N, alpha, stage_cost, solve_time, solver_converged. Radians and SI
// units, 12 significant digits, '\n' line endings.
void write_trajectory_csv(const TrajectoryRecord& traj,
                          const std::filesystem::path& path);
TrajectoryRecord read_trajectory_csv(const std::filesystem::path& path);

// Keys: label, avg_roll_deg, max_roll_deg, time_to_waypoint_s (number or
// null), mean_solve_time_s, max_solve_time_s, reached_waypoint.
void write_metrics_json(const Metrics& metrics, const std::string& label,
                        const std::filesystem::path& path);
Metrics read_metrics_json(const std::filesystem::path& path);

void print_comparison(const std::vector<ComparisonRow>& rows, std::ostream& os);

}  // namespace usv
