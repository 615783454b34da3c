// Cross-product weight/wave sweeps over a base scenario, run on a small
// thread pool. Cell results are independent of parallelism and ordering.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "usv/config.hpp"

namespace usv {

struct SweepCell {
  std::string label;
  std::map<std::string, double> axis_values;  // axis name -> value
  Scenario scenario;
  Metrics metrics;
  bool failed = false;
  std::string error;
};

// Runs every cell; per-cell failures are recorded and the sweep continues.
// Cells are returned in cross-product order regardless of parallelism.
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

// Aggregate view sorted by average roll (failed / not-reached cells last).
std::vector<const SweepCell*> sweep_ranking(const std::vector<SweepCell>& cells);

}  // namespace usv
