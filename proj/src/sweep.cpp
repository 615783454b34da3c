#include "usv/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "usv/log.hpp"

namespace usv {

namespace {

std::string format_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
  struct Axis {
    const char* name;
    std::vector<double> values;
  };
  std::vector<Axis> axes;
  auto add_axis = [&](const char* name, const std::vector<double>& vals) {
    if (!vals.empty()) axes.push_back({name, vals});
  };
  add_axis("Q", spec.Q);
  add_axis("R", spec.R);
  add_axis("S", spec.S);
  add_axis("H_w", spec.H_w);
  add_axis("T_w", spec.T_w);
  add_axis("lambda", spec.lambda);
  if (!spec.P.empty()) {
    std::vector<double> pv(spec.P.begin(), spec.P.end());
    axes.push_back({"P", pv});
  }

  size_t n_cells = 1;
  for (const Axis& a : axes) n_cells *= a.values.size();

  std::vector<SweepCell> cells(n_cells);
  for (size_t idx = 0; idx < n_cells; ++idx) {
    SweepCell& cell = cells[idx];
    cell.scenario = spec.base;
    std::ostringstream label;
    label << spec.base.label;
    size_t rem = idx;
    for (const Axis& a : axes) {
      const double v = a.values[rem % a.values.size()];
      rem /= a.values.size();
      cell.axis_values[a.name] = v;
      label << "_" << a.name << format_value(v);
      const std::string name = a.name;
      if (name == "Q") cell.scenario.weights.Q = v;
      else if (name == "R") cell.scenario.weights.R = v;
      else if (name == "S") cell.scenario.weights.S = v;
      else if (name == "H_w") cell.scenario.wave.H_w = v;
      else if (name == "T_w") cell.scenario.wave.T_w = v;
      else if (name == "lambda") cell.scenario.wave.lambda = v;
      else if (name == "P") cell.scenario.nmpc.P = static_cast<int>(v);
    }
    cell.label = label.str();
    cell.scenario.label = cell.label;
  }

  const int n_threads =
      std::max(1, std::min<int>(spec.parallel, static_cast<int>(n_cells)));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      SweepCell& cell = cells[idx];
      try {
        auto [record, metrics] = run_closed_loop(cell.scenario);
        cell.metrics = std::move(metrics);
        cell.failed = cell.metrics.aborted;
        cell.error = cell.metrics.abort_reason;
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
        cell.metrics.label = cell.label;
        cell.metrics.aborted = true;
        cell.metrics.abort_reason = cell.error;
        log::warn("sweep cell '" + cell.label + "' failed: " + cell.error);
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return cells;
}

std::vector<const SweepCell*> sweep_ranking(const std::vector<SweepCell>& cells) {
  std::vector<const SweepCell*> order;
  order.reserve(cells.size());
  for (const SweepCell& c : cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(),
                   [](const SweepCell* a, const SweepCell* b) {
                     if (a->failed != b->failed) return !a->failed;
                     return a->metrics.avg_roll_deg < b->metrics.avg_roll_deg;
                   });
  return order;
}

}  // namespace usv
