#include "usv/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace usv {

namespace {
constexpr const char* kCsvHeader =
    "t,x,y,z,phi,theta,psi,u,v,w,p,q,r,tau_X,tau_N,alpha,stage_cost,"
    "solve_time,solver_converged";
}

void write_trajectory_csv(const TrajectoryRecord& traj,
                          const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw Error("cannot write '" + path.string() + "'");
  std::fputs(kCsvHeader, f);
  std::fputc('\n', f);
  for (const TrajectoryRow& r : traj.rows) {
    std::fprintf(
        f,
        "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
        "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
        r.t, r.eta.x, r.eta.y, r.eta.z, r.eta.phi, r.eta.theta, r.eta.psi,
        r.nu.u, r.nu.v, r.nu.w, r.nu.p, r.nu.q, r.nu.r, r.applied.tau_X,
        r.applied.tau_N, r.alpha, r.stage_cost, r.solve_time,
        r.solver_converged ? 1 : 0);
  }
  if (std::fclose(f) != 0) throw Error("I/O error closing '" + path.string() + "'");
}

TrajectoryRecord read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  if (line != kCsvHeader) throw Error(path.string() + ": unexpected CSV header");

  TrajectoryRecord rec;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    if (v.size() != 19)
      throw Error(path.string() + ":" + std::to_string(lineno) +
                  ": expected 19 columns, got " + std::to_string(v.size()));
    TrajectoryRow r;
    r.t = v[0];
    r.eta = Pose::from_vec((Vec6() << v[1], v[2], v[3], v[4], v[5], v[6]).finished());
    r.nu = Twist::from_vec((Vec6() << v[7], v[8], v[9], v[10], v[11], v[12]).finished());
    r.applied = ControlInput{v[13], v[14]};
    r.alpha = v[15];
    r.stage_cost = v[16];
    r.solve_time = v[17];
    r.solver_converged = v[18] != 0.0;
    rec.rows.push_back(r);
  }
  return rec;
}

void write_metrics_json(const Metrics& metrics, const std::string& label,
                        const std::filesystem::path& path) {
  nlohmann::json j;
  j["label"] = label;
  j["avg_roll_deg"] = metrics.avg_roll_deg;
  j["max_roll_deg"] = metrics.max_roll_deg;
  if (metrics.time_to_waypoint) {
    j["time_to_waypoint_s"] = *metrics.time_to_waypoint;
  } else {
    j["time_to_waypoint_s"] = nullptr;
  }
  j["mean_solve_time_s"] = metrics.mean_solve_time;
  j["max_solve_time_s"] = metrics.max_solve_time;
  j["reached_waypoint"] = metrics.reached_waypoint;
  if (metrics.aborted) {
    j["aborted"] = true;
    j["abort_reason"] = metrics.abort_reason;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
  if (!out) throw Error("I/O error writing '" + path.string() + "'");
}

Metrics read_metrics_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  Metrics m;
  m.label = j.at("label").get<std::string>();
  m.avg_roll_deg = j.at("avg_roll_deg").get<double>();
  m.max_roll_deg = j.at("max_roll_deg").get<double>();
  if (!j.at("time_to_waypoint_s").is_null()) {
    m.time_to_waypoint = j.at("time_to_waypoint_s").get<double>();
  }
  m.mean_solve_time = j.at("mean_solve_time_s").get<double>();
  m.max_solve_time = j.at("max_solve_time_s").get<double>();
  m.reached_waypoint = j.at("reached_waypoint").get<bool>();
  m.aborted = j.value("aborted", false);
  m.abort_reason = j.value("abort_reason", "");
  return m;
}

void print_comparison(const std::vector<ComparisonRow>& rows, std::ostream& os) {
  os << std::left << std::setw(12) << "label" << std::right << std::setw(14)
     << "avg_roll_deg" << std::setw(14) << "max_roll_deg" << std::setw(16)
     << "time_to_wpt_s" << std::setw(14) << "avg_roll_%" << std::setw(14)
     << "max_roll_%" << "\n";
  for (const ComparisonRow& r : rows) {
    os << std::left << std::setw(12) << r.label << std::right << std::fixed
       << std::setprecision(2) << std::setw(14) << r.metrics.avg_roll_deg
       << std::setw(14) << r.metrics.max_roll_deg;
    if (r.metrics.aborted) {
      os << std::setw(16) << "aborted";
    } else if (r.metrics.time_to_waypoint) {
      os << std::setw(16) << *r.metrics.time_to_waypoint;
    } else {
      os << std::setw(16) << "not reached";
    }
    auto pct = [&](const std::optional<double>& v) {
      if (r.is_baseline) {
        os << std::setw(14) << "baseline";
      } else if (v) {
        std::ostringstream tmp;
        tmp << std::showpos << std::fixed << std::setprecision(1) << *v;
        os << std::setw(14) << tmp.str();
      } else {
        os << std::setw(14) << "-";
      }
    };
    pct(r.avg_roll_change_pct);
    pct(r.max_roll_change_pct);
    os << "\n";
    os.unsetf(std::ios::fixed);
  }
}

}  // namespace usv
