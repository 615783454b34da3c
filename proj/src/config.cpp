#include "usv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "usv/log.hpp"

namespace usv {

namespace {

struct IniFile {
  // section -> key -> (value, line number)
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>> data;
  std::string name;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

IniFile parse_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  IniFile ini;
  ini.name = path.string();
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(ini.name + ":" + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.data[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(ini.name + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(ini.name + ":" + std::to_string(lineno) +
                        ": key '" + key + "' outside any [section]");
    if (ini.data[section].count(key))
      throw ConfigError(ini.name + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    ini.data[section][key] = {value, lineno};
  }
  return ini;
}

// Tracks which keys were consumed so leftovers can be rejected by name.
class SectionReader {
 public:
  SectionReader(const IniFile& ini, const std::string& section, bool required)
      : ini_(ini), section_(section) {
    const auto it = ini.data.find(section);
    if (it == ini.data.end()) {
      if (required)
        throw ConfigError(ini.name + ": missing required section [" + section + "]");
      present_ = false;
    } else {
      present_ = true;
    }
  }

  bool present() const { return present_; }

  bool has(const std::string& key) const {
    if (!present_) return false;
    return ini_.data.at(section_).count(key) > 0;
  }

  std::string raw(const std::string& key) {
    used_.insert(key);
    const auto& entry = ini_.data.at(section_).at(key);
    return entry.first;
  }

  double number(const std::string& key) {
    const std::string v = raw(key);
    try {
      size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError(ini_.name + ": [" + section_ + "] " + key +
                        ": cannot parse number from '" + v + "'");
    }
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) {
    const double x = number(key);
    if (x != std::floor(x))
      throw ConfigError(ini_.name + ": [" + section_ + "] " + key +
                        " must be an integer");
    return static_cast<int>(x);
  }

  int integer_or(const std::string& key, int fallback) {
    return has(key) ? integer(key) : fallback;
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = raw(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(ini_.name + ": [" + section_ + "] " + key +
                      " must be true or false");
  }

  std::vector<double> numbers(const std::string& key, size_t expected = 0) {
    const std::string v = raw(key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        size_t pos = 0;
        out.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError(ini_.name + ": [" + section_ + "] " + key +
                          ": cannot parse number from '" + item + "'");
      }
    }
    if (expected != 0 && out.size() != expected) {
      throw ConfigError(ini_.name + ": [" + section_ + "] " + key + " needs " +
                        std::to_string(expected) + " comma-separated values");
    }
    return out;
  }

  std::string require_string(const std::string& key) {
    if (!has(key))
      throw ConfigError(ini_.name + ": [" + section_ + "] missing required key '" +
                        key + "'");
    return raw(key);
  }

  double require_number(const std::string& key) {
    if (!has(key))
      throw ConfigError(ini_.name + ": [" + section_ + "] missing required key '" +
                        key + "'");
    return number(key);
  }

  std::vector<double> require_numbers(const std::string& key, size_t expected) {
    if (!has(key))
      throw ConfigError(ini_.name + ": [" + section_ + "] missing required key '" +
                        key + "'");
    return numbers(key, expected);
  }

  void finish() {
    if (!present_) return;
    for (const auto& [key, value] : ini_.data.at(section_)) {
      if (!used_.count(key)) {
        throw ConfigError(ini_.name + ":" + std::to_string(value.second) +
                          ": unknown key '" + key + "' in [" + section_ + "]");
      }
    }
  }

 private:
  const IniFile& ini_;
  std::string section_;
  bool present_ = false;
  std::set<std::string> used_;
};

void reject_unknown_sections(const IniFile& ini,
                             const std::set<std::string>& known) {
  for (const auto& [section, keys] : ini.data) {
    if (!known.count(section)) {
      throw ConfigError(ini.name + ": unknown section [" + section + "]");
    }
  }
}

VesselParams read_vessel_section(SectionReader& r) {
  VesselParams p;
  p.m = r.require_number("m");
  p.g = r.number_or("g", 9.81);
  p.rho = r.number_or("rho", 1025.0);
  const auto rg = r.require_numbers("r_g", 3);
  p.r_g = Vec3(rg[0], rg[1], rg[2]);
  const auto ib = r.require_numbers("I_b", 9);
  p.I_b << ib[0], ib[1], ib[2], ib[3], ib[4], ib[5], ib[6], ib[7], ib[8];
  p.X_udot = r.require_number("X_udot");
  p.Y_vdot = r.require_number("Y_vdot");
  p.Z_wdot = r.require_number("Z_wdot");
  p.K_pdot = r.require_number("K_pdot");
  p.M_qdot = r.require_number("M_qdot");
  p.N_rdot = r.require_number("N_rdot");
  const auto dl = r.require_numbers("d_lin", 6);
  const auto dq = r.require_numbers("d_quad", 6);
  for (int i = 0; i < 6; ++i) {
    p.d_lin[i] = dl[i];
    p.d_quad[i] = dq[i];
  }
  p.displaced_volume = r.require_number("displaced_volume");
  p.GM_T = r.require_number("GM_T");
  p.GM_L = r.require_number("GM_L");
  p.heave_stiffness = r.require_number("heave_stiffness");
  p.tau_X_max = r.require_number("tau_X_max");
  p.tau_N_max = r.require_number("tau_N_max");
  return p;
}

}  // namespace

VesselParams load_vessel_params(const std::filesystem::path& path) {
  const IniFile ini = parse_ini(path);
  reject_unknown_sections(ini, {"vessel"});
  SectionReader r(ini, "vessel", true);
  VesselParams p = read_vessel_section(r);
  r.finish();
  p.validate();
  return p;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const IniFile ini = parse_ini(path);
  reject_unknown_sections(ini, {"vessel", "wave", "nmpc", "sim", "output"});

  Scenario s;
  s.label = path.stem().string();

  {
    SectionReader vessel(ini, "vessel", true);
    if (vessel.has("params_file")) {
      const std::filesystem::path ref = vessel.raw("params_file");
      const auto resolved = ref.is_absolute() ? ref : path.parent_path() / ref;
      s.vessel = load_vessel_params(resolved);
    } else {
      s.vessel = read_vessel_section(vessel);
    }
    vessel.finish();
  }

  {
    SectionReader wave(ini, "wave", true);
    s.wave.H_w = wave.require_number("H_w");
    s.wave.lambda = wave.require_number("lambda");
    s.wave.T_w = wave.require_number("T_w");
    s.wave.flip_time_sign = wave.boolean_or("flip_time_sign", false);
    s.wave_force_sign = wave.number_or("force_sign", 1.0);
    wave.finish();
  }

  {
    SectionReader nmpc(ini, "nmpc", true);
    s.weights.Q = nmpc.require_number("Q");
    s.weights.R = nmpc.require_number("R");
    s.weights.S = nmpc.require_number("S");
    if (nmpc.has("W")) {
      const auto w = nmpc.numbers("W", 4);
      s.weights.W << w[0], w[1], w[2], w[3];
    }
    s.nmpc.P = nmpc.integer_or("P", 40);
    s.nmpc.T = nmpc.number_or("T", 0.1);
    s.nmpc.u_min = nmpc.number_or("u_min", 0.5);
    s.nmpc.u_min_enabled = nmpc.boolean_or("u_min_enabled", true);
    s.nmpc.max_iterations = nmpc.integer_or("max_iterations", 160);
    s.nmpc.kkt_tolerance = nmpc.number_or("kkt_tolerance", 1e-5);
    s.nmpc.constraint_tolerance = nmpc.number_or("constraint_tolerance", 1e-6);
    s.nmpc.solve_time_budget = nmpc.number_or("solve_time_budget", 0.0);
    nmpc.finish();
  }

  {
    SectionReader sim(ini, "sim", true);
    const auto wp = sim.require_numbers("waypoint", 2);
    s.nmpc.waypoint = Vec2(wp[0], wp[1]);
    const auto pose = sim.require_numbers("initial_pose", 6);
    s.initial_pose = Pose::from_vec(
        (Vec6() << pose[0], pose[1], pose[2], pose[3], pose[4], pose[5]).finished());
    const auto twist = sim.require_numbers("initial_twist", 6);
    s.initial_twist = Twist::from_vec(
        (Vec6() << twist[0], twist[1], twist[2], twist[3], twist[4], twist[5])
            .finished());
    s.arrival_radius = sim.number_or("arrival_radius", 2.0);
    s.t_max = sim.number_or("t_max", 180.0);
    s.plant_substeps = sim.integer_or("substeps", 5);
    s.nmpc.substeps = s.plant_substeps;
    s.seed = static_cast<unsigned>(sim.integer_or("seed", 0));
    sim.finish();
  }

  {
    SectionReader output(ini, "output", false);
    if (output.present()) {
      if (output.has("directory")) output.raw("directory");
      if (output.has("formats")) output.raw("formats");
      output.finish();
    }
  }

  std::vector<std::string> warnings;
  s.wave.validate(&warnings);
  for (const auto& w : warnings) log::warn(path.string() + ": " + w);
  s.validate();
  return s;
}

// Output settings live in the scenario file but are only needed by the CLI;
// re-read them without re-validating the whole scenario.
namespace detail {
std::pair<std::string, std::string> output_settings(
    const std::filesystem::path& path) {
  const IniFile ini = parse_ini(path);
  std::string dir, formats = "csv,json";
  const auto it = ini.data.find("output");
  if (it != ini.data.end()) {
    const auto d = it->second.find("directory");
    if (d != it->second.end()) dir = d->second.first;
    const auto f = it->second.find("formats");
    if (f != it->second.end()) formats = f->second.first;
  }
  return {dir, formats};
}
}  // namespace detail

size_t SweepSpec::cell_count() const {
  auto dim = [](size_t n) { return n == 0 ? size_t{1} : n; };
  return dim(Q.size()) * dim(R.size()) * dim(S.size()) * dim(H_w.size()) *
         dim(T_w.size()) * dim(lambda.size()) * dim(P.size());
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  const IniFile ini = parse_ini(path);
  reject_unknown_sections(ini, {"sweep"});
  SectionReader r(ini, "sweep", true);

  SweepSpec spec;
  const std::filesystem::path base_ref = r.require_string("base");
  spec.base_path =
      base_ref.is_absolute() ? base_ref : path.parent_path() / base_ref;
  spec.base = load_scenario(spec.base_path);
  if (r.has("Q")) spec.Q = r.numbers("Q");
  if (r.has("R")) spec.R = r.numbers("R");
  if (r.has("S")) spec.S = r.numbers("S");
  if (r.has("H_w")) spec.H_w = r.numbers("H_w");
  if (r.has("T_w")) spec.T_w = r.numbers("T_w");
  if (r.has("lambda")) spec.lambda = r.numbers("lambda");
  if (r.has("P")) {
    for (double v : r.numbers("P")) {
      if (v != std::floor(v) || v < 1)
        throw ConfigError(path.string() + ": [sweep] P values must be integers >= 1");
      spec.P.push_back(static_cast<int>(v));
    }
  }
  spec.parallel = r.integer_or("parallel", 1);
  spec.max_cells = r.integer_or("max_cells", 512);
  r.finish();

  if (spec.parallel < 1)
    throw ConfigError(path.string() + ": [sweep] parallel must be >= 1");
  if (spec.max_cells < 1)
    throw ConfigError(path.string() + ": [sweep] max_cells must be >= 1");
  if (spec.cell_count() > static_cast<size_t>(spec.max_cells)) {
    throw ConfigError(path.string() + ": sweep cross-product has " +
                      std::to_string(spec.cell_count()) +
                      " cells, exceeding the cap of " +
                      std::to_string(spec.max_cells));
  }
  return spec;
}

}  // namespace usv
