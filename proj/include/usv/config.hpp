// Scenario and parameter file ingestion. Files are sectioned key = value
// text ([vessel], [wave], [nmpc], [sim], [output]); unknown sections or keys
// are rejected by name, and every loaded object is re-validated against the
// module invariants before it escapes.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "usv/harness.hpp"

namespace usv {

// Fully validated scenario; defaults are applied only where documented in
// the shipped file comments (g, rho, P, T, W, u_min, tolerances, arrival
// radius, t_max, substeps, output settings).
Scenario load_scenario(const std::filesystem::path& path);

// Stand-alone vessel dataset ([vessel] section only).
VesselParams load_vessel_params(const std::filesystem::path& path);

struct SweepSpec {
  Scenario base;
  std::filesystem::path base_path;
  // Axis value lists; an absent axis keeps the base scenario's value.
  std::vector<double> Q, R, S, H_w, T_w, lambda;
  std::vector<int> P;
  int parallel = 1;
  int max_cells = 512;

  size_t cell_count() const;
};

SweepSpec load_sweep(const std::filesystem::path& path);

namespace detail {
// (output directory, formats) from a scenario file's [output] section;
// empty directory means "not set".
std::pair<std::string, std::string> output_settings(
    const std::filesystem::path& path);
}  // namespace detail

}  // namespace usv
