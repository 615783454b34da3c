#pragma once

#include <stdexcept>
#include <string>

namespace usv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Euler kinematics blow up near |theta| = pi/2; the simulation refuses to
// continue instead of producing NaNs.
struct SingularAttitudeError : Error {
  using Error::Error;
};

// Heading to a waypoint is undefined when standing on it.
struct DegeneratePositionError : Error {
  using Error::Error;
};

// The NLP solver could not produce a feasible point even after restoration.
struct SolverError : Error {
  using Error::Error;
};

// Scenario/parameter file problems: parse errors and invariant violations.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace usv
