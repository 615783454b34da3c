// Single-sinusoid wave field: surface elevation along world y, its spatial
// slope, the local wave angle, and the slope-induced lateral buoyancy force.
// The field is invariant along world x (wave fronts parallel to the x-axis).
#pragma once

#include <string>
#include <vector>

#include "usv/errors.hpp"

namespace usv {

struct WaveParams {
  double H_w = 0.0;     // wave height, trough to crest (m)
  double lambda = 1.0;  // wavelength (m)
  double T_w = 1.0;     // period (s)

  // Flips the sign of the temporal phase term, reversing the propagation
  // direction of the crests.
  bool flip_time_sign = false;

  // Throws ConfigError on hard violations; appends warning text (steepness
  // above the 1/7 breaking limit) without rejecting.
  void validate(std::vector<std::string>* warnings = nullptr) const;

  double phase(double y, double t) const;
};

// (H_w/2) sin(2 pi y / lambda + 2 pi t / T_w), metres.
double elevation(const WaveParams& wave, double y, double t);

// d(elevation)/dy = H_w (pi/lambda) cos(phase), dimensionless.
double slope(const WaveParams& wave, double y, double t);

// alpha = arctan(slope), radians.
double wave_angle(const WaveParams& wave, double y, double t);

// Signed lateral force F_w = (m g / 2) sin(2 alpha), newtons. Positive alpha
// pushes along world +y.
double lateral_force_magnitude(double alpha, double m, double g);

}  // namespace usv
