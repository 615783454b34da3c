#include "usv/wave.hpp"

#include <cmath>

#include "usv/types.hpp"

namespace usv {

void WaveParams::validate(std::vector<std::string>* warnings) const {
  if (H_w < 0.0) throw ConfigError("wave: H_w must be >= 0");
  if (lambda <= 0.0) throw ConfigError("wave: lambda must be > 0");
  if (T_w <= 0.0) throw ConfigError("wave: T_w must be > 0");
  if (warnings && H_w / lambda >= 1.0 / 7.0) {
    warnings->push_back("wave steepness H_w/lambda = " +
                        std::to_string(H_w / lambda) +
                        " exceeds the 1/7 breaking limit");
  }
}

double WaveParams::phase(double y, double t) const {
  const double time_term = 2.0 * kPi * t / T_w;
  return 2.0 * kPi * y / lambda + (flip_time_sign ? -time_term : time_term);
}

double elevation(const WaveParams& wave, double y, double t) {
  return 0.5 * wave.H_w * std::sin(wave.phase(y, t));
}

double slope(const WaveParams& wave, double y, double t) {
  return wave.H_w * (kPi / wave.lambda) * std::cos(wave.phase(y, t));
}

double wave_angle(const WaveParams& wave, double y, double t) {
  return std::atan(slope(wave, y, t));
}

double lateral_force_magnitude(double alpha, double m, double g) {
  return 0.5 * m * g * std::sin(2.0 * alpha);
}

}  // namespace usv
