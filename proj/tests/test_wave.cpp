#include "usv/wave.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "usv/types.hpp"

using namespace usv;

TEST_CASE("elevation at reference sea state") {
  const WaveParams w = test::reference_wave();
  CHECK(elevation(w, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(elevation(w, w.lambda / 4.0, 0.0) == doctest::Approx(0.875));
  CHECK(elevation(w, 0.0, w.T_w) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("slope matches the analytic gradient") {
  const WaveParams w = test::reference_wave();
  CHECK(slope(w, 0.0, 0.0) == doctest::Approx(w.H_w * kPi / w.lambda));
  CHECK(slope(w, 0.0, 0.0) == doctest::Approx(0.15707963).epsilon(1e-6));
  CHECK(slope(w, w.lambda / 4.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("slope equals central finite difference of elevation") {
  const WaveParams w = test::reference_wave();
  std::uniform_real_distribution<double> dy(-100.0, 100.0), dt(0.0, 60.0);
  const double h = 1e-4;
  for (int i = 0; i < 200; ++i) {
    const double y = dy(test::rng()), t = dt(test::rng());
    const double fd = (elevation(w, y + h, t) - elevation(w, y - h, t)) / (2 * h);
    const double s = slope(w, y, t);
    CHECK(std::abs(s - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("slope bounded by its amplitude") {
  const WaveParams w = test::reference_wave();
  std::uniform_real_distribution<double> dy(-200.0, 200.0), dt(0.0, 120.0);
  const double bound = w.H_w * kPi / w.lambda + 1e-12;
  for (int i = 0; i < 500; ++i) {
    CHECK(std::abs(slope(w, dy(test::rng()), dt(test::rng()))) <= bound);
  }
}

TEST_CASE("wave_angle is the arctangent of the slope") {
  const WaveParams w = test::reference_wave();
  CHECK(wave_angle(w, w.lambda / 4.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wave_angle(w, 0.0, 0.0) == doctest::Approx(0.15582).epsilon(1e-4));
  const double amax = std::atan(w.H_w * kPi / w.lambda);
  std::uniform_real_distribution<double> dy(-200.0, 200.0), dt(0.0, 120.0);
  for (int i = 0; i < 500; ++i) {
    CHECK(std::abs(wave_angle(w, dy(test::rng()), dt(test::rng()))) <= amax + 1e-12);
  }
}

TEST_CASE("elevation periodic in space and time") {
  const WaveParams w = test::reference_wave();
  std::uniform_real_distribution<double> dy(-50.0, 50.0), dt(0.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double y = dy(test::rng()), t = dt(test::rng());
    CHECK(elevation(w, y, t) == doctest::Approx(elevation(w, y + w.lambda, t)).epsilon(1e-9));
    CHECK(elevation(w, y, t) == doctest::Approx(elevation(w, y, t + w.T_w)).epsilon(1e-9));
  }
}

TEST_CASE("lateral force magnitude") {
  const double m = 80.0, g = 9.81;
  CHECK(lateral_force_magnitude(0.0, m, g) == doctest::Approx(0.0));
  CHECK(lateral_force_magnitude(kPi / 4.0, m, g) == doctest::Approx(m * g / 2.0));
  CHECK(lateral_force_magnitude(0.15582, m, g) ==
        doctest::Approx(0.30662 * m * g / 2.0).epsilon(1e-4));
  // Bounded by mg/2 everywhere.
  for (double a = -1.5; a <= 1.5; a += 0.01) {
    CHECK(std::abs(lateral_force_magnitude(a, m, g)) <= m * g / 2.0 + 1e-12);
  }
}

TEST_CASE("flat sea is identically zero") {
  WaveParams w = test::reference_wave();
  w.H_w = 0.0;
  std::uniform_real_distribution<double> dy(-200.0, 200.0), dt(0.0, 120.0);
  for (int i = 0; i < 200; ++i) {
    const double y = dy(test::rng()), t = dt(test::rng());
    CHECK(elevation(w, y, t) == 0.0);
    CHECK(slope(w, y, t) == 0.0);
    CHECK(wave_angle(w, y, t) == 0.0);
  }
}

TEST_CASE("wave validation") {
  WaveParams w = test::reference_wave();
  std::vector<std::string> warnings;
  w.validate(&warnings);
  CHECK(warnings.empty());

  w.H_w = 10.0;  // steepness 10/35 > 1/7
  warnings.clear();
  w.validate(&warnings);
  CHECK(warnings.size() == 1);

  w = test::reference_wave();
  w.lambda = -1.0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
  w = test::reference_wave();
  w.T_w = 0.0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}

TEST_CASE("flip_time_sign reverses crest propagation") {
  WaveParams w = test::reference_wave();
  const double e_fwd = elevation(w, 3.0, 1.0);
  w.flip_time_sign = true;
  const double e_rev = elevation(w, 3.0, -1.0);
  CHECK(e_fwd == doctest::Approx(e_rev));
}
