// Core state types for the 6-DOF vessel: world-frame pose, body-frame
// velocity, generalized forces, and the two-channel thruster input.
// Frames are NED (north-east-down) for both world and body axes.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace usv {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;

// Wrap an angle to (-pi, pi].
inline double wrap_pi(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

// World-frame position and ZYX Euler attitude. psi is kept in (-pi, pi].
struct Pose {
  double x = 0.0;      // north (m)
  double y = 0.0;      // east (m)
  double z = 0.0;      // down (m)
  double phi = 0.0;    // roll (rad)
  double theta = 0.0;  // pitch (rad)
  double psi = 0.0;    // yaw (rad)

  Vec6 vec() const {
    Vec6 v;
    v << x, y, z, phi, theta, psi;
    return v;
  }
  static Pose from_vec(const Vec6& v) {
    return Pose{v[0], v[1], v[2], v[3], v[4], v[5]};
  }
};

// Body-frame linear and angular velocity.
struct Twist {
  double u = 0.0;  // surge (m/s)
  double v = 0.0;  // sway (m/s)
  double w = 0.0;  // heave (m/s)
  double p = 0.0;  // roll rate (rad/s)
  double q = 0.0;  // pitch rate (rad/s)
  double r = 0.0;  // yaw rate (rad/s)

  Vec6 vec() const {
    Vec6 v6;
    v6 << u, v, w, p, q, r;
    return v6;
  }
  static Twist from_vec(const Vec6& v6) {
    return Twist{v6[0], v6[1], v6[2], v6[3], v6[4], v6[5]};
  }
};

// Body-frame force/moment 6-vector.
struct GeneralizedForce {
  double X = 0.0;  // surge force (N)
  double Y = 0.0;  // sway force (N)
  double Z = 0.0;  // heave force (N)
  double K = 0.0;  // roll moment (N m)
  double M = 0.0;  // pitch moment (N m)
  double N = 0.0;  // yaw moment (N m)

  Vec6 vec() const {
    Vec6 v;
    v << X, Y, Z, K, M, N;
    return v;
  }
  static GeneralizedForce from_vec(const Vec6& v) {
    return GeneralizedForce{v[0], v[1], v[2], v[3], v[4], v[5]};
  }
};

// The two controllable channels of an under-actuated twin-thruster vessel:
// net surge force and net yaw moment.
struct ControlInput {
  double tau_X = 0.0;  // surge force (N)
  double tau_N = 0.0;  // yaw moment (N m)
};

inline Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return s;
}

}  // namespace usv
