#include "usv/vessel.hpp"

#include <cmath>
#include <string>

namespace usv {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("vessel params: " + what);
}

Mat3 rotation_zyx(double phi, double theta, double psi) {
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double cpsi = std::cos(psi), spsi = std::sin(psi);
  Mat3 R;
  R << cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth,
       spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi,
       -sth, cth * sphi, cth * cphi;
  return R;
}

Mat3 euler_rate_map(double phi, double theta) {
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), tth = std::tan(theta);
  Mat3 T;
  T << 1.0, sphi * tth, cphi * tth,
       0.0, cphi, -sphi,
       0.0, sphi / cth, cphi / cth;
  return T;
}

}  // namespace

void VesselParams::validate() const {
  require(m > 0.0, "m must be > 0");
  require(g > 0.0, "g must be > 0");
  require(rho > 0.0, "rho must be > 0");
  require((I_b - I_b.transpose()).cwiseAbs().maxCoeff() < 1e-9,
          "I_b must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> ib(I_b);
  require(ib.eigenvalues().minCoeff() > 0.0, "I_b must be positive definite");
  require((d_lin.array() >= 0.0).all(), "linear damping must be >= 0");
  require((d_quad.array() >= 0.0).all(), "quadratic damping must be >= 0");
  require(displaced_volume > 0.0, "displaced_volume must be > 0");
  require(GM_T > 0.0, "GM_T must be > 0");
  require(GM_L > 0.0, "GM_L must be > 0");
  require(heave_stiffness > 0.0, "heave_stiffness must be > 0");
  require(tau_X_max > 0.0, "tau_X_max must be > 0");
  require(tau_N_max > 0.0, "tau_N_max must be > 0");

  Mat6 M = mass_matrix(*this);
  require((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-9,
          "assembled M must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat6> es(M);
  require(es.eigenvalues().minCoeff() > 0.0,
          "assembled M must be positive definite");
}

Mat6 rotation_matrix(double phi, double theta, double psi) {
  if (std::abs(theta) >= kThetaGuard) {
    throw SingularAttitudeError("attitude singular: |theta| = " +
                                std::to_string(std::abs(theta)) +
                                " rad exceeds the pi/2 guard");
  }
  Mat6 J = Mat6::Zero();
  J.topLeftCorner<3, 3>() = rotation_zyx(phi, theta, psi);
  J.bottomRightCorner<3, 3>() = euler_rate_map(phi, theta);
  return J;
}

Mat6 mass_matrix(const VesselParams& p) {
  // Rigid body about the body origin, CG offset by r_g.
  Mat3 S = skew(p.r_g);
  Mat6 M_rb = Mat6::Zero();
  M_rb.topLeftCorner<3, 3>() = p.m * Mat3::Identity();
  M_rb.topRightCorner<3, 3>() = -p.m * S;
  M_rb.bottomLeftCorner<3, 3>() = p.m * S;
  M_rb.bottomRightCorner<3, 3>() = p.I_b - p.m * S * S;

  Vec6 ma;
  ma << -p.X_udot, -p.Y_vdot, -p.Z_wdot, -p.K_pdot, -p.M_qdot, -p.N_rdot;
  return M_rb + Mat6(ma.asDiagonal());
}

Mat6 coriolis_from_mass(const Mat6& M, const Twist& nu) {
  const Vec6 v = nu.vec();
  const Vec3 a = M.topRows<3>() * v;
  const Vec3 b = M.bottomRows<3>() * v;
  Mat6 C = Mat6::Zero();
  C.topRightCorner<3, 3>() = -skew(a);
  C.bottomLeftCorner<3, 3>() = -skew(a);
  C.bottomRightCorner<3, 3>() = -skew(b);
  return C;
}

Mat6 coriolis_matrix(const VesselParams& params, const Twist& nu) {
  return coriolis_from_mass(mass_matrix(params), nu);
}

Mat6 damping_matrix(const VesselParams& p, const Twist& nu) {
  const Vec6 v = nu.vec();
  Vec6 d = p.d_lin + p.d_quad.cwiseProduct(v.cwiseAbs());
  return Mat6(d.asDiagonal());
}

GeneralizedForce restoring_force(const VesselParams& p, double phi_eff,
                                 double theta_eff, double z) {
  GeneralizedForce f;
  f.Z = -p.heave_stiffness * z;
  f.K = -p.roll_stiffness() * std::sin(phi_eff);
  f.M = -p.pitch_stiffness() * std::sin(theta_eff);
  return f;
}

VesselModel::VesselModel(const VesselParams& params) : params_(params) {
  params_.validate();
  M_ = mass_matrix(params_);
  M_inv_ = M_.inverse();
}

Vec6 VesselModel::coriolis_damping_load(const Vec6& v) const {
  const Vec3 nu1 = v.head<3>(), nu2 = v.tail<3>();
  const Vec3 a = M_.topRows<3>() * v;
  const Vec3 b = M_.bottomRows<3>() * v;
  // C(nu) nu with C = [0 -S(a); -S(a) -S(b)]: -S(a)x = x cross a.
  Vec6 load;
  load.head<3>() = nu2.cross(a);
  load.tail<3>() = nu1.cross(a) + nu2.cross(b);
  const Vec6 d = params_.d_lin + params_.d_quad.cwiseProduct(v.cwiseAbs());
  return load + d.cwiseProduct(v);
}

Twist VesselModel::dynamics(const Twist& nu, const GeneralizedForce& g_force,
                            const ControlInput& u_in,
                            const GeneralizedForce& tau_wave) const {
  Vec6 rhs = tau_wave.vec() + g_force.vec() - coriolis_damping_load(nu.vec());
  rhs[0] += u_in.tau_X;
  rhs[5] += u_in.tau_N;
  return Twist::from_vec(M_inv_ * rhs);
}

void euler_step(Pose& eta, Twist& nu, const Twist& nu_dot, double T) {
  const Mat6 J = rotation_matrix(eta.phi, eta.theta, eta.psi);
  const Vec6 eta_next = eta.vec() + T * (J * nu.vec());
  const Vec6 nu_next = nu.vec() + T * nu_dot.vec();
  eta = Pose::from_vec(eta_next);
  eta.psi = wrap_pi(eta.psi);
  nu = Twist::from_vec(nu_next);
}

}  // namespace usv
