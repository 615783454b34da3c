#include "usv/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "usv/log.hpp"

namespace usv {

EffectiveAttitude effective_attitude(const Pose& eta, double alpha) {
  EffectiveAttitude beta;
  beta.phi_eff = eta.phi - alpha * std::cos(eta.psi);
  beta.theta_eff = eta.theta - alpha * std::sin(eta.psi);
  if (std::abs(beta.phi_eff) >= kPi / 2.0 || std::abs(beta.theta_eff) >= kThetaGuard) {
    throw SingularAttitudeError("wave-relative attitude outside the pi/2 guard");
  }
  return beta;
}

GeneralizedForce wave_force(double alpha, double psi, const VesselParams& params,
                            double force_sign) {
  const double F_w =
      force_sign * lateral_force_magnitude(alpha, params.m, params.g);
  GeneralizedForce f;
  f.X = F_w * std::sin(psi);
  f.Y = F_w * std::cos(psi);
  return f;
}

void model_step(Pose& eta, Twist& nu, const ControlInput& u_in,
                const WaveParams& wave, double t, double T,
                const VesselModel& model, double force_sign) {
  const double alpha = wave_angle(wave, eta.y, t);
  const EffectiveAttitude beta = effective_attitude(eta, alpha);
  const GeneralizedForce g_force =
      restoring_force(model.params(), beta.phi_eff, beta.theta_eff, eta.z);
  const GeneralizedForce tau_wave =
      wave_force(alpha, eta.psi, model.params(), force_sign);
  const Twist nu_dot = model.dynamics(nu, g_force, u_in, tau_wave);
  euler_step(eta, nu, nu_dot, T);
}

void plant_step(Pose& eta, Twist& nu, const ControlInput& u_in,
                const WaveParams& wave, double t, double T,
                const VesselModel& model, const CouplingOptions& opts) {
  ControlInput u = u_in;
  const double xmax = model.params().tau_X_max;
  const double nmax = model.params().tau_N_max;
  if (std::abs(u.tau_X) > xmax || std::abs(u.tau_N) > nmax) {
    log::warn("control input outside actuator box, clamping (tau_X=" +
              std::to_string(u.tau_X) + ", tau_N=" + std::to_string(u.tau_N) + ")");
    u.tau_X = std::clamp(u.tau_X, -xmax, xmax);
    u.tau_N = std::clamp(u.tau_N, -nmax, nmax);
  }
  const int n = std::max(1, opts.plant_substeps);
  const double dt = T / n;
  for (int j = 0; j < n; ++j) {
    model_step(eta, nu, u, wave, t + j * dt, dt, model, opts.force_sign);
  }
}

namespace {

struct ElementaryRotations {
  Mat3 Rx, Ry, Rz, dRx, dRy, dRz;
};

ElementaryRotations elementary(double phi, double theta, double psi) {
  const double cf = std::cos(phi), sf = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(psi), sp = std::sin(psi);
  ElementaryRotations e;
  e.Rx << 1, 0, 0, 0, cf, -sf, 0, sf, cf;
  e.dRx << 0, 0, 0, 0, -sf, -cf, 0, cf, -sf;
  e.Ry << ct, 0, st, 0, 1, 0, -st, 0, ct;
  e.dRy << -st, 0, ct, 0, 0, 0, -ct, 0, -st;
  e.Rz << cp, -sp, 0, sp, cp, 0, 0, 0, 1;
  e.dRz << -sp, -cp, 0, cp, -sp, 0, 0, 0, 0;
  return e;
}

}  // namespace

StepJacobian model_step_jacobian(const Pose& eta, const Twist& nu,
                                 const ControlInput& u_in, const WaveParams& wave,
                                 double t, double T, const VesselModel& model,
                                 double force_sign) {
  (void)u_in;  // dynamics are affine in the input
  const VesselParams& p = model.params();
  const Mat6& M = model.M();
  const Mat6& Minv = model.M_inv();

  const double sl = slope(wave, eta.y, t);
  const double alpha = std::atan(sl);
  const double dslope_dy =
      -wave.H_w * (kPi / wave.lambda) * (2.0 * kPi / wave.lambda) *
      std::sin(wave.phase(eta.y, t));
  const double dalpha_dy = dslope_dy / (1.0 + sl * sl);

  const double cpsi = std::cos(eta.psi), spsi = std::sin(eta.psi);
  const double phi_eff = eta.phi - alpha * cpsi;
  const double theta_eff = eta.theta - alpha * spsi;
  const double w44 = p.roll_stiffness();
  const double w55 = p.pitch_stiffness();

  // d(rhs)/d(eta): restoring + wave force columns (rows = force components).
  Eigen::Matrix<double, 6, 6> drhs_deta = Eigen::Matrix<double, 6, 6>::Zero();
  drhs_deta(2, 2) = -p.heave_stiffness;
  const double dK = -w44 * std::cos(phi_eff);
  const double dM = -w55 * std::cos(theta_eff);
  drhs_deta(3, 3) = dK;
  drhs_deta(4, 4) = dM;
  drhs_deta(3, 5) = dK * (alpha * spsi);
  drhs_deta(4, 5) = dM * (-alpha * cpsi);
  drhs_deta(3, 1) = dK * (-cpsi * dalpha_dy);
  drhs_deta(4, 1) = dM * (-spsi * dalpha_dy);

  const double F_w = force_sign * lateral_force_magnitude(alpha, p.m, p.g);
  const double dF_dalpha = force_sign * p.m * p.g * std::cos(2.0 * alpha);
  drhs_deta(0, 5) = F_w * cpsi;
  drhs_deta(1, 5) = -F_w * spsi;
  drhs_deta(0, 1) = spsi * dF_dalpha * dalpha_dy;
  drhs_deta(1, 1) = cpsi * dF_dalpha * dalpha_dy;

  // d(C nu + D nu)/d(nu).
  const Vec6 v = nu.vec();
  const Vec3 nu1 = v.head<3>(), nu2 = v.tail<3>();
  const Vec3 a = M.topRows<3>() * v;
  const Vec3 b = M.bottomRows<3>() * v;
  const auto A1 = M.topRows<3>();
  const auto A2 = M.bottomRows<3>();
  Eigen::Matrix<double, 6, 6> dload_dnu = Eigen::Matrix<double, 6, 6>::Zero();
  dload_dnu.topRows<3>() = skew(nu2) * A1;
  dload_dnu.topRows<3>().rightCols<3>() -= skew(a);
  dload_dnu.bottomRows<3>() = skew(nu1) * A1 + skew(nu2) * A2;
  dload_dnu.bottomRows<3>().leftCols<3>() -= skew(a);
  dload_dnu.bottomRows<3>().rightCols<3>() -= skew(b);
  dload_dnu +=
      Mat6((p.d_lin + 2.0 * p.d_quad.cwiseProduct(v.cwiseAbs())).asDiagonal());

  // Kinematics: d(J(eta) nu)/d(phi, theta, psi).
  const ElementaryRotations e = elementary(eta.phi, eta.theta, eta.psi);
  const Mat3 R = e.Rz * e.Ry * e.Rx;
  const Mat3 dR_dphi = e.Rz * e.Ry * e.dRx;
  const Mat3 dR_dtheta = e.Rz * e.dRy * e.Rx;
  const Mat3 dR_dpsi = e.dRz * e.Ry * e.Rx;

  const double cf = std::cos(eta.phi), sf = std::sin(eta.phi);
  const double ct = std::cos(eta.theta), st = std::sin(eta.theta);
  const double tt = st / ct, sec = 1.0 / ct;
  Mat3 Te, dTe_dphi, dTe_dtheta;
  Te << 1, sf * tt, cf * tt, 0, cf, -sf, 0, sf * sec, cf * sec;
  dTe_dphi << 0, cf * tt, -sf * tt, 0, -sf, -cf, 0, cf * sec, -sf * sec;
  dTe_dtheta << 0, sf * sec * sec, cf * sec * sec, 0, 0, 0, 0, sf * tt * sec,
      cf * tt * sec;

  StepJacobian out;
  out.A.setZero();
  out.B.setZero();

  // Pose rows.
  out.A.topLeftCorner<6, 6>().setIdentity();
  out.A.block<3, 1>(0, 3) += T * dR_dphi * nu1;
  out.A.block<3, 1>(0, 4) += T * dR_dtheta * nu1;
  out.A.block<3, 1>(0, 5) += T * dR_dpsi * nu1;
  out.A.block<3, 1>(3, 3) += T * dTe_dphi * nu2;
  out.A.block<3, 1>(3, 4) += T * dTe_dtheta * nu2;
  out.A.block<3, 3>(0, 6) = T * R;
  out.A.block<3, 3>(3, 9) = T * Te;

  // Velocity rows.
  out.A.bottomLeftCorner<6, 6>() = T * Minv * drhs_deta;
  out.A.bottomRightCorner<6, 6>() =
      Mat6::Identity() - T * Minv * dload_dnu;

  Eigen::Matrix<double, 6, 2> Bsel = Eigen::Matrix<double, 6, 2>::Zero();
  Bsel(0, 0) = 1.0;
  Bsel(5, 1) = 1.0;
  out.B.bottomRows<6>() = T * Minv * Bsel;
  return out;
}

}  // namespace usv
