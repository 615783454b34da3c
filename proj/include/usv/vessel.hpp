// Rigid-body + hydrodynamic model of a twin-thruster catamaran USV:
// system matrices M, C(nu), D(nu), restoring forces, and the forward-Euler
// state update on flat water. Equations of motion follow the marine-craft
// convention  M nu_dot + C(nu) nu + D(nu) nu = tau  with body-frame nu and
// world-frame pose eta related by eta_dot = J(eta) nu.
#pragma once

#include "usv/errors.hpp"
#include "usv/types.hpp"

namespace usv {

// Attitude guard: Euler rates are singular at |theta| = pi/2.
constexpr double kThetaGuard = kPi / 2.0 - 0.01;

struct VesselParams {
  double m = 0.0;                  // total mass incl. payload (kg)
  double g = 9.81;                 // gravity (m/s^2)
  double rho = 1025.0;             // water density (kg/m^3)
  Vec3 r_g = Vec3::Zero();         // CG offset from body origin (m)
  Mat3 I_b = Mat3::Zero();         // inertia about CG (kg m^2)

  // Added mass, SNAME hydrodynamic derivatives (negative by convention).
  double X_udot = 0.0;
  double Y_vdot = 0.0;
  double Z_wdot = 0.0;
  double K_pdot = 0.0;
  double M_qdot = 0.0;
  double N_rdot = 0.0;

  // Damping, stored as positive drag coefficients. Quadratic entries scale
  // with the magnitude of the matching velocity component.
  Vec6 d_lin = Vec6::Zero();
  Vec6 d_quad = Vec6::Zero();

  // Restoring.
  double displaced_volume = 0.0;   // nabla (m^3)
  double GM_T = 0.0;               // transverse metacentric height (m)
  double GM_L = 0.0;               // longitudinal metacentric height (m)
  double heave_stiffness = 0.0;    // G33 (N/m)

  // Actuator box limits.
  double tau_X_max = 0.0;          // surge force (N)
  double tau_N_max = 0.0;          // yaw moment (N m)

  // Throws ConfigError naming the violated invariant.
  void validate() const;

  double roll_stiffness() const { return rho * g * displaced_volume * GM_T; }
  double pitch_stiffness() const { return rho * g * displaced_volume * GM_L; }
};

// 6x6 block-diagonal kinematic transform J(eta): body velocities to world
// pose rates. Top-left is the ZYX rotation, bottom-right the Euler-rate map.
// Throws SingularAttitudeError when |theta| >= pi/2 - 0.01.
Mat6 rotation_matrix(double phi, double theta, double psi);

// M = M_RB + M_A, constant (zero-frequency added mass).
Mat6 mass_matrix(const VesselParams& params);

// Skew-symmetric Coriolis/centripetal matrix built from the assembled M.
Mat6 coriolis_matrix(const VesselParams& params, const Twist& nu);
Mat6 coriolis_from_mass(const Mat6& M, const Twist& nu);

// D(nu) = D_lin + D_quad(|nu|), diagonal.
Mat6 damping_matrix(const VesselParams& params, const Twist& nu);

// Gravity/buoyancy force acting on the vessel for the given attitude and
// heave displacement: K = -rho g nabla GM_T sin(phi_eff), etc. Zero in
// surge/sway/yaw. Signs are restoring (oppose the displacement).
GeneralizedForce restoring_force(const VesselParams& params, double phi_eff,
                                 double theta_eff, double z);

// Caches the assembled mass matrix and its factorization for repeated
// dynamics evaluations.
class VesselModel {
 public:
  explicit VesselModel(const VesselParams& params);

  const VesselParams& params() const { return params_; }
  const Mat6& M() const { return M_; }
  const Mat6& M_inv() const { return M_inv_; }

  // nu_dot = M^-1 (U + tau_wave + g_force - C(nu) nu - D(nu) nu), with the
  // control embedded as U = [tau_X 0 0 0 0 tau_N]^T and g_force the acting
  // restoring force from restoring_force().
  Twist dynamics(const Twist& nu, const GeneralizedForce& g_force,
                 const ControlInput& u_in, const GeneralizedForce& tau_wave) const;

  // C(nu) nu + D(nu) nu without forming the full matrices.
  Vec6 coriolis_damping_load(const Vec6& nu) const;

 private:
  VesselParams params_;
  Mat6 M_;
  Mat6 M_inv_;
};

// One forward-Euler step: nu' = nu + nu_dot T, eta' = eta + J(eta) nu T,
// with psi re-wrapped to (-pi, pi].
void euler_step(Pose& eta, Twist& nu, const Twist& nu_dot, double T);

}  // namespace usv
