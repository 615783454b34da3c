// Couples the wave field to the vessel: wave-relative attitude fed to the
// restoring term, the yaw-rotated lateral slope force, and the disturbed
// one-step plant update used by both the simulator and the NMPC prediction
// model (no plant/model mismatch).
#pragma once

#include "usv/types.hpp"
#include "usv/vessel.hpp"
#include "usv/wave.hpp"

namespace usv {

// Roll/pitch measured relative to the local wave surface.
struct EffectiveAttitude {
  double phi_eff = 0.0;
  double theta_eff = 0.0;
};

// phi_eff = phi - alpha cos(psi), theta_eff = theta - alpha sin(psi).
// Throws SingularAttitudeError if the result leaves the pi/2 guard.
EffectiveAttitude effective_attitude(const Pose& eta, double alpha);

// World-frame lateral force (0, F_w, 0) rotated into the body frame by yaw
// only: X = F_w sin(psi), Y = F_w cos(psi). force_sign (+/-1) resolves the
// direction ambiguity of the slope force; default +1.
GeneralizedForce wave_force(double alpha, double psi, const VesselParams& params,
                            double force_sign = 1.0);

// The restoring modes of a small catamaran are stiff (natural periods well
// under a second); a single explicit-Euler step at the 0.1 s control period
// is unstable, so the period is subdivided. The same substep count is used
// by the plant and the controller prediction model.
struct CouplingOptions {
  double force_sign = 1.0;
  int plant_substeps = 5;
};

// One closed-loop plant step of period T starting at time t: samples the
// wave at the vessel's world y, assembles restoring via the wave-relative
// attitude, adds the lateral wave force, and advances one Euler step.
// Out-of-box control inputs are clamped (warning on stderr).
void plant_step(Pose& eta, Twist& nu, const ControlInput& u_in,
                const WaveParams& wave, double t, double T,
                const VesselModel& model,
                const CouplingOptions& opts = CouplingOptions{});

// Sensitivities of the one-substep state update s' = F(s, u) with the state
// ordered [eta; nu]. Used by the NMPC adjoint gradient.
struct StepJacobian {
  Eigen::Matrix<double, 12, 12> A;  // dF/ds
  Eigen::Matrix<double, 12, 2> B;   // dF/du
};

// Single-substep variant returning the updated state; always uses one Euler
// step of length T (the NMPC prediction model).
void model_step(Pose& eta, Twist& nu, const ControlInput& u_in,
                const WaveParams& wave, double t, double T,
                const VesselModel& model, double force_sign = 1.0);

StepJacobian model_step_jacobian(const Pose& eta, const Twist& nu,
                                 const ControlInput& u_in, const WaveParams& wave,
                                 double t, double T, const VesselModel& model,
                                 double force_sign = 1.0);

}  // namespace usv
