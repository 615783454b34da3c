// Receding-horizon nonlinear MPC. The optimal control problem is transcribed
// by single shooting over the P-step control sequence (2 decision variables
// per step); states follow from the coupled wave-vessel prediction model, so
// the dynamics recursion holds by construction. Box limits on both input
// channels and the optional minimum-surge-speed constraint are enforced with
// a log-barrier; the smooth subproblems are minimized by BFGS with an Armijo
// line search and an adjoint (backpropagated) objective gradient.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "usv/coupling.hpp"
#include "usv/types.hpp"
#include "usv/vessel.hpp"
#include "usv/wave.hpp"

namespace usv {

struct CostWeights {
  double Q = 0.0;  // heading-error weight
  double R = 0.0;  // roll weight
  double S = 0.0;  // distance weight
  Eigen::Matrix2d W = Eigen::Matrix2d::Identity();  // input-rate weight

  void validate() const;  // Q,R,S >= 0 and W symmetric PSD
};

struct NmpcConfig {
  int P = 40;          // prediction horizon (control intervals)
  double T = 0.1;      // control period (s)
  Vec2 waypoint = Vec2::Zero();  // (x_d, y_d), metres
  double u_min = 0.5;  // minimum surge speed (m/s)
  bool u_min_enabled = true;
  int max_iterations = 160;
  double kkt_tolerance = 1e-5;
  double constraint_tolerance = 1e-6;
  // Wall-clock cap per solve; 0 disables it. Left off by default so repeated
  // runs are bit-identical (iteration counts never depend on machine load).
  double solve_time_budget = 0.0;
  int substeps = 5;  // Euler substeps per control period

  void validate() const;
};

// Full-quadrant heading error to the waypoint, wrapped to (-pi, pi].
// Throws DegeneratePositionError within 1e-6 m of the waypoint.
double heading_error(const Pose& eta, const Vec2& waypoint);

double distance_to_waypoint(const Pose& eta, const Vec2& waypoint);

// Q e_psi^2 + R phi^2 + S d + udot^T W udot. The input-rate pair is given in
// SI units (N/s, N m/s) and is normalized by the actuator limits before W is
// applied, so W = diag(1,1) weighs both channels on a comparable scale.
double stage_cost(const Pose& eta, const Vec2& u_rate, const CostWeights& weights,
                  const Vec2& waypoint, const VesselParams& params);

struct NmpcSolution {
  std::vector<ControlInput> controls;  // P applied-force sequence
  std::vector<Pose> poses;             // P+1 predicted knots
  std::vector<Twist> twists;           // P+1
  double cost = 0.0;                   // transcribed objective at the solution
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;           // scaled gradient inf-norm at exit
  double solve_time = 0.0;             // wall seconds
  bool used_fallback = false;          // receding step substituted the shifted plan
  double t0 = 0.0;                     // problem start time the plan was built for

  // Accepted-iterate merit values, one entry per inner iteration, with the
  // start index of each barrier round. Used by the monotonicity tests.
  std::vector<double> merit_history;
  std::vector<int> round_starts;
};

struct OcpProblem {
  Pose eta0;
  Twist nu0;
  double t0 = 0.0;
  WaveParams wave;
  CostWeights weights;
  NmpcConfig cfg;
  ControlInput last_applied;       // input applied over the previous period
  double force_sign = 1.0;         // wave lateral-force direction
  const VesselModel* model = nullptr;

  // Per-knot lower bounds for the surge speed, knots 1..P. During spin-up
  // from below u_min the bound ramps along a reduced-thrust reachability
  // profile so the constraint set stays non-empty from rest.
  Eigen::VectorXd u_lower;

  int num_decision_vars() const { return 2 * cfg.P; }
};

OcpProblem build_ocp(const Pose& eta0, const Twist& nu0, const WaveParams& wave,
                     double t0, const CostWeights& weights, const NmpcConfig& cfg,
                     const VesselModel& model,
                     const ControlInput& last_applied = ControlInput{},
                     double force_sign = 1.0);

// Evaluates the transcribed objective (and the minimum-speed barrier) along
// the shooting rollout. Public so the gradient can be checked against finite
// differences. U stacks the control sequence as (tau_X_0, tau_N_0, ...).
class OcpEvaluator {
 public:
  explicit OcpEvaluator(const OcpProblem& problem);

  struct Eval {
    double J = 0.0;             // transcribed cost
    double speed_barrier = 0.0; // sum_k -log(u_k - b_k), 0 when disabled
    double min_slack = 0.0;     // min_k (u_k - b_k); +inf when disabled
    bool valid = false;         // rollout stayed finite and within guards
  };

  // When grad is non-null it receives d(J + mu_speed * speed_barrier)/dU via
  // one adjoint sweep. Gradients are only meaningful when min_slack > 0.
  Eval evaluate(const Eigen::VectorXd& U, double mu_speed,
                Eigen::VectorXd* grad) const;

  // Rollout of the prediction model for solution assembly.
  void rollout(const Eigen::VectorXd& U, std::vector<Pose>& poses,
               std::vector<Twist>& twists) const;

  const OcpProblem& problem() const { return *problem_; }

 private:
  const OcpProblem* problem_;
};

// Feasibility checks used by tests and the acceptance suite.
double box_violation(const OcpProblem& problem, const NmpcSolution& sol);
double min_speed_violation(const OcpProblem& problem, const NmpcSolution& sol);
double dynamics_residual(const OcpProblem& problem, const NmpcSolution& sol);

// Iterative local solver. A solver instance owns its iterate workspace and
// must not be shared mid-solve; distinct instances are independent.
class NmpcSolver {
 public:
  NmpcSolution solve(const OcpProblem& problem,
                     const NmpcSolution* warm_start = nullptr);

  // Builds the OCP at (state, t), solves warm-started from prev, and returns
  // the first control for application over one period. On solver failure the
  // shifted previous plan supplies the control and the event is flagged.
  std::pair<ControlInput, NmpcSolution> receding_horizon_step(
      const Pose& eta, const Twist& nu, const WaveParams& wave, double t,
      const CostWeights& weights, const NmpcConfig& cfg, const VesselModel& model,
      const NmpcSolution* prev, double force_sign = 1.0);

 private:
  Eigen::MatrixXd H_;  // Hessian model of the smooth part, reused across solves
};

}  // namespace usv
