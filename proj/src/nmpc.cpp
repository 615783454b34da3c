#include "usv/nmpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "usv/errors.hpp"
#include "usv/log.hpp"

namespace usv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDistanceGuard = 1e-9;   // keeps the transcription smooth
constexpr double kBoxMargin = 1e-9;       // strict interiority of iterates

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct StateCostGrad {
  double x = 0, y = 0, phi = 0, psi = 0;
};

// Q e^2 + R phi^2 + S d with guarded distance; gradient optional.
double state_cost(const Pose& eta, const CostWeights& w, const Vec2& wp,
                  StateCostGrad* grad) {
  const double Xr = wp.x() - eta.x, Yr = wp.y() - eta.y;
  const double d2 = std::max(Xr * Xr + Yr * Yr, kDistanceGuard * kDistanceGuard);
  const double d = std::sqrt(d2);
  const double e = wrap_pi(std::atan2(Yr, Xr) - eta.psi);
  const double cost = w.Q * e * e + w.R * eta.phi * eta.phi + w.S * d;
  if (grad) {
    grad->x = 2.0 * w.Q * e * (Yr / d2) + w.S * (-Xr / d);
    grad->y = 2.0 * w.Q * e * (-Xr / d2) + w.S * (-Yr / d);
    grad->psi = -2.0 * w.Q * e;
    grad->phi = 2.0 * w.R * eta.phi;
  }
  return cost;
}

}  // namespace

void CostWeights::validate() const {
  if (Q < 0.0 || R < 0.0 || S < 0.0)
    throw ConfigError("weights: Q, R, S must be >= 0");
  if (std::abs(W(0, 1) - W(1, 0)) > 1e-12)
    throw ConfigError("weights: W must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(W);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw ConfigError("weights: W must be positive semidefinite");
}

void NmpcConfig::validate() const {
  if (P < 1) throw ConfigError("nmpc: P must be >= 1");
  if (T <= 0.0) throw ConfigError("nmpc: T must be > 0");
  if (max_iterations < 1) throw ConfigError("nmpc: max_iterations must be >= 1");
  if (kkt_tolerance <= 0.0) throw ConfigError("nmpc: kkt_tolerance must be > 0");
  if (constraint_tolerance <= 0.0)
    throw ConfigError("nmpc: constraint_tolerance must be > 0");
  if (solve_time_budget < 0.0)
    throw ConfigError("nmpc: solve_time_budget must be >= 0");
  if (substeps < 1) throw ConfigError("nmpc: substeps must be >= 1");
  if (u_min_enabled && u_min < 0.0)
    throw ConfigError("nmpc: u_min must be >= 0 when enabled");
}

double heading_error(const Pose& eta, const Vec2& waypoint) {
  const double Xr = waypoint.x() - eta.x, Yr = waypoint.y() - eta.y;
  if (std::sqrt(Xr * Xr + Yr * Yr) < 1e-6)
    throw DegeneratePositionError("heading undefined at the waypoint");
  return wrap_pi(std::atan2(Yr, Xr) - eta.psi);
}

double distance_to_waypoint(const Pose& eta, const Vec2& waypoint) {
  const double Xr = waypoint.x() - eta.x, Yr = waypoint.y() - eta.y;
  return std::sqrt(Xr * Xr + Yr * Yr);
}

double stage_cost(const Pose& eta, const Vec2& u_rate, const CostWeights& weights,
                  const Vec2& waypoint, const VesselParams& params) {
  const double e = heading_error(eta, waypoint);
  const double d = distance_to_waypoint(eta, waypoint);
  const Vec2 rate_n(u_rate.x() / params.tau_X_max, u_rate.y() / params.tau_N_max);
  return weights.Q * e * e + weights.R * eta.phi * eta.phi + weights.S * d +
         rate_n.dot(weights.W * rate_n);
}

OcpProblem build_ocp(const Pose& eta0, const Twist& nu0, const WaveParams& wave,
                     double t0, const CostWeights& weights, const NmpcConfig& cfg,
                     const VesselModel& model, const ControlInput& last_applied,
                     double force_sign) {
  cfg.validate();
  weights.validate();
  if (std::abs(eta0.theta) >= kThetaGuard)
    throw SingularAttitudeError("initial state outside the attitude guard");

  OcpProblem p;
  p.eta0 = eta0;
  p.nu0 = nu0;
  p.t0 = t0;
  p.wave = wave;
  p.weights = weights;
  p.cfg = cfg;
  p.last_applied = last_applied;
  p.force_sign = force_sign;
  p.model = &model;

  if (cfg.u_min_enabled) {
    // Reachability ramp at 90 % thrust in pure surge keeps the constraint
    // set non-empty when starting below u_min.
    p.u_lower.resize(cfg.P);
    const VesselParams& vp = model.params();
    const double M11 = model.M()(0, 0);
    const double dt = cfg.T / cfg.substeps;
    double u = nu0.u;
    for (int k = 0; k < cfg.P; ++k) {
      for (int j = 0; j < cfg.substeps; ++j) {
        const double drag = vp.d_lin[0] * u + vp.d_quad[0] * u * std::abs(u);
        u += dt * (0.9 * vp.tau_X_max - drag) / M11;
      }
      p.u_lower[k] = std::min(cfg.u_min, u);
    }
  }
  return p;
}

OcpEvaluator::OcpEvaluator(const OcpProblem& problem) : problem_(&problem) {}

void OcpEvaluator::rollout(const Eigen::VectorXd& U, std::vector<Pose>& poses,
                           std::vector<Twist>& twists) const {
  const OcpProblem& p = *problem_;
  const int P = p.cfg.P;
  poses.assign(P + 1, Pose{});
  twists.assign(P + 1, Twist{});
  poses[0] = p.eta0;
  twists[0] = p.nu0;
  const double dt = p.cfg.T / p.cfg.substeps;
  Pose eta = p.eta0;
  Twist nu = p.nu0;
  for (int i = 0; i < P; ++i) {
    const ControlInput u{U[2 * i], U[2 * i + 1]};
    for (int j = 0; j < p.cfg.substeps; ++j) {
      model_step(eta, nu, u, p.wave, p.t0 + i * p.cfg.T + j * dt, dt, *p.model,
                 p.force_sign);
    }
    poses[i + 1] = eta;
    twists[i + 1] = nu;
  }
}

OcpEvaluator::Eval OcpEvaluator::evaluate(const Eigen::VectorXd& U,
                                          double mu_speed,
                                          Eigen::VectorXd* grad) const {
  const OcpProblem& p = *problem_;
  const int P = p.cfg.P;
  const double T = p.cfg.T;
  const int n_sub = p.cfg.substeps;
  const double dt = T / n_sub;
  const Vec2 tau_scale(p.model->params().tau_X_max, p.model->params().tau_N_max);

  Eval out;
  out.min_slack = kInf;

  using Mat12 = Eigen::Matrix<double, 12, 12>;
  using Mat12x2 = Eigen::Matrix<double, 12, 2>;
  using Vec12 = Eigen::Matrix<double, 12, 1>;

  std::vector<Pose> poses(P + 1);
  std::vector<Twist> twists(P + 1);
  std::vector<Mat12> A;
  std::vector<Mat12x2> B;
  if (grad) {
    A.assign(P, Mat12::Zero());
    B.assign(P, Mat12x2::Zero());
  }

  poses[0] = p.eta0;
  twists[0] = p.nu0;
  Pose eta = p.eta0;
  Twist nu = p.nu0;
  try {
    for (int i = 0; i < P; ++i) {
      const ControlInput u{U[2 * i], U[2 * i + 1]};
      Mat12 Ai = Mat12::Identity();
      Mat12x2 Bi = Mat12x2::Zero();
      for (int j = 0; j < n_sub; ++j) {
        const double t = p.t0 + i * T + j * dt;
        if (grad) {
          const StepJacobian sj =
              model_step_jacobian(eta, nu, u, p.wave, t, dt, *p.model, p.force_sign);
          Ai = sj.A * Ai;
          Bi = sj.A * Bi + sj.B;
        }
        model_step(eta, nu, u, p.wave, t, dt, *p.model, p.force_sign);
      }
      if (!eta.vec().allFinite() || !nu.vec().allFinite()) return out;
      poses[i + 1] = eta;
      twists[i + 1] = nu;
      if (grad) {
        A[i] = Ai;
        B[i] = Bi;
      }
    }
  } catch (const SingularAttitudeError&) {
    return out;  // valid stays false; line search treats this as +inf
  }

  // Cost terms.
  double J = 0.0;
  for (int i = 0; i <= P; ++i) J += state_cost(poses[i], p.weights, p.cfg.waypoint, nullptr);
  auto delta_scaled = [&](int i) -> Vec2 {
    const Vec2 Ui(U[2 * i], U[2 * i + 1]);
    const Vec2 Um = i == 0 ? Vec2(p.last_applied.tau_X, p.last_applied.tau_N)
                           : Vec2(U[2 * i - 2], U[2 * i - 1]);
    return (Ui - Um).cwiseQuotient(tau_scale) / T;
  };
  for (int i = 0; i < P; ++i) {
    const Vec2 du = delta_scaled(i);
    J += du.dot(p.weights.W * du);
  }
  out.J = J;

  if (p.cfg.u_min_enabled) {
    double barrier = 0.0;
    double min_slack = kInf;
    for (int k = 1; k <= P; ++k) {
      const double slack = twists[k].u - p.u_lower[k - 1];
      min_slack = std::min(min_slack, slack);
      if (slack > 0.0) barrier += -std::log(slack);
    }
    out.speed_barrier = barrier;
    out.min_slack = min_slack;
    if (min_slack <= 0.0 && mu_speed != 0.0) {
      // The barrier gradient is undefined here; the plain objective gradient
      // (mu_speed == 0) is still fine below.
      out.valid = true;
      if (grad) grad->setZero(2 * P);
      return out;
    }
  }
  out.valid = true;

  if (!grad) return out;
  grad->setZero(2 * P);

  // Adjoint sweep: lambda_k = d(total future cost)/d s_k.
  auto state_grad_vec = [&](int i) -> Vec12 {
    StateCostGrad g;
    state_cost(poses[i], p.weights, p.cfg.waypoint, &g);
    Vec12 v = Vec12::Zero();
    v[0] = g.x;
    v[1] = g.y;
    v[3] = g.phi;
    v[5] = g.psi;
    if (p.cfg.u_min_enabled && i >= 1 && mu_speed != 0.0) {
      v[6] += -mu_speed / (twists[i].u - p.u_lower[i - 1]);
    }
    return v;
  };

  Vec12 lambda = state_grad_vec(P);
  for (int i = P - 1; i >= 0; --i) {
    Vec2 gU = B[i].transpose() * lambda;
    const Vec2 du_i = delta_scaled(i);
    gU += 2.0 * (p.weights.W * du_i).cwiseQuotient(tau_scale) / T;
    if (i + 1 < P) {
      const Vec2 du_next = delta_scaled(i + 1);
      gU -= 2.0 * (p.weights.W * du_next).cwiseQuotient(tau_scale) / T;
    }
    (*grad)[2 * i] = gU.x();
    (*grad)[2 * i + 1] = gU.y();
    if (i > 0) {
      lambda = state_grad_vec(i) + A[i].transpose() * lambda;
    }
  }
  return out;
}

double box_violation(const OcpProblem& problem, const NmpcSolution& sol) {
  const double xmax = problem.model->params().tau_X_max;
  const double nmax = problem.model->params().tau_N_max;
  double v = 0.0;
  for (const ControlInput& u : sol.controls) {
    v = std::max(v, std::abs(u.tau_X) - xmax);
    v = std::max(v, std::abs(u.tau_N) - nmax);
  }
  return std::max(v, 0.0);
}

double min_speed_violation(const OcpProblem& problem, const NmpcSolution& sol) {
  if (!problem.cfg.u_min_enabled) return 0.0;
  double v = 0.0;
  for (int k = 1; k < static_cast<int>(sol.twists.size()); ++k) {
    v = std::max(v, problem.u_lower[k - 1] - sol.twists[k].u);
  }
  return std::max(v, 0.0);
}

double dynamics_residual(const OcpProblem& problem, const NmpcSolution& sol) {
  const double dt = problem.cfg.T / problem.cfg.substeps;
  double res = 0.0;
  for (int i = 0; i < problem.cfg.P; ++i) {
    Pose eta = sol.poses[i];
    Twist nu = sol.twists[i];
    for (int j = 0; j < problem.cfg.substeps; ++j) {
      model_step(eta, nu, sol.controls[i], problem.wave,
                 problem.t0 + i * problem.cfg.T + j * dt, dt, *problem.model,
                 problem.force_sign);
    }
    res = std::max(res,
                   (eta.vec() - sol.poses[i + 1].vec()).cwiseAbs().maxCoeff());
    res = std::max(res,
                   (nu.vec() - sol.twists[i + 1].vec()).cwiseAbs().maxCoeff());
  }
  return res;
}

namespace {

double box_barrier(const Eigen::VectorXd& z) {
  double b = 0.0;
  for (int j = 0; j < z.size(); ++j) {
    b += -std::log(1.0 - z[j]) - std::log(1.0 + z[j]);
  }
  return b;
}

void add_box_barrier_grad(const Eigen::VectorXd& z, double mu,
                          Eigen::VectorXd& g) {
  for (int j = 0; j < z.size(); ++j) {
    g[j] += mu * (1.0 / (1.0 - z[j]) - 1.0 / (1.0 + z[j]));
  }
}

}  // namespace

NmpcSolution NmpcSolver::solve(const OcpProblem& problem,
                               const NmpcSolution* warm_start) {
  const double t_begin = now_seconds();
  const int P = problem.cfg.P;
  const int n = 2 * P;
  const OcpEvaluator eval(problem);
  const Vec2 tau_scale(problem.model->params().tau_X_max,
                       problem.model->params().tau_N_max);

  // Decision variables scaled to the open box (-1, 1)^n.
  auto to_U = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd U(n);
    for (int i = 0; i < P; ++i) {
      U[2 * i] = z[2 * i] * tau_scale.x();
      U[2 * i + 1] = z[2 * i + 1] * tau_scale.y();
    }
    return U;
  };

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  const bool warm = warm_start && !warm_start->controls.empty();
  if (warm) {
    const auto& c = warm_start->controls;
    const bool shift = problem.t0 > warm_start->t0;
    for (int i = 0; i < P; ++i) {
      const int src = shift ? std::min<int>(i + 1, c.size() - 1)
                            : std::min<int>(i, c.size() - 1);
      z[2 * i] = c[src].tau_X / tau_scale.x();
      z[2 * i + 1] = c[src].tau_N / tau_scale.y();
    }
  }
  for (int j = 0; j < n; ++j) z[j] = std::clamp(z[j], -1.0 + kBoxMargin, 1.0 - kBoxMargin);

  // Feasibility restoration for the minimum-speed constraint: blend toward a
  // high-thrust straight push, which is feasible by the ramp construction.
  {
    OcpEvaluator::Eval e0 = eval.evaluate(to_U(z), 0.0, nullptr);
    if (!e0.valid || e0.min_slack <= 1e-9) {
      bool restored = false;
      for (double beta : {0.25, 0.5, 0.75, 1.0}) {
        Eigen::VectorXd z_try = z;
        for (int i = 0; i < P; ++i) {
          z_try[2 * i] = (1.0 - beta) * z[2 * i] + beta * 0.95;
          z_try[2 * i + 1] = (1.0 - beta) * z[2 * i + 1];
        }
        const OcpEvaluator::Eval et = eval.evaluate(to_U(z_try), 0.0, nullptr);
        if (et.valid && et.min_slack > 1e-9) {
          z = z_try;
          restored = true;
          break;
        }
      }
      if (!restored) {
        throw SolverError("no feasible point found (restoration failed)");
      }
    }
  }

  // Barrier continuation. Scales are proportional to the initial cost so the
  // iterate path is invariant under uniform positive weight scaling.
  const OcpEvaluator::Eval e_init = eval.evaluate(to_U(z), 0.0, nullptr);
  const double s_J = std::max(std::abs(e_init.J), 1e-12);
  std::vector<double> mu_factors;
  if (warm) {
    mu_factors = {1e-6};
  } else {
    mu_factors = {1e-2, 1e-4, 1e-6};
  }

  NmpcSolution sol;
  sol.t0 = problem.t0;

  // Direct Hessian model of the smooth part (objective + speed barrier),
  // seeded with the exact curvature of the input-rate term: a stiff
  // second-difference chain across the horizon that plain BFGS untangles one
  // link per iteration. The box-barrier curvature is diagonal and known in
  // closed form, so it is added exactly at every iterate instead of being
  // estimated. Every piece scales linearly with the weights, preserving the
  // minimizer invariance under uniform weight scaling.
  Eigen::MatrixXd B0 = (1e-2 * s_J) * Eigen::MatrixXd::Identity(n, n);
  {
    const Eigen::Matrix2d Wz =
        2.0 * problem.weights.W / (problem.cfg.T * problem.cfg.T);
    for (int i = 0; i < P; ++i) {
      B0.block<2, 2>(2 * i, 2 * i) += (i + 1 < P) ? 2.0 * Wz : Wz;
      if (i + 1 < P) {
        B0.block<2, 2>(2 * i, 2 * i + 2) -= Wz;
        B0.block<2, 2>(2 * i + 2, 2 * i) -= Wz;
      }
    }
  }
  if (H_.rows() != n || !warm) H_ = B0;

  const double gtol_final = problem.cfg.kkt_tolerance * s_J;
  int iter_total = 0;
  bool converged = false;
  double exit_gnorm = 0.0;

  Eigen::VectorXd scale_vec(n);
  for (int i = 0; i < P; ++i) {
    scale_vec[2 * i] = tau_scale.x();
    scale_vec[2 * i + 1] = tau_scale.y();
  }

  auto box_hess_diag = [&](const Eigen::VectorXd& zz, double mu) {
    Eigen::VectorXd h(n);
    for (int j = 0; j < n; ++j) {
      const double a = 1.0 - zz[j], b = 1.0 + zz[j];
      h[j] = mu * (1.0 / (a * a) + 1.0 / (b * b));
    }
    return h;
  };

  Eigen::VectorXd g_theta(n), g_theta_new(n), g(n), d(n), z_new(n), grad_U(n);

  for (size_t round = 0; round < mu_factors.size(); ++round) {
    const bool final_round = round + 1 == mu_factors.size();
    const double mu = mu_factors[round] * s_J;
    const double gtol = final_round ? gtol_final : 100.0 * gtol_final;
    sol.round_starts.push_back(static_cast<int>(sol.merit_history.size()));

    OcpEvaluator::Eval cur = eval.evaluate(to_U(z), mu, &grad_U);
    double merit = cur.J + mu * (cur.speed_barrier + box_barrier(z));
    g_theta = grad_U.cwiseProduct(scale_vec);
    g = g_theta;
    add_box_barrier_grad(z, mu, g);

    while (iter_total < problem.cfg.max_iterations) {
      exit_gnorm = g.lpNorm<Eigen::Infinity>();
      if (exit_gnorm <= gtol) {
        if (final_round) converged = true;
        break;
      }
      if (problem.cfg.solve_time_budget > 0.0 &&
          now_seconds() - t_begin > problem.cfg.solve_time_budget) {
        break;
      }

      // Newton-type direction on B + exact box-barrier diagonal.
      Eigen::MatrixXd M = H_;
      M.diagonal() += box_hess_diag(z, mu);
      Eigen::LLT<Eigen::MatrixXd> llt(M);
      if (llt.info() == Eigen::Success) {
        d = llt.solve(-g);
      } else {
        H_ = B0;
        M = H_;
        M.diagonal() += box_hess_diag(z, mu);
        d = M.ldlt().solve(-g);
      }
      double descent = d.dot(g);
      if (!(descent < 0.0) || !d.allFinite()) {
        d = -g;
        descent = d.dot(g);
      }

      // Fraction-to-boundary for the box keeps trial points interior.
      double a_max = 1.0;
      for (int j = 0; j < n; ++j) {
        if (d[j] > 0.0) a_max = std::min(a_max, 0.995 * (1.0 - z[j]) / d[j]);
        else if (d[j] < 0.0) a_max = std::min(a_max, 0.995 * (1.0 + z[j]) / -d[j]);
      }

      double alpha = a_max;
      bool accepted = false;
      OcpEvaluator::Eval trial;
      double merit_trial = 0.0;
      for (int ls = 0; ls < 40; ++ls) {
        z_new = z + alpha * d;
        trial = eval.evaluate(to_U(z_new), mu, nullptr);
        if (trial.valid && trial.min_slack > 0.0) {
          merit_trial = trial.J + mu * (trial.speed_barrier + box_barrier(z_new));
          if (merit_trial <= merit + 1e-4 * alpha * descent) {
            accepted = true;
            break;
          }
        }
        alpha *= 0.5;
        if (alpha * d.lpNorm<Eigen::Infinity>() < 1e-15) break;
      }
      if (!accepted) break;

      trial = eval.evaluate(to_U(z_new), mu, &grad_U);
      g_theta_new = grad_U.cwiseProduct(scale_vec);

      // Damped BFGS update of the smooth-part Hessian model.
      const Eigen::VectorXd step = z_new - z;
      Eigen::VectorXd yv = g_theta_new - g_theta;
      const Eigen::VectorXd Bs = H_ * step;
      const double sBs = step.dot(Bs);
      double sy = step.dot(yv);
      if (sBs > 0.0 && sy < 0.2 * sBs) {
        const double theta_d = 0.8 * sBs / (sBs - sy);
        yv = theta_d * yv + (1.0 - theta_d) * Bs;
        sy = step.dot(yv);
      }
      if (sBs > 0.0 && sy > 1e-12 * step.norm() * yv.norm()) {
        H_ += (yv * yv.transpose()) / sy - (Bs * Bs.transpose()) / sBs;
      }

      z = z_new;
      g_theta = g_theta_new;
      g = g_theta;
      add_box_barrier_grad(z, mu, g);
      merit = merit_trial;
      ++iter_total;
      sol.merit_history.push_back(merit);
    }
    if (problem.cfg.solve_time_budget > 0.0 &&
        now_seconds() - t_begin > problem.cfg.solve_time_budget) {
      break;
    }
  }

  // Assemble the solution from the final iterate.
  const Eigen::VectorXd U = to_U(z);
  sol.controls.resize(P);
  for (int i = 0; i < P; ++i) sol.controls[i] = ControlInput{U[2 * i], U[2 * i + 1]};
  eval.rollout(U, sol.poses, sol.twists);
  sol.cost = eval.evaluate(U, 0.0, nullptr).J;
  sol.iterations = iter_total;
  sol.converged = converged;
  sol.kkt_residual = exit_gnorm / s_J;
  sol.solve_time = now_seconds() - t_begin;
  return sol;
}

std::pair<ControlInput, NmpcSolution> NmpcSolver::receding_horizon_step(
    const Pose& eta, const Twist& nu, const WaveParams& wave, double t,
    const CostWeights& weights, const NmpcConfig& cfg, const VesselModel& model,
    const NmpcSolution* prev, double force_sign) {
  const double t_begin = now_seconds();
  const ControlInput last_applied =
      (prev && !prev->controls.empty()) ? prev->controls.front() : ControlInput{};
  const OcpProblem problem =
      build_ocp(eta, nu, wave, t, weights, cfg, model, last_applied, force_sign);
  NmpcSolution sol;
  try {
    sol = solve(problem, prev);
  } catch (const SolverError& err) {
    if (!prev || prev->controls.size() < 2) throw;
    log::warn(std::string("solver failed at t=") + std::to_string(t) +
              ", falling back to the shifted previous plan: " + err.what());
    sol = *prev;
    const int P = static_cast<int>(prev->controls.size());
    for (int i = 0; i < P; ++i) {
      sol.controls[i] = prev->controls[std::min(i + 1, P - 1)];
    }
    sol.t0 = t;
    sol.converged = false;
    sol.used_fallback = true;
  }
  sol.solve_time = now_seconds() - t_begin;
  return {sol.controls.front(), sol};
}

}  // namespace usv
