#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "ralasso/errors.hpp"
#include "ralasso/loss.hpp"

namespace ralasso {

// Configuration for the composite gradient solver of
//   min_beta  L_n(beta) + lambda ||beta||_1   s.t.  ||beta||_1 <= rho.
struct FitConfig {
  double lambda = 0.0;                 // penalty level, >= 0
  double rho = 1e6;                    // l1 feasibility radius, > 0
  std::optional<double> gamma_u;       // step weight; empty = estimate from X
  int max_iters = 10000;
  double tol = 1e-10;                  // stop when the objective drop falls below
  std::optional<Eigen::VectorXd> beta0;  // warm start; default all zeros
};

struct FitResult {
  Eigen::VectorXd beta;
  std::vector<double> objective_trace;  // phi at the start plus one entry per step
  int iterations = 0;
  bool converged = false;
};

// Componentwise soft thresholding, sign(v) max(|v| - tau, 0); tau >= 0.
// tau == 0 returns v unchanged (bit-identical).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau);

// Euclidean projection onto {x : ||x||_1 <= rho} by the sorted-threshold rule:
// sort |v| descending, J = max{ j : b_j - (sum_{r<=j} b_r - rho)/j > 0 },
// pi = (sum_{r<=J} b_r - rho)/J, output soft_threshold(v, pi). Vectors already
// inside the ball are returned unchanged.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double rho);

// Automatic step weight: 2 * lambda_max(X'X/n) * 1.01, the top eigenvalue
// found by power iteration (start vector of ones, relative tolerance 1e-6).
// Throws DegenerateDesignError when X is empty or identically zero.
double estimate_gamma_u(const Eigen::MatrixXd& X);

// One composite step at beta_t with gradient grad:
//   project_l1_ball(soft_threshold(beta_t - grad/gamma_u, lambda/gamma_u), rho).
// cfg.gamma_u must be resolved (non-empty).
Eigen::VectorXd lqa_step(const Eigen::VectorXd& beta_t, const Eigen::VectorXd& grad,
                         const FitConfig& cfg);

// Iterates lqa_step until the penalized objective phi_n decreases by less than
// cfg.tol or max_iters is reached. With automatic gamma_u the step weight is
// doubled whenever the quadratic majorization fails at the candidate (and
// relaxed back after accepted steps), so the trace is non-increasing for every
// loss family; an explicit gamma_u is used verbatim and a non-finite objective
// raises DivergenceError.
FitResult composite_gradient_descent(const LossSpec& spec, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y, const FitConfig& cfg);

}  // namespace ralasso
