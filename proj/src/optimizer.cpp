#include "ralasso/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ralasso {

namespace {

void check_config(const FitConfig& cfg) {
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda))
    throw std::invalid_argument("lambda must be finite and >= 0");
  if (!(cfg.rho > 0.0))
    throw std::invalid_argument("rho must be positive");
  if (cfg.gamma_u && !(*cfg.gamma_u > 0.0 && std::isfinite(*cfg.gamma_u)))
    throw std::invalid_argument("gamma_u must be positive and finite");
  if (cfg.max_iters < 1)
    throw std::invalid_argument("max_iters must be >= 1");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("tol must be positive");
}

}  // namespace

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("tau must be finite and >= 0");
  if (tau == 0.0) return v;
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double m = std::fabs(v[j]) - tau;
    out[j] = m > 0.0 ? std::copysign(m, v[j]) : 0.0;
  }
  return out;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("rho must be positive and finite");
  if (v.size() == 0) throw ShapeError("cannot project an empty vector");
  for (Eigen::Index j = 0; j < v.size(); ++j)
    detail::require_finite(v[j], "projection input");
  if (v.lpNorm<1>() <= rho) return v;

  std::vector<double> b(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) b[j] = std::fabs(v[j]);
  std::sort(b.begin(), b.end(), std::greater<double>());
  double cum = 0.0, pi = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    cum += b[j];
    double cand = (cum - rho) / static_cast<double>(j + 1);
    if (b[j] - cand > 0.0) pi = cand;  // last j passing the test is the max J
  }
  return soft_threshold(v, pi);
}

double estimate_gamma_u(const Eigen::MatrixXd& X) {
  if (X.rows() == 0 || X.cols() == 0)
    throw DegenerateDesignError("empty design matrix");
  if ((X.array() == 0.0).all())
    throw DegenerateDesignError("design matrix is identically zero");

  const double n = static_cast<double>(X.rows());
  Eigen::VectorXd u = Eigen::VectorXd::Ones(X.cols());
  u /= u.norm();
  double lam = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = X.transpose() * (X * u) / n;
    double lam_new = u.dot(w);  // Rayleigh quotient, ||u|| == 1
    double wn = w.norm();
    if (wn == 0.0) { lam = 0.0; break; }  // u in the null space; X != 0 handled below
    u = w / wn;
    if (it > 0 && std::fabs(lam_new - lam) <= 1e-6 * std::fabs(lam_new)) {
      lam = lam_new;
      break;
    }
    lam = lam_new;
  }
  if (!(lam > 0.0))
    throw DegenerateDesignError("power iteration found no positive curvature");
  return 2.0 * lam * 1.01;
}

Eigen::VectorXd lqa_step(const Eigen::VectorXd& beta_t, const Eigen::VectorXd& grad,
                         const FitConfig& cfg) {
  check_config(cfg);
  if (!cfg.gamma_u)
    throw std::invalid_argument("lqa_step requires a resolved gamma_u");
  if (beta_t.size() != grad.size())
    throw ShapeError("beta and gradient sizes differ");
  double g = *cfg.gamma_u;
  return project_l1_ball(soft_threshold(beta_t - grad / g, cfg.lambda / g), cfg.rho);
}

FitResult composite_gradient_descent(const LossSpec& spec, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& y, const FitConfig& cfg) {
  check_config(cfg);
  if (X.rows() == 0 || X.cols() == 0) throw ShapeError("empty design matrix");
  if (X.rows() != y.size()) throw ShapeError("X rows and y length differ");

  const double n = static_cast<double>(X.rows());
  const Eigen::Index p = X.cols();
  Eigen::VectorXd beta;
  if (cfg.beta0) {
    if (cfg.beta0->size() != p) throw ShapeError("beta0 has wrong length");
    beta = project_l1_ball(*cfg.beta0, cfg.rho);
  } else {
    beta = Eigen::VectorXd::Zero(p);
  }

  const bool auto_gamma = !cfg.gamma_u.has_value();
  const double gamma_base = auto_gamma ? estimate_gamma_u(X) : *cfg.gamma_u;
  double gamma = gamma_base;

  FitConfig step_cfg = cfg;
  Eigen::VectorXd r = y - X * beta;
  Eigen::VectorXd d, grad, cand, r_cand;
  double loss = detail::loss_mean_resid(spec, r);
  double phi = loss + cfg.lambda * beta.lpNorm<1>();
  if (!std::isfinite(phi)) throw DivergenceError("initial objective is not finite");

  FitResult res;
  res.objective_trace.reserve(64);
  res.objective_trace.push_back(phi);

  for (int t = 1; t <= cfg.max_iters; ++t) {
    detail::fill_deriv_resid(spec, r, d);
    grad = -(X.transpose() * d) / n;

    double loss_cand = 0.0;
    for (;;) {
      step_cfg.gamma_u = gamma;
      cand = lqa_step(beta, grad, step_cfg);
      r_cand = y - X * cand;
      loss_cand = detail::loss_mean_resid(spec, r_cand);
      if (!auto_gamma) break;
      Eigen::VectorXd diff = cand - beta;
      double q = loss + grad.dot(diff) + 0.5 * gamma * diff.squaredNorm();
      if (loss_cand <= q || gamma > 1e12 * gamma_base) break;
      gamma *= 2.0;  // majorization failed: curvature exceeds gamma along the step
    }

    double phi_new = loss_cand + cfg.lambda * cand.lpNorm<1>();
    if (!std::isfinite(phi_new))
      throw DivergenceError("objective became non-finite at iteration "
                            + std::to_string(t) + " (gamma_u too small?)");
    res.objective_trace.push_back(phi_new);
    beta.swap(cand);
    r.swap(r_cand);
    loss = loss_cand;
    res.iterations = t;
    if (phi - phi_new < cfg.tol) {
      res.converged = true;
      break;
    }
    phi = phi_new;
    if (auto_gamma && gamma > gamma_base) gamma = std::max(gamma_base, 0.5 * gamma);
  }

  res.beta = std::move(beta);
  return res;
}

}  // namespace ralasso
