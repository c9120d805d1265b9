#include "ralasso/robust_mean.hpp"

#include <cmath>
#include <string>

#include "ralasso/loss.hpp"

namespace ralasso {

namespace {

void check_calibration_args(long n, double delta, double v) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument("v must be positive and finite");
}

}  // namespace

double choose_alpha(long n, double delta, double v) {
  check_calibration_args(n, delta, v);
  return std::sqrt(std::log(1.0 / delta) / (static_cast<double>(n) * v * v));
}

double concentration_radius(long n, double delta, double v) {
  check_calibration_args(n, delta, v);
  return 4.0 * v * std::sqrt(std::log(1.0 / delta) / static_cast<double>(n));
}

bool deviation_bound_applicable(long n, double delta) {
  check_calibration_args(n, delta, 1.0);
  return std::log(1.0 / delta) / static_cast<double>(n) <= 0.125;
}

long deviation_bound_min_n(double delta) {
  check_calibration_args(1, delta, 1.0);
  return static_cast<long>(std::ceil(8.0 * std::log(1.0 / delta)));
}

double ra_mean(const Eigen::VectorXd& samples, const RaMeanConfig& cfg) {
  const Eigen::Index n = samples.size();
  if (n < 1) throw ShapeError("ra_mean needs at least one sample");
  for (Eigen::Index i = 0; i < n; ++i)
    detail::require_finite(samples[i], "sample");
  if (cfg.alpha && !(*cfg.alpha > 0.0 && std::isfinite(*cfg.alpha)))
    throw std::invalid_argument("alpha must be positive and finite");

  const double alpha =
      cfg.alpha ? *cfg.alpha : choose_alpha(n, cfg.delta, cfg.v);
  const double lo0 = samples.minCoeff();
  const double hi0 = samples.maxCoeff();
  const double tol = cfg.root_tol ? *cfg.root_tol : 1e-10 * (1.0 + (hi0 - lo0));
  if (!(tol > 0.0)) throw std::invalid_argument("root_tol must be positive");

  auto r = [&](double theta) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += huber_psi(alpha * (samples[i] - theta));
    return s / (alpha * static_cast<double>(n));
  };

  // r > 0 at lo and r < 0 at hi by construction of the bracket.
  // Left edge of the root interval: boundary between {r > 0} and {r <= 0}.
  double lo = lo0 - 1.0 / alpha, hi = hi0 + 1.0 / alpha;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (r(mid) > 0.0) lo = mid; else hi = mid;
  }
  double left = 0.5 * (lo + hi);
  // Right edge: boundary between {r >= 0} and {r < 0}.
  lo = lo0 - 1.0 / alpha;
  hi = hi0 + 1.0 / alpha;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (r(mid) >= 0.0) lo = mid; else hi = mid;
  }
  double right = 0.5 * (lo + hi);

  double theta = 0.5 * (left + right);
  return std::min(hi0, std::max(lo0, theta));
}

RobustCovariance robust_covariance(const Eigen::MatrixXd& X,
                                   std::optional<double> delta,
                                   std::optional<double> v) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < 1 || p < 1) throw ShapeError("covariance input must be non-empty");
  if (!X.allFinite()) throw std::invalid_argument("X contains non-finite entries");

  double d = delta ? *delta
                   : std::min(std::pow(static_cast<double>(p), -3.0), 0.05);
  if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (v && !(*v > 0.0 && std::isfinite(*v)))
    throw std::invalid_argument("v must be positive and finite");
  if (!deviation_bound_applicable(n, d))
    throw CalibrationError(
        "deviation bound requires log(1/delta)/n <= 1/8: need n >= "
            + std::to_string(deviation_bound_min_n(d)) + " at delta="
            + std::to_string(d) + ", have n=" + std::to_string(n),
        deviation_bound_min_n(d));

  RobustCovariance out;
  out.delta = d;
  out.sigma.resize(p, p);
  out.alpha.resize(p, p);
  out.v.resize(p, p);
  out.radius.resize(p, p);

  Eigen::VectorXd prod(n);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      prod = X.col(i).cwiseProduct(X.col(j));
      double vij;
      if (v) {
        vij = *v;
      } else {
        double mean = prod.mean();
        double ss = (prod.array() - mean).square().sum();
        double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        vij = std::max(sd, 1e-12);
      }
      double aij = choose_alpha(n, d, vij);
      RaMeanConfig cfg;
      cfg.alpha = aij;
      double est = ra_mean(prod, cfg);
      out.sigma(i, j) = out.sigma(j, i) = est;
      out.alpha(i, j) = out.alpha(j, i) = aij;
      out.v(i, j) = out.v(j, i) = vij;
      out.radius(i, j) = out.radius(j, i) = concentration_radius(n, d, vij);
    }
  }
  return out;
}

}  // namespace ralasso
