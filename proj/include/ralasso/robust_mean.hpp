#pragma once

#include <Eigen/Core>
#include <optional>

#include "ralasso/errors.hpp"

namespace ralasso {

// Concentration calibration for the influence-truncated mean: with
// alpha = sqrt(log(1/delta) / (n v^2)) the estimator satisfies
// |mu_hat - mu| <= 4 v sqrt(log(1/delta)/n) with probability >= 1 - 2 delta,
// provided log(1/delta)/n <= 1/8 and v^2 bounds the variance.
double choose_alpha(long n, double delta, double v);
double concentration_radius(long n, double delta, double v);
bool deviation_bound_applicable(long n, double delta);
// Smallest n making the bound applicable at this delta: ceil(8 log(1/delta)).
long deviation_bound_min_n(double delta);

struct RaMeanConfig {
  std::optional<double> alpha;     // truncation level; empty = choose_alpha(n, delta, v)
  double delta = 0.05;             // confidence parameter in (0,1)
  double v = 1.0;                  // standard-deviation bound, > 0
  std::optional<double> root_tol;  // empty = 1e-10 * (1 + sample range)
};

// Root of r(theta) = (1/(alpha n)) sum_i psi(alpha (y_i - theta)) with psi the
// clipped identity. r is non-increasing and piecewise linear; the root set is
// an interval whose endpoints are bracketed by bisection on
// [min - 1/alpha, max + 1/alpha], and the midpoint is returned (clamped to the
// sample range).
double ra_mean(const Eigen::VectorXd& samples, const RaMeanConfig& cfg = {});

struct RobustCovariance {
  Eigen::MatrixXd sigma;   // symmetric estimate of E X_i X_j (not centered)
  Eigen::MatrixXd alpha;   // per-pair truncation level
  Eigen::MatrixXd v;       // per-pair deviation scale actually used
  Eigen::MatrixXd radius;  // per-pair high-probability deviation radius
  double delta = 0.0;
};

// Entrywise truncated-mean estimate of the second-moment matrix: entry (i,j)
// is ra_mean over {X_ki X_kj}_k. Auto calibration: delta = min(p^-3, 0.05),
// v = per-pair sample standard deviation floored at 1e-12. Throws
// CalibrationError (carrying the minimum n) when the deviation bound does not
// apply at the resolved delta.
RobustCovariance robust_covariance(const Eigen::MatrixXd& X,
                                   std::optional<double> delta = {},
                                   std::optional<double> v = {});

}  // namespace ralasso
