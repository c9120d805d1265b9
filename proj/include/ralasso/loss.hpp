#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "ralasso/errors.hpp"

namespace ralasso {

// Loss families for the penalized M-estimators. All are convex, C^1, and grow
// at most quadratically; RaQuadratic/Catoni/SmoothedLad are robust variants
// whose influence is bounded outside a central region.
enum class LossKind { Square, RaQuadratic, Catoni, SmoothedLad };

struct LossSpec {
  LossKind kind = LossKind::Square;
  double alpha = 0.0;  // robustification parameter (RaQuadratic, Catoni)
  double delta = 0.0;  // smoothing half-width (SmoothedLad)

  static LossSpec square() { return {LossKind::Square, 0.0, 0.0}; }
  static LossSpec ra_quadratic(double alpha) {
    require_positive(alpha, "alpha");
    return {LossKind::RaQuadratic, alpha, 0.0};
  }
  static LossSpec catoni(double alpha) {
    require_positive(alpha, "alpha");
    return {LossKind::Catoni, alpha, 0.0};
  }
  static LossSpec smoothed_lad(double delta = 1e-2) {
    require_positive(delta, "delta");
    return {LossKind::SmoothedLad, 0.0, delta};
  }

  // Upper bound on the second derivative of the pointwise loss; the automatic
  // step weight only needs to dominate this times the design curvature.
  double curvature_bound() const {
    return kind == LossKind::SmoothedLad ? 1.0 / delta : 2.0;
  }

 private:
  static void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
  }
};

namespace detail {
inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw std::invalid_argument(std::string(what) + " must be finite");
}
}  // namespace detail

// Robustified quadratic: x^2 inside [-1/alpha, 1/alpha], linear continuation
// 2|x|/alpha - 1/alpha^2 outside. The knot belongs to the quadratic branch.
inline double huber_value(double x, double alpha) {
  detail::require_finite(x, "x");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  double inv = 1.0 / alpha;
  double ax = std::fabs(x);
  return ax <= inv ? x * x : (2.0 * ax - inv) * inv;
}

// Derivative of huber_value is 2/alpha * huber_psi(alpha * x).
inline double huber_psi(double x) {
  detail::require_finite(x, "x");
  return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
}

// Catoni influence: -log(1 - |t| + t^2/2) inside (-1,1), saturating at
// +-log 2. Odd; evaluated through log1p so small |t| keeps full precision.
inline double catoni_psi(double t) {
  detail::require_finite(t, "t");
  double a = std::fabs(t);
  double m = a < 1.0 ? -std::log1p(-(a - 0.5 * a * a)) : M_LN2;
  return std::copysign(m, t);
}

namespace detail {

// Antiderivative F(s) = int_0^s -log(1 - u + u^2/2) du for s in [0,1], linear
// with slope log 2 beyond. Closed form cancels catastrophically for small s
// (every term is O(1), the result O(s^2)), so a short series takes over there.
inline double catoni_antideriv(double s) {
  constexpr double kF1 = 2.0 - M_PI / 2.0;  // F(1)
  if (s > 1.0) return kF1 + (s - 1.0) * M_LN2;
  if (s < 0.02) {
    double s2 = s * s;
    return s2 * (0.5 - s2 * (1.0 / 24.0 + s * (1.0 / 40.0 + s / 120.0)))
           + s2 * s2 * s2 * s2 / 448.0;
  }
  double sm = s - 1.0;
  return s * M_LN2 - sm * std::log(sm * sm + 1.0) + 2.0 * sm - 2.0 * std::atan(sm)
         - M_LN2 + 2.0 - M_PI / 2.0;
}

}  // namespace detail

// Pointwise loss value. Square: x^2. RaQuadratic: huber_value(x, alpha).
// Catoni: (2/alpha^2) F(alpha |x|) with F the integral of the Catoni
// influence, so that the derivative is exactly (2/alpha) catoni_psi(alpha x).
// SmoothedLad: x^2/(2 delta) inside [-delta, delta], |x| - delta/2 outside.
double loss_value(const LossSpec& spec, double x);

// Derivative of loss_value in x; continuous across every knot.
double loss_deriv(const LossSpec& spec, double x);

// (1/n) sum_i loss(y_i - x_i' beta)
double empirical_loss(const LossSpec& spec, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& beta);

// Gradient of empirical_loss: -(1/n) sum_i loss'(y_i - x_i' beta) x_i.
Eigen::VectorXd empirical_gradient(const LossSpec& spec, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta);

namespace detail {
// Residual-based kernels shared with the solver (residuals already formed).
double loss_mean_resid(const LossSpec& spec, const Eigen::VectorXd& r);
void fill_deriv_resid(const LossSpec& spec, const Eigen::VectorXd& r,
                      Eigen::VectorXd& d);
}  // namespace detail

}  // namespace ralasso
