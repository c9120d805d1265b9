#include "ralasso/loss.hpp"

namespace ralasso {

namespace {

inline double value_impl(const LossSpec& spec, double x) {
  switch (spec.kind) {
    case LossKind::Square:
      return x * x;
    case LossKind::RaQuadratic: {
      double inv = 1.0 / spec.alpha;
      double ax = std::fabs(x);
      return ax <= inv ? x * x : (2.0 * ax - inv) * inv;
    }
    case LossKind::Catoni:
      return 2.0 / (spec.alpha * spec.alpha)
             * detail::catoni_antideriv(spec.alpha * std::fabs(x));
    case LossKind::SmoothedLad: {
      double ax = std::fabs(x);
      return ax <= spec.delta ? x * x / (2.0 * spec.delta) : ax - 0.5 * spec.delta;
    }
  }
  throw std::logic_error("unreachable loss kind");
}

inline double deriv_impl(const LossSpec& spec, double x) {
  switch (spec.kind) {
    case LossKind::Square:
      return 2.0 * x;
    case LossKind::RaQuadratic: {
      double inv = 1.0 / spec.alpha;
      return std::fabs(x) <= inv ? 2.0 * x : std::copysign(2.0 * inv, x);
    }
    case LossKind::Catoni:
      return 2.0 / spec.alpha * catoni_psi(spec.alpha * x);
    case LossKind::SmoothedLad:
      return std::fabs(x) <= spec.delta ? x / spec.delta : std::copysign(1.0, x);
  }
  throw std::logic_error("unreachable loss kind");
}

inline void check_spec(const LossSpec& spec) {
  if ((spec.kind == LossKind::RaQuadratic || spec.kind == LossKind::Catoni)
      && !(spec.alpha > 0.0 && std::isfinite(spec.alpha)))
    throw std::invalid_argument("loss spec: alpha must be positive and finite");
  if (spec.kind == LossKind::SmoothedLad
      && !(spec.delta > 0.0 && std::isfinite(spec.delta)))
    throw std::invalid_argument("loss spec: delta must be positive and finite");
}

inline void check_dims(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta) {
  if (X.rows() == 0 || X.cols() == 0) throw ShapeError("empty design matrix");
  if (X.rows() != y.size())
    throw ShapeError("X has " + std::to_string(X.rows()) + " rows but y has "
                     + std::to_string(y.size()) + " entries");
  if (X.cols() != beta.size())
    throw ShapeError("X has " + std::to_string(X.cols()) + " columns but beta has "
                     + std::to_string(beta.size()) + " entries");
}

}  // namespace

double loss_value(const LossSpec& spec, double x) {
  check_spec(spec);
  detail::require_finite(x, "x");
  return value_impl(spec, x);
}

double loss_deriv(const LossSpec& spec, double x) {
  check_spec(spec);
  detail::require_finite(x, "x");
  return deriv_impl(spec, x);
}

namespace detail {

// No finiteness checks here: the solver feeds these directly and detects
// blow-ups through the objective value instead.
double loss_mean_resid(const LossSpec& spec, const Eigen::VectorXd& r) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += value_impl(spec, r[i]);
  return s / static_cast<double>(r.size());
}

void fill_deriv_resid(const LossSpec& spec, const Eigen::VectorXd& r,
                      Eigen::VectorXd& d) {
  d.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) d[i] = deriv_impl(spec, r[i]);
}

}  // namespace detail

namespace {
void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const Eigen::VectorXd& beta) {
  if (!X.allFinite() || !y.allFinite() || !beta.allFinite())
    throw std::invalid_argument("inputs must be finite");
}
}  // namespace

double empirical_loss(const LossSpec& spec, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  check_spec(spec);
  check_dims(X, y, beta);
  check_finite(X, y, beta);
  Eigen::VectorXd r = y - X * beta;
  return detail::loss_mean_resid(spec, r);
}

Eigen::VectorXd empirical_gradient(const LossSpec& spec, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& beta) {
  check_spec(spec);
  check_dims(X, y, beta);
  check_finite(X, y, beta);
  Eigen::VectorXd r = y - X * beta;
  Eigen::VectorXd d;
  detail::fill_deriv_resid(spec, r, d);
  return -(X.transpose() * d) / static_cast<double>(X.rows());
}

}  // namespace ralasso
