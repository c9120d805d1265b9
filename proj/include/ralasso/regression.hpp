#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "ralasso/optimizer.hpp"

namespace ralasso {

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  // Throws ShapeError on dimension mismatch and std::invalid_argument on
  // non-finite entries. Called at every ingestion boundary (CSV, bindings).
  void validate() const;
};

// Fits a coefficient vector on a training dataset (used by the CV routines).
using Fitter = std::function<Eigen::VectorXd(const Dataset&)>;

// Penalized fitters; all solve min L_n(beta) + lambda ||beta||_1 subject to
// ||beta||_1 <= cfg.rho through the composite gradient solver. The explicit
// lambda/alpha arguments override whatever cfg carries.
FitResult fit_lasso(const Dataset& data, double lambda, const FitConfig& cfg = {});
FitResult fit_ra_lasso(const Dataset& data, double alpha, double lambda,
                       const FitConfig& cfg = {});
FitResult fit_catoni_lasso(const Dataset& data, double alpha, double lambda,
                           const FitConfig& cfg = {});
// LAD realized as a smoothed absolute loss with half-width delta.
FitResult fit_r_lasso(const Dataset& data, double lambda, const FitConfig& cfg = {},
                      double delta = 1e-2);

// Least squares restricted to `support` (distinct column indices), zeros
// elsewhere. Throws RankDeficiencyError when the restricted Gram matrix is not
// positive definite (including |support| > n).
Eigen::VectorXd fit_oracle(const Dataset& data, const std::vector<int>& support);

Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

// Fold assignment: indices 0..n-1 shuffled by the seeded generator, then cut
// into K contiguous blocks; the first n mod K folds get one extra element.
std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed);

struct VarianceEstimate {
  double sigma2_hat = 0.0;
  std::vector<double> per_fold;  // mean squared held-out residual, by fold
};

// K-fold cross-validated noise variance: fit on each complement, average the
// squared residuals on the held-out fold, then average the folds.
VarianceEstimate estimate_sigma2_cv(const Dataset& data, int k, const Fitter& fitter,
                                    std::uint64_t seed = 0, int workers = 1);

}  // namespace ralasso
