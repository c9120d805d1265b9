#include "ralasso/regression.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "parallel.hpp"
#include "ralasso/rng.hpp"

namespace ralasso {

void Dataset::validate() const {
  if (X.rows() == 0 || X.cols() == 0) throw ShapeError("dataset has no observations or no features");
  if (X.rows() != y.size())
    throw ShapeError("dataset has " + std::to_string(X.rows()) + " rows but "
                     + std::to_string(y.size()) + " responses");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("dataset contains non-finite entries");
}

namespace {

FitResult fit_with(const LossSpec& spec, const Dataset& data, double lambda,
                   FitConfig cfg) {
  if (data.X.rows() != data.y.size()) throw ShapeError("X rows and y length differ");
  cfg.lambda = lambda;
  return composite_gradient_descent(spec, data.X, data.y, cfg);
}

}  // namespace

FitResult fit_lasso(const Dataset& data, double lambda, const FitConfig& cfg) {
  return fit_with(LossSpec::square(), data, lambda, cfg);
}

FitResult fit_ra_lasso(const Dataset& data, double alpha, double lambda,
                       const FitConfig& cfg) {
  return fit_with(LossSpec::ra_quadratic(alpha), data, lambda, cfg);
}

FitResult fit_catoni_lasso(const Dataset& data, double alpha, double lambda,
                           const FitConfig& cfg) {
  return fit_with(LossSpec::catoni(alpha), data, lambda, cfg);
}

FitResult fit_r_lasso(const Dataset& data, double lambda, const FitConfig& cfg,
                      double delta) {
  return fit_with(LossSpec::smoothed_lad(delta), data, lambda, cfg);
}

Eigen::VectorXd fit_oracle(const Dataset& data, const std::vector<int>& support) {
  if (data.X.rows() != data.y.size()) throw ShapeError("X rows and y length differ");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(data.p());
  if (support.empty()) return beta;

  std::set<int> uniq(support.begin(), support.end());
  if (uniq.size() != support.size())
    throw std::invalid_argument("oracle support contains duplicate indices");
  for (int j : support)
    if (j < 0 || j >= data.p())
      throw ShapeError("oracle support index " + std::to_string(j) + " out of range");
  if (static_cast<Eigen::Index>(support.size()) > data.n())
    throw RankDeficiencyError("oracle support larger than the sample size");

  Eigen::MatrixXd Xs(data.n(), support.size());
  for (std::size_t c = 0; c < support.size(); ++c) Xs.col(c) = data.X.col(support[c]);
  Eigen::MatrixXd gram = Xs.transpose() * Xs;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw RankDeficiencyError("restricted Gram matrix is not positive definite");
  // A singular-but-consistent Gram can slip through LLT with a tiny pivot and
  // still solve to a small residual, so bound the pivot spread directly.
  Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
  if (!(pivots.minCoeff() > 1e-7 * pivots.maxCoeff()))
    throw RankDeficiencyError("restricted Gram matrix is numerically singular");
  Eigen::VectorXd rhs = Xs.transpose() * data.y;
  Eigen::VectorXd coef = llt.solve(rhs);
  if (!coef.allFinite()
      || (gram * coef - rhs).norm() > 1e-8 * (1.0 + rhs.norm()))
    throw RankDeficiencyError("restricted Gram matrix is numerically singular");
  for (std::size_t c = 0; c < support.size(); ++c) beta[support[c]] = coef[c];
  return beta;
}

Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  if (X.cols() != beta.size())
    throw ShapeError("X has " + std::to_string(X.cols()) + " columns but beta has "
                     + std::to_string(beta.size()) + " entries");
  return X * beta;
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("K must be >= 2");
  if (k > n) throw std::invalid_argument("K exceeds the number of observations");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Philox4x32 rng(seed, make_stream(StreamPurpose::FoldShuffle, 0, 0));
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(idx[i], idx[j]);
  }
  std::vector<std::vector<int>> folds(k);
  int base = n / k, extra = n % k, pos = 0;
  for (int f = 0; f < k; ++f) {
    int size = base + (f < extra ? 1 : 0);
    folds[f].assign(idx.begin() + pos, idx.begin() + pos + size);
    pos += size;
  }
  return folds;
}

VarianceEstimate estimate_sigma2_cv(const Dataset& data, int k, const Fitter& fitter,
                                    std::uint64_t seed, int workers) {
  data.validate();
  if (!fitter) throw std::invalid_argument("fitter must be callable");
  auto folds = make_folds(static_cast<int>(data.n()), k, seed);

  VarianceEstimate est;
  est.per_fold.assign(folds.size(), 0.0);
  detail::parallel_for(folds.size(), workers, [&](std::size_t f) {
    const auto& hold = folds[f];
    Dataset train;
    train.X.resize(data.n() - static_cast<Eigen::Index>(hold.size()), data.p());
    train.y.resize(train.X.rows());
    std::vector<char> held(data.n(), 0);
    for (int i : hold) held[i] = 1;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (held[i]) continue;
      train.X.row(r) = data.X.row(i);
      train.y[r] = data.y[i];
      ++r;
    }
    Eigen::VectorXd beta = fitter(train);
    if (beta.size() != data.p()) throw ShapeError("fitter returned wrong length");
    double ss = 0.0;
    for (int i : hold) {
      double resid = data.y[i] - data.X.row(i).dot(beta);
      ss += resid * resid;
    }
    est.per_fold[f] = ss / static_cast<double>(hold.size());
  });
  double total = 0.0;
  for (double v : est.per_fold) total += v;
  est.sigma2_hat = total / static_cast<double>(est.per_fold.size());
  return est;
}

}  // namespace ralasso
