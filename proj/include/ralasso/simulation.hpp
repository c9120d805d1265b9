#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ralasso/regression.hpp"
#include "ralasso/rng.hpp"

namespace ralasso {

// Noise laws, each shifted to mean zero by an analytic centering constant.
// Zero is a degenerate law (eps == 0) kept for exact-recovery checks.
enum class ErrorLawKind { Normal04, TwoT3, MixNormal, LogNormal, Weibull, Zero };

// The constant subtracted from the raw draw so the law has mean zero.
double error_centering(ErrorLawKind kind);
// One centered draw.
double sample_error(ErrorLawKind kind, Philox4x32& rng);

enum class ModelKind { Homoscedastic, Heteroscedastic };

enum class Method { Lasso, RLasso, RaLasso, CatoniLasso, Oracle };

struct TuningGrid {
  std::vector<double> lambdas;
  std::vector<double> alphas;
  int n_validation = 100;
};

// Default search grid: 15 log-spaced lambdas on [0.01, 3] * sqrt(log p / n)
// and alphas {0.05, 0.1, 0.2, 0.5, 1, 2, 5}.
TuningGrid default_grid(int n, int p);

// First min(20, p) coefficients equal to 3, the rest zero.
Eigen::VectorXd default_beta_star(int p);

struct Scenario {
  ModelKind model = ModelKind::Homoscedastic;
  ErrorLawKind error = ErrorLawKind::Normal04;
  int n = 100;
  int p = 400;
  Eigen::VectorXd beta_star;  // empty = default_beta_star(p)
  int replications = 100;
  std::uint64_t seed = 0;
  TuningGrid grid;  // empty lambda list = default_grid(n, p)

  Eigen::VectorXd resolved_beta_star() const;
  TuningGrid resolved_grid() const;
  // sqrt(3) * ||beta_star||_2^2, the heteroscedastic normalizer; it makes the
  // conditional variance multiplier (c^-1 (x'beta*)^2)^2 have unit mean.
  double heteroscedastic_c() const;
};

// Design rows are iid standard normal (drawn row-major), then one centered
// error per observation; heteroscedastic responses scale the error by
// c^-1 (x_i'beta*)^2. Streams are keyed by (purpose, rep_index), so any
// replication can be generated independently of the others.
Dataset generate(const Scenario& sc, std::uint32_t rep_index,
                 StreamPurpose purpose = StreamPurpose::Evaluate);

struct Metrics {
  double l2 = 0.0;  // ||beta_hat - beta_star||_2
  double l1 = 0.0;  // ||beta_hat - beta_star||_1
  int fp = 0;       // selected (|beta_hat_j| > zero_tol) where beta_star_j == 0
  int fn = 0;       // missed where beta_star_j != 0
};

Metrics compute_metrics(const Eigen::VectorXd& beta_hat,
                        const Eigen::VectorXd& beta_star, double zero_tol = 1e-8);

// (err_method - err_oracle) / (err_ra - err_oracle). Throws
// DegenerateGainError unless the denominator is positive (beyond 1e-12):
// the gain only makes sense when the oracle beats the RA estimate.
double relative_gain(double err_method, double err_ra, double err_oracle);

struct GridPoint {
  double lambda = 0.0;
  double alpha = 0.0;  // ignored by lambda-only methods
};

// Cartesian lambda x alpha points for RaLasso/CatoniLasso, lambda-only points
// otherwise (Oracle has no grid and yields an empty list).
std::vector<GridPoint> expand_grid(Method m, const TuningGrid& grid);

struct TuneResult {
  GridPoint best;
  std::vector<double> scores;  // mean score per grid point, same order as input
};

// Picks the grid point minimizing the mean L2 distance to beta_star over
// n_validation freshly generated validation datasets (the same datasets for
// every point). Ties prefer the smaller lambda, then the smaller alpha.
TuneResult tune_grid(const Scenario& sc, Method m, const std::vector<GridPoint>& points,
                     const FitConfig& cfg = {}, int workers = 1);

enum class CvLoss { Squared, Absolute };

// K-fold cross-validated prediction error over the grid, for data without a
// known beta_star. Same fold scheme and tie-breaking as above.
TuneResult tune_cv(const Dataset& data, Method m, const std::vector<GridPoint>& points,
                   int k, CvLoss loss, const FitConfig& cfg = {},
                   std::uint64_t seed = 0, int workers = 1);

// One fit of `m` at the given grid point; Oracle ignores the point and
// regresses on the support of beta_star.
Eigen::VectorXd fit_method(const Dataset& data, Method m, const GridPoint& pt,
                           const FitConfig& cfg, const Eigen::VectorXd& beta_star);

struct MethodSummary {
  Method method = Method::Lasso;
  GridPoint tuned;          // lambda/alpha actually used (zeros for Oracle)
  double mean_l2 = 0.0;
  double mean_l1 = 0.0;
  double mean_fp = 0.0;
  double mean_fn = 0.0;
};

struct MetricsReport {
  std::vector<MethodSummary> methods;  // in the requested order
  // Relative gains of RaLasso vs the named competitor; absent when the needed
  // methods are missing or the denominator is degenerate.
  std::optional<double> rg_l2_vs_lasso, rg_l1_vs_lasso;
  std::optional<double> rg_l2_vs_r_lasso, rg_l1_vs_r_lasso;
};

// Tunes every method on the scenario grid (points with a single candidate are
// used directly), fits all replications, and aggregates mean metrics and
// relative gains. Evaluation fits walk the same descending-lambda ladder the
// tuner swept (within the selected alpha group), warm-starting each stage, so
// the reported errors measure exactly the estimator the validation scores
// selected. Replications run in parallel; aggregation order is fixed by
// replication index, so the report is identical for any worker count. A failed
// replication aborts the run with the scenario seed and replication index in
// the error message.
MetricsReport run_scenario(const Scenario& sc, const std::vector<Method>& methods,
                           const FitConfig& cfg = {}, int workers = 1);

const char* method_name(Method m);
Method method_from_string(const std::string& name);
const char* error_law_name(ErrorLawKind kind);
ErrorLawKind error_law_from_string(const std::string& name);
const char* model_name(ModelKind kind);
ModelKind model_from_string(const std::string& name);

}  // namespace ralasso
