#include "ralasso/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace ralasso {

double error_centering(ErrorLawKind kind) {
  switch (kind) {
    case ErrorLawKind::Normal04: return 0.0;
    case ErrorLawKind::TwoT3: return 0.0;
    case ErrorLawKind::MixNormal: return 3.5;
    case ErrorLawKind::LogNormal: return std::exp(1.72);
    case ErrorLawKind::Weibull: return 0.5 * std::tgamma(1.0 + 1.0 / 0.3);
    case ErrorLawKind::Zero: return 0.0;
  }
  throw std::logic_error("unreachable error law");
}

double sample_error(ErrorLawKind kind, Philox4x32& rng) {
  switch (kind) {
    case ErrorLawKind::Normal04:
      return 2.0 * rng.next_normal();
    case ErrorLawKind::TwoT3: {
      double z = rng.next_normal();
      double a = rng.next_normal(), b = rng.next_normal(), c = rng.next_normal();
      return 2.0 * z / std::sqrt((a * a + b * b + c * c) / 3.0);
    }
    case ErrorLawKind::MixNormal: {
      double u = rng.next_uniform();
      double z = rng.next_normal();
      double draw = u < 0.5 ? -1.0 + 2.0 * z : 8.0 + z;
      return draw - 3.5;
    }
    case ErrorLawKind::LogNormal:
      return std::exp(1.0 + 1.2 * rng.next_normal()) - error_centering(kind);
    case ErrorLawKind::Weibull: {
      double u = rng.next_uniform();
      return 0.5 * std::pow(-std::log(1.0 - u), 1.0 / 0.3) - error_centering(kind);
    }
    case ErrorLawKind::Zero:
      return 0.0;
  }
  throw std::logic_error("unreachable error law");
}

TuningGrid default_grid(int n, int p) {
  if (n < 1 || p < 1) throw std::invalid_argument("n and p must be >= 1");
  double scale = std::sqrt(std::log(static_cast<double>(std::max(p, 2))) / n);
  TuningGrid g;
  const int count = 15;
  double lo = std::log(0.01 * scale), hi = std::log(3.0 * scale);
  for (int i = 0; i < count; ++i)
    g.lambdas.push_back(std::exp(lo + (hi - lo) * i / (count - 1)));
  g.alphas = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
  return g;
}

Eigen::VectorXd default_beta_star(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < std::min(20, p); ++j) b[j] = 3.0;
  return b;
}

Eigen::VectorXd Scenario::resolved_beta_star() const {
  if (beta_star.size() == 0) return default_beta_star(p);
  if (beta_star.size() != p)
    throw ShapeError("beta_star has " + std::to_string(beta_star.size())
                     + " entries but p = " + std::to_string(p));
  if (!beta_star.allFinite())
    throw std::invalid_argument("beta_star contains non-finite entries");
  return beta_star;
}

TuningGrid Scenario::resolved_grid() const {
  TuningGrid g = grid;
  TuningGrid def = default_grid(n, p);
  if (g.lambdas.empty()) g.lambdas = def.lambdas;
  if (g.alphas.empty()) g.alphas = def.alphas;
  if (g.n_validation < 1)
    throw std::invalid_argument("n_validation must be >= 1");
  return g;
}

double Scenario::heteroscedastic_c() const {
  return std::sqrt(3.0) * resolved_beta_star().squaredNorm();
}

Dataset generate(const Scenario& sc, std::uint32_t rep_index, StreamPurpose purpose) {
  if (sc.n < 1 || sc.p < 1) throw std::invalid_argument("n and p must be >= 1");
  Eigen::VectorXd beta = sc.resolved_beta_star();
  Philox4x32 rng(sc.seed, make_stream(purpose, 0, rep_index));

  Dataset d;
  d.X.resize(sc.n, sc.p);
  for (int i = 0; i < sc.n; ++i)
    for (int j = 0; j < sc.p; ++j) d.X(i, j) = rng.next_normal();

  Eigen::VectorXd signal = d.X * beta;
  d.y.resize(sc.n);
  if (sc.model == ModelKind::Homoscedastic) {
    for (int i = 0; i < sc.n; ++i) d.y[i] = signal[i] + sample_error(sc.error, rng);
  } else {
    double c = sc.heteroscedastic_c();
    if (!(c > 0.0))
      throw std::invalid_argument("heteroscedastic model needs a nonzero beta_star");
    for (int i = 0; i < sc.n; ++i) {
      double mult = signal[i] * signal[i] / c;
      d.y[i] = signal[i] + mult * sample_error(sc.error, rng);
    }
  }
  return d;
}

Metrics compute_metrics(const Eigen::VectorXd& beta_hat,
                        const Eigen::VectorXd& beta_star, double zero_tol) {
  if (beta_hat.size() != beta_star.size())
    throw ShapeError("beta_hat and beta_star sizes differ");
  if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero_tol must be >= 0");
  Metrics m;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
    double diff = beta_hat[j] - beta_star[j];
    m.l2 += diff * diff;
    m.l1 += std::fabs(diff);
    bool selected = std::fabs(beta_hat[j]) > zero_tol;
    if (selected && beta_star[j] == 0.0) ++m.fp;
    if (!selected && beta_star[j] != 0.0) ++m.fn;
  }
  m.l2 = std::sqrt(m.l2);
  return m;
}

double relative_gain(double err_method, double err_ra, double err_oracle) {
  if (!std::isfinite(err_method) || !std::isfinite(err_ra) || !std::isfinite(err_oracle))
    throw std::invalid_argument("relative_gain arguments must be finite");
  double denom = err_ra - err_oracle;
  if (denom <= 1e-12)
    throw DegenerateGainError("relative gain denominator must be positive");
  return (err_method - err_oracle) / denom;
}

namespace {

bool lambda_only(Method m) { return m == Method::Lasso || m == Method::RLasso; }

void validate_points(Method m, const std::vector<GridPoint>& points) {
  if (points.empty()) throw std::invalid_argument("tuning grid is empty");
  for (const auto& pt : points) {
    if (!(pt.lambda >= 0.0) || !std::isfinite(pt.lambda))
      throw std::invalid_argument("grid lambda must be finite and >= 0");
    if (!lambda_only(m) && (!(pt.alpha > 0.0) || !std::isfinite(pt.alpha)))
      throw std::invalid_argument("grid alpha must be positive and finite");
  }
}

// Sweep order for warm starts: indices grouped by alpha (order of first
// appearance), lambda descending within each group. Purely an acceleration;
// scores and the winner do not depend on it.
std::vector<std::vector<std::size_t>> sweep_plan(Method m,
                                                 const std::vector<GridPoint>& points) {
  std::vector<std::vector<std::size_t>> groups;
  if (lambda_only(m)) {
    groups.emplace_back(points.size());
    std::iota(groups[0].begin(), groups[0].end(), 0u);
  } else {
    std::map<double, std::size_t> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto [it, inserted] = seen.emplace(points[i].alpha, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  }
  for (auto& g : groups)
    std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) {
      return points[a].lambda > points[b].lambda;
    });
  return groups;
}

std::size_t argmin_point(const std::vector<GridPoint>& points,
                         const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) { best = i; continue; }
    if (scores[i] == scores[best]) {
      if (points[i].lambda < points[best].lambda
          || (points[i].lambda == points[best].lambda
              && points[i].alpha < points[best].alpha))
        best = i;
    }
  }
  return best;
}

}  // namespace

std::vector<GridPoint> expand_grid(Method m, const TuningGrid& grid) {
  std::vector<GridPoint> points;
  if (m == Method::Oracle) return points;
  if (grid.lambdas.empty()) throw std::invalid_argument("grid has no lambdas");
  if (lambda_only(m)) {
    for (double l : grid.lambdas) points.push_back({l, 0.0});
  } else {
    if (grid.alphas.empty()) throw std::invalid_argument("grid has no alphas");
    for (double a : grid.alphas)
      for (double l : grid.lambdas) points.push_back({l, a});
  }
  validate_points(m, points);
  return points;
}

Eigen::VectorXd fit_method(const Dataset& data, Method m, const GridPoint& pt,
                           const FitConfig& cfg, const Eigen::VectorXd& beta_star) {
  switch (m) {
    case Method::Lasso: return fit_lasso(data, pt.lambda, cfg).beta;
    case Method::RLasso: return fit_r_lasso(data, pt.lambda, cfg).beta;
    case Method::RaLasso: return fit_ra_lasso(data, pt.alpha, pt.lambda, cfg).beta;
    case Method::CatoniLasso:
      return fit_catoni_lasso(data, pt.alpha, pt.lambda, cfg).beta;
    case Method::Oracle: {
      std::vector<int> support;
      for (Eigen::Index j = 0; j < beta_star.size(); ++j)
        if (beta_star[j] != 0.0) support.push_back(static_cast<int>(j));
      return fit_oracle(data, support);
    }
  }
  throw std::logic_error("unreachable method");
}

TuneResult tune_grid(const Scenario& sc, Method m, const std::vector<GridPoint>& points,
                     const FitConfig& cfg, int workers) {
  if (m == Method::Oracle)
    throw std::invalid_argument("oracle is not tuned");
  validate_points(m, points);
  const Eigen::VectorXd beta_star = sc.resolved_beta_star();
  const int nv = sc.resolved_grid().n_validation;

  std::vector<Dataset> val(nv);
  for (int v = 0; v < nv; ++v)
    val[v] = generate(sc, static_cast<std::uint32_t>(v), StreamPurpose::Validation);

  auto plan = sweep_plan(m, points);
  std::vector<std::vector<double>> errs(points.size(), std::vector<double>(nv, 0.0));
  detail::parallel_for(static_cast<std::size_t>(nv), workers, [&](std::size_t v) {
    for (const auto& group : plan) {
      FitConfig local = cfg;
      for (std::size_t idx : group) {
        Eigen::VectorXd b = fit_method(val[v], m, points[idx], local, beta_star);
        errs[idx][v] = (b - beta_star).norm();
        local.beta0 = b;
      }
    }
  });

  TuneResult res;
  res.scores.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double s = 0.0;
    for (int v = 0; v < nv; ++v) s += errs[i][v];
    res.scores[i] = s / nv;
  }
  res.best = points[argmin_point(points, res.scores)];
  return res;
}

TuneResult tune_cv(const Dataset& data, Method m, const std::vector<GridPoint>& points,
                   int k, CvLoss loss, const FitConfig& cfg, std::uint64_t seed,
                   int workers) {
  if (m == Method::Oracle) throw std::invalid_argument("oracle is not tuned");
  validate_points(m, points);
  data.validate();
  auto folds = make_folds(static_cast<int>(data.n()), k, seed);
  auto plan = sweep_plan(m, points);
  const Eigen::VectorXd unused;  // no beta_star for CV tuning

  // fold_sums[f][i]: summed held-out prediction loss of point i on fold f.
  std::vector<std::vector<double>> fold_sums(folds.size(),
                                             std::vector<double>(points.size(), 0.0));
  detail::parallel_for(folds.size(), workers, [&](std::size_t f) {
    const auto& hold = folds[f];
    std::vector<char> held(data.n(), 0);
    for (int i : hold) held[i] = 1;
    Dataset train;
    train.X.resize(data.n() - static_cast<Eigen::Index>(hold.size()), data.p());
    train.y.resize(train.X.rows());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (held[i]) continue;
      train.X.row(r) = data.X.row(i);
      train.y[r] = data.y[i];
      ++r;
    }
    for (const auto& group : plan) {
      FitConfig local = cfg;
      for (std::size_t idx : group) {
        Eigen::VectorXd b = fit_method(train, m, points[idx], local, unused);
        double s = 0.0;
        for (int i : hold) {
          double e = data.y[i] - data.X.row(i).dot(b);
          s += loss == CvLoss::Squared ? e * e : std::fabs(e);
        }
        fold_sums[f][idx] = s;
        local.beta0 = b;
      }
    }
  });

  TuneResult res;
  res.scores.assign(points.size(), 0.0);
  for (std::size_t f = 0; f < folds.size(); ++f)
    for (std::size_t i = 0; i < points.size(); ++i) res.scores[i] += fold_sums[f][i];
  for (auto& s : res.scores) s /= static_cast<double>(data.n());
  res.best = points[argmin_point(points, res.scores)];
  return res;
}

MetricsReport run_scenario(const Scenario& sc, const std::vector<Method>& methods,
                           const FitConfig& cfg, int workers) {
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t j = i + 1; j < methods.size(); ++j)
      if (methods[i] == methods[j])
        throw std::invalid_argument("duplicate method in request");
  if (sc.replications < 1) throw std::invalid_argument("replications must be >= 1");

  const Eigen::VectorXd beta_star = sc.resolved_beta_star();
  const TuningGrid grid = sc.resolved_grid();

  MetricsReport report;
  report.methods.resize(methods.size());
  // Evaluation refits along the same descending-lambda ladder the tuner swept
  // (within the selected alpha group), warm-starting each stage. The
  // validation scores measured exactly this path iterate; a cold fit at a
  // small selected lambda can stall far from it under the iteration cap, so
  // evaluating anything else would score one estimator and report another.
  std::vector<std::vector<GridPoint>> ladders(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    report.methods[mi].method = methods[mi];
    if (methods[mi] == Method::Oracle) {
      ladders[mi].push_back(GridPoint{});
      continue;
    }
    auto points = expand_grid(methods[mi], grid);
    const GridPoint tuned =
        points.size() == 1 ? points[0]
                           : tune_grid(sc, methods[mi], points, cfg, workers).best;
    report.methods[mi].tuned = tuned;
    for (const GridPoint& pt : points)
      if ((lambda_only(methods[mi]) || pt.alpha == tuned.alpha)
          && pt.lambda >= tuned.lambda)
        ladders[mi].push_back(pt);
    std::stable_sort(ladders[mi].begin(), ladders[mi].end(),
                     [](const GridPoint& a, const GridPoint& b) {
                       return a.lambda > b.lambda;
                     });
  }

  std::vector<std::vector<Metrics>> all(sc.replications,
                                        std::vector<Metrics>(methods.size()));
  detail::parallel_for(static_cast<std::size_t>(sc.replications), workers,
                       [&](std::size_t rep) {
    try {
      Dataset d = generate(sc, static_cast<std::uint32_t>(rep));
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        FitConfig local = cfg;
        Eigen::VectorXd b;
        for (const GridPoint& pt : ladders[mi]) {
          b = fit_method(d, methods[mi], pt, local, beta_star);
          local.beta0 = b;
        }
        all[rep][mi] = compute_metrics(b, beta_star);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("replication " + std::to_string(rep) + " (seed "
                               + std::to_string(sc.seed) + ") failed: " + e.what());
    }
  });

  const double nrep = static_cast<double>(sc.replications);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    double l2 = 0.0, l1 = 0.0, fp = 0.0, fn = 0.0;
    for (int rep = 0; rep < sc.replications; ++rep) {
      l2 += all[rep][mi].l2;
      l1 += all[rep][mi].l1;
      fp += all[rep][mi].fp;
      fn += all[rep][mi].fn;
    }
    report.methods[mi].mean_l2 = l2 / nrep;
    report.methods[mi].mean_l1 = l1 / nrep;
    report.methods[mi].mean_fp = fp / nrep;
    report.methods[mi].mean_fn = fn / nrep;
  }

  const MethodSummary* ra = nullptr;
  const MethodSummary* oracle = nullptr;
  const MethodSummary* lasso = nullptr;
  const MethodSummary* rlasso = nullptr;
  for (const auto& s : report.methods) {
    if (s.method == Method::RaLasso) ra = &s;
    if (s.method == Method::Oracle) oracle = &s;
    if (s.method == Method::Lasso) lasso = &s;
    if (s.method == Method::RLasso) rlasso = &s;
  }
  auto try_gain = [](double em, double er, double eo) -> std::optional<double> {
    try {
      return relative_gain(em, er, eo);
    } catch (const DegenerateGainError&) {
      return std::nullopt;
    }
  };
  if (ra && oracle && lasso) {
    report.rg_l2_vs_lasso = try_gain(lasso->mean_l2, ra->mean_l2, oracle->mean_l2);
    report.rg_l1_vs_lasso = try_gain(lasso->mean_l1, ra->mean_l1, oracle->mean_l1);
  }
  if (ra && oracle && rlasso) {
    report.rg_l2_vs_r_lasso = try_gain(rlasso->mean_l2, ra->mean_l2, oracle->mean_l2);
    report.rg_l1_vs_r_lasso = try_gain(rlasso->mean_l1, ra->mean_l1, oracle->mean_l1);
  }
  return report;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Lasso: return "lasso";
    case Method::RLasso: return "r-lasso";
    case Method::RaLasso: return "ra-lasso";
    case Method::CatoniLasso: return "catoni-lasso";
    case Method::Oracle: return "oracle";
  }
  throw std::logic_error("unreachable method");
}

Method method_from_string(const std::string& name) {
  if (name == "lasso") return Method::Lasso;
  if (name == "r-lasso") return Method::RLasso;
  if (name == "ra-lasso") return Method::RaLasso;
  if (name == "catoni-lasso") return Method::CatoniLasso;
  if (name == "oracle") return Method::Oracle;
  throw std::invalid_argument(
      "unknown method '" + name
      + "' (expected lasso, r-lasso, ra-lasso, catoni-lasso, or oracle)");
}

const char* error_law_name(ErrorLawKind kind) {
  switch (kind) {
    case ErrorLawKind::Normal04: return "normal04";
    case ErrorLawKind::TwoT3: return "2t3";
    case ErrorLawKind::MixNormal: return "mixn";
    case ErrorLawKind::LogNormal: return "lognormal";
    case ErrorLawKind::Weibull: return "weibull";
    case ErrorLawKind::Zero: return "zero";
  }
  throw std::logic_error("unreachable error law");
}

ErrorLawKind error_law_from_string(const std::string& name) {
  if (name == "normal04") return ErrorLawKind::Normal04;
  if (name == "2t3") return ErrorLawKind::TwoT3;
  if (name == "mixn") return ErrorLawKind::MixNormal;
  if (name == "lognormal") return ErrorLawKind::LogNormal;
  if (name == "weibull") return ErrorLawKind::Weibull;
  if (name == "zero") return ErrorLawKind::Zero;
  throw std::invalid_argument(
      "unknown error law '" + name
      + "' (expected normal04, 2t3, mixn, lognormal, weibull, or zero)");
}

const char* model_name(ModelKind kind) {
  return kind == ModelKind::Homoscedastic ? "homoscedastic" : "heteroscedastic";
}

ModelKind model_from_string(const std::string& name) {
  if (name == "homoscedastic") return ModelKind::Homoscedastic;
  if (name == "heteroscedastic") return ModelKind::Heteroscedastic;
  throw std::invalid_argument("unknown model '" + name
                              + "' (expected homoscedastic or heteroscedastic)");
}

}  // namespace ralasso
