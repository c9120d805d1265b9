// Command-line front end: fit / mean / cov / sigma2 / tune / simulate.
// Exit codes: 0 success, 2 input error, 3 calibration error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ralasso/io.hpp"
#include "ralasso/robust_mean.hpp"
#include "ralasso/version.hpp"

namespace {

using namespace ralasso;

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("RML_SEED");
  if (!env) return flag_seed;
  std::string s(env);
  if (s.empty()) throw std::invalid_argument("RML_SEED is empty");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9')
      throw std::invalid_argument("RML_SEED must be a non-negative integer, got '"
                                  + s + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

void emit(const std::string& out_path, const json& j) {
  std::string text = dump_json(j);
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
}

json provenance(const std::string& command, const json& flags) {
  return json{{"tool", "ralasso"},
              {"version", kVersion},
              {"command", command},
              {"rng", kRngName},
              {"flags", flags}};
}

std::vector<double> eigen_to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

// Flags shared by every command that runs the solver.
struct SolverFlags {
  double rho = 1e6;
  std::optional<double> gamma_u;
  int max_iters = 10000;
  double tol = 1e-10;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "l1 feasibility radius");
    cmd->add_option_function<double>(
        "--gamma-u", [this](double g) { gamma_u = g; },
        "fixed step weight (default: estimated from the design)");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--tol", tol, "objective-decrease stopping tolerance");
  }
  FitConfig config() const {
    FitConfig cfg;
    cfg.rho = rho;
    cfg.gamma_u = gamma_u;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    return cfg;
  }
  void record(json& flags) const {
    flags["rho"] = rho;
    flags["gamma_u"] = gamma_u ? json(*gamma_u) : json(nullptr);
    flags["max_iters"] = max_iters;
    flags["tol"] = tol;
  }
};

struct PointFlags {
  std::string method;
  double lambda = 0.0;
  std::optional<double> alpha;
  double delta = 1e-2;

  Method parse_method(bool allow_oracle = false) const {
    Method m = method_from_string(method);
    if (!allow_oracle && m == Method::Oracle)
      throw std::invalid_argument("method 'oracle' is not valid here");
    return m;
  }
  GridPoint point(Method m) const {
    GridPoint pt{lambda, 0.0};
    if (m == Method::RaLasso || m == Method::CatoniLasso) {
      if (!alpha)
        throw std::invalid_argument(std::string(method_name(m))
                                    + " requires --alpha");
      pt.alpha = *alpha;
    }
    return pt;
  }
};

int cmd_fit(const std::string& data_path, const PointFlags& pf,
            const SolverFlags& sf, const std::string& out_path) {
  Method m = pf.parse_method();
  Dataset data = read_dataset_csv(data_path);
  GridPoint pt = pf.point(m);
  FitConfig cfg = sf.config();
  cfg.lambda = pt.lambda;

  FitResult res;
  switch (m) {
    case Method::Lasso: res = fit_lasso(data, pt.lambda, cfg); break;
    case Method::RLasso: res = fit_r_lasso(data, pt.lambda, cfg, pf.delta); break;
    case Method::RaLasso: res = fit_ra_lasso(data, pt.alpha, pt.lambda, cfg); break;
    case Method::CatoniLasso:
      res = fit_catoni_lasso(data, pt.alpha, pt.lambda, cfg);
      break;
    default: throw std::invalid_argument("unsupported method");
  }

  bool has_alpha = m == Method::RaLasso || m == Method::CatoniLasso;
  json flags{{"data", data_path}, {"method", pf.method}, {"lambda", pt.lambda},
             {"alpha", has_alpha ? json(pt.alpha) : json(nullptr)}};
  if (m == Method::RLasso) flags["delta"] = pf.delta;
  sf.record(flags);

  json j;
  j["provenance"] = provenance("fit", flags);
  j["method"] = pf.method;
  j["lambda"] = pt.lambda;
  j["alpha"] = has_alpha ? json(pt.alpha) : json(nullptr);
  j["beta"] = eigen_to_vec(res.beta);
  j["objective_trace"] = res.objective_trace;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  emit(out_path, j);
  return 0;
}

int cmd_mean(const std::string& data_path, double delta, double v,
             std::optional<double> alpha, std::optional<double> root_tol,
             const std::string& out_path) {
  Eigen::VectorXd samples = read_column_csv(data_path);
  RaMeanConfig cfg;
  cfg.delta = delta;
  cfg.v = v;
  cfg.alpha = alpha;
  cfg.root_tol = root_tol;
  double est = ra_mean(samples, cfg);
  long n = samples.size();

  json flags{{"data", data_path}, {"delta", delta}, {"v", v},
             {"alpha", alpha ? json(*alpha) : json(nullptr)},
             {"root_tol", root_tol ? json(*root_tol) : json(nullptr)}};
  json j;
  j["provenance"] = provenance("mean", flags);
  j["estimate"] = est;
  j["n"] = n;
  j["alpha"] = alpha ? *alpha : choose_alpha(n, delta, v);
  j["delta"] = delta;
  j["v"] = v;
  j["radius"] = concentration_radius(n, delta, v);
  j["applicable"] = deviation_bound_applicable(n, delta);
  j["min_n"] = deviation_bound_min_n(delta);
  emit(out_path, j);
  return 0;
}

int cmd_cov(const std::string& data_path, std::optional<double> delta,
            std::optional<double> v, const std::string& out_path) {
  Eigen::MatrixXd X = read_matrix_csv(data_path);
  RobustCovariance cov = robust_covariance(X, delta, v);

  json flags{{"data", data_path},
             {"delta", delta ? json(*delta) : json(nullptr)},
             {"v", v ? json(*v) : json(nullptr)}};
  json j;
  j["provenance"] = provenance("cov", flags);
  j["n"] = X.rows();
  j["p"] = X.cols();
  j["delta"] = cov.delta;
  j["sigma"] = matrix_rows(cov.sigma);
  j["alpha"] = matrix_rows(cov.alpha);
  j["v"] = matrix_rows(cov.v);
  j["radius"] = matrix_rows(cov.radius);
  emit(out_path, j);
  return 0;
}

int cmd_sigma2(const std::string& data_path, const PointFlags& pf,
               const SolverFlags& sf, int k, std::uint64_t seed, int workers,
               const std::string& out_path) {
  Method m = pf.parse_method();
  Dataset data = read_dataset_csv(data_path);
  GridPoint pt = pf.point(m);
  FitConfig cfg = sf.config();
  seed = resolve_seed(seed);

  Eigen::VectorXd unused;
  Fitter fitter = [&](const Dataset& train) {
    return fit_method(train, m, pt, cfg, unused);
  };
  VarianceEstimate est = estimate_sigma2_cv(data, k, fitter, seed, workers);

  bool has_alpha = m == Method::RaLasso || m == Method::CatoniLasso;
  json flags{{"data", data_path}, {"method", pf.method}, {"lambda", pt.lambda},
             {"alpha", has_alpha ? json(pt.alpha) : json(nullptr)},
             {"k", k}, {"seed", seed}};
  sf.record(flags);
  json j;
  j["provenance"] = provenance("sigma2", flags);
  j["sigma2_hat"] = est.sigma2_hat;
  j["k"] = k;
  j["per_fold"] = est.per_fold;
  j["method"] = pf.method;
  j["lambda"] = pt.lambda;
  j["alpha"] = has_alpha ? json(pt.alpha) : json(nullptr);
  emit(out_path, j);
  return 0;
}

struct TuneFlags {
  std::string data_path;
  std::string scenario_path;
  std::string method;
  std::vector<double> lambda_grid;
  std::vector<double> alpha_grid;
  int k = 5;
  std::string cv_loss = "squared";
  int n_validation = 0;  // 0 = take it from the scenario
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_path;
};

int cmd_tune(const TuneFlags& tf, const SolverFlags& sf) {
  Method m = method_from_string(tf.method);
  if (m == Method::Oracle)
    throw std::invalid_argument("method 'oracle' is not tuned");
  if (tf.data_path.empty() == tf.scenario_path.empty())
    throw std::invalid_argument("give exactly one of DATA.csv or --scenario");
  FitConfig cfg = sf.config();
  std::uint64_t seed = resolve_seed(tf.seed);

  TuningGrid grid;
  TuneResult res;
  std::vector<GridPoint> points;
  std::string mode;
  if (!tf.scenario_path.empty()) {
    mode = "grid";
    json sj;
    try {
      std::ifstream f(tf.scenario_path);
      if (!f) throw CsvError("cannot open '" + tf.scenario_path + "'");
      sj = json::parse(f);
    } catch (const json::parse_error& e) {
      throw CsvError("'" + tf.scenario_path + "': " + e.what());
    }
    Scenario sc = scenario_from_json(sj);
    sc.seed = seed;
    grid = sc.resolved_grid();
    if (!tf.lambda_grid.empty()) grid.lambdas = tf.lambda_grid;
    if (!tf.alpha_grid.empty()) grid.alphas = tf.alpha_grid;
    if (tf.n_validation > 0) grid.n_validation = tf.n_validation;
    sc.grid = grid;
    points = expand_grid(m, grid);
    res = tune_grid(sc, m, points, cfg, tf.workers);
  } else {
    mode = "cv";
    Dataset data = read_dataset_csv(tf.data_path);
    grid = default_grid(static_cast<int>(data.n()), static_cast<int>(data.p()));
    if (!tf.lambda_grid.empty()) grid.lambdas = tf.lambda_grid;
    if (!tf.alpha_grid.empty()) grid.alphas = tf.alpha_grid;
    CvLoss loss;
    if (tf.cv_loss == "squared") loss = CvLoss::Squared;
    else if (tf.cv_loss == "absolute") loss = CvLoss::Absolute;
    else throw std::invalid_argument("--cv-loss must be 'squared' or 'absolute'");
    points = expand_grid(m, grid);
    res = tune_cv(data, m, points, tf.k, loss, cfg, seed, tf.workers);
  }

  bool has_alpha = m == Method::RaLasso || m == Method::CatoniLasso;
  json flags{{"method", tf.method}, {"mode", mode}, {"seed", seed},
             {"lambda_grid", grid.lambdas}};
  if (has_alpha) flags["alpha_grid"] = grid.alphas;
  if (mode == "cv") {
    flags["data"] = tf.data_path;
    flags["k"] = tf.k;
    flags["cv_loss"] = tf.cv_loss;
  } else {
    flags["scenario"] = tf.scenario_path;
    flags["n_validation"] = grid.n_validation;
  }
  sf.record(flags);

  json scores = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    json row{{"lambda", points[i].lambda}};
    if (has_alpha) row["alpha"] = points[i].alpha;
    row["score"] = res.scores[i];
    scores.push_back(row);
  }
  json j;
  j["provenance"] = provenance("tune", flags);
  j["mode"] = mode;
  j["method"] = tf.method;
  j["best_lambda"] = res.best.lambda;
  j["best_alpha"] = has_alpha ? json(res.best.alpha) : json(nullptr);
  j["scores"] = scores;
  emit(tf.out_path, j);
  return 0;
}

struct SimulateFlags {
  std::string scenario_path;
  std::string out_prefix;
  std::vector<std::string> methods = {"lasso", "r-lasso", "ra-lasso", "oracle"};
  int workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

int cmd_simulate(const SimulateFlags& mf, const SolverFlags& sf) {
  json sj;
  try {
    std::ifstream f(mf.scenario_path);
    if (!f) throw CsvError("cannot open '" + mf.scenario_path + "'");
    sj = json::parse(f);
  } catch (const json::parse_error& e) {
    throw CsvError("'" + mf.scenario_path + "': " + e.what());
  }
  Scenario sc = scenario_from_json(sj);
  if (mf.replications) sc.replications = *mf.replications;
  const char* env_seed = std::getenv("RML_SEED");
  if (mf.seed || env_seed) sc.seed = resolve_seed(mf.seed.value_or(sc.seed));

  std::vector<Method> methods;
  for (const auto& name : mf.methods) methods.push_back(method_from_string(name));
  FitConfig cfg = sf.config();

  MetricsReport report = run_scenario(sc, methods, cfg, mf.workers);

  TuningGrid grid = sc.resolved_grid();
  std::vector<std::string> lam_strs, alpha_strs;
  for (double l : grid.lambdas) lam_strs.push_back(fmt17(l));
  for (double a : grid.alphas) alpha_strs.push_back(fmt17(a));
  std::vector<std::string> header = {
      std::string("ralasso v") + kVersion + " simulate",
      std::string("rng=") + kRngName + " seed=" + std::to_string(sc.seed),
      std::string("model=") + model_name(sc.model) + " error="
          + error_law_name(sc.error) + " n=" + std::to_string(sc.n) + " p="
          + std::to_string(sc.p) + " replications=" + std::to_string(sc.replications),
      "grid_lambda=" + join(lam_strs, ",") + " grid_alpha=" + join(alpha_strs, ",")
          + " n_validation=" + std::to_string(grid.n_validation),
      "methods=" + join(mf.methods, ","),
  };

  json flags{{"scenario", mf.scenario_path}, {"methods", mf.methods},
             {"replications", sc.replications}, {"seed", sc.seed}};
  sf.record(flags);
  json j;
  j["provenance"] = provenance("simulate", flags);
  j["scenario"] = scenario_to_json(sc);
  json rep_json = report_to_json(report);
  j["results"] = rep_json["results"];
  j["relative_gain"] = rep_json["relative_gain"];

  write_file(mf.out_prefix + ".csv", report_to_csv(report, header));
  write_file(mf.out_prefix + ".json", dump_json(j));
  std::cout << "wrote " << mf.out_prefix << ".csv and " << mf.out_prefix << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust approximation lasso toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ralasso ") + ralasso::kVersion);

  // fit
  auto* fit = app.add_subcommand("fit", "fit one penalized regression");
  std::string fit_data, fit_out;
  PointFlags fit_pf;
  SolverFlags fit_sf;
  fit->add_option("data", fit_data, "CSV with a 'y' column plus features")
      ->required();
  fit->add_option("--method", fit_pf.method,
                  "lasso | r-lasso | ra-lasso | catoni-lasso")
      ->required();
  fit->add_option("--lambda", fit_pf.lambda, "penalty level")->required();
  fit->add_option_function<double>(
      "--alpha", [&fit_pf](double a) { fit_pf.alpha = a; },
      "robustification parameter (ra-lasso, catoni-lasso)");
  fit->add_option("--delta", fit_pf.delta, "smoothing half-width (r-lasso)");
  fit->add_option("--out", fit_out, "output JSON path (default: stdout)");
  fit_sf.attach(fit);

  // mean
  auto* mean = app.add_subcommand("mean", "influence-truncated mean of one column");
  std::string mean_data, mean_out;
  double mean_delta = 0.05, mean_v = 1.0;
  std::optional<double> mean_alpha, mean_root_tol;
  mean->add_option("data", mean_data, "single-column CSV")->required();
  mean->add_option("--delta", mean_delta, "confidence parameter in (0,1)");
  mean->add_option("--v", mean_v, "standard-deviation bound");
  mean->add_option_function<double>(
      "--alpha", [&mean_alpha](double a) { mean_alpha = a; },
      "explicit truncation level (default: calibrated)");
  mean->add_option_function<double>(
      "--root-tol", [&mean_root_tol](double t) { mean_root_tol = t; },
      "bisection tolerance");
  mean->add_option("--out", mean_out, "output JSON path (default: stdout)");

  // cov
  auto* cov = app.add_subcommand("cov", "entrywise robust second-moment matrix");
  std::string cov_data, cov_out;
  std::optional<double> cov_delta, cov_v;
  cov->add_option("data", cov_data, "numeric CSV, one column per coordinate")
      ->required();
  cov->add_option_function<double>(
      "--delta", [&cov_delta](double d) { cov_delta = d; },
      "confidence parameter (default: min(p^-3, 0.05))");
  cov->add_option_function<double>(
      "--v", [&cov_v](double v) { cov_v = v; },
      "shared deviation scale (default: per-pair sample sd)");
  cov->add_option("--out", cov_out, "output JSON path (default: stdout)");

  // sigma2
  auto* sig = app.add_subcommand("sigma2", "cross-validated noise variance");
  std::string sig_data, sig_out;
  PointFlags sig_pf;
  SolverFlags sig_sf;
  int sig_k = 5, sig_workers = 1;
  std::uint64_t sig_seed = 0;
  sig->add_option("data", sig_data, "CSV with a 'y' column plus features")
      ->required();
  sig->add_option("--method", sig_pf.method,
                  "lasso | r-lasso | ra-lasso | catoni-lasso")
      ->required();
  sig->add_option("--lambda", sig_pf.lambda, "penalty level")->required();
  sig->add_option_function<double>(
      "--alpha", [&sig_pf](double a) { sig_pf.alpha = a; },
      "robustification parameter (ra-lasso, catoni-lasso)");
  sig->add_option("--delta", sig_pf.delta, "smoothing half-width (r-lasso)");
  sig->add_option("--k", sig_k, "number of folds");
  sig->add_option("--seed", sig_seed, "fold-shuffle seed (RML_SEED overrides)");
  sig->add_option("--workers", sig_workers, "worker threads");
  sig->add_option("--out", sig_out, "output JSON path (default: stdout)");
  sig_sf.attach(sig);

  // tune
  auto* tune = app.add_subcommand("tune", "grid search for lambda (and alpha)");
  TuneFlags tf;
  SolverFlags tune_sf;
  tune->add_option("data", tf.data_path, "dataset CSV for K-fold CV tuning");
  tune->add_option("--scenario", tf.scenario_path,
                   "scenario JSON for validation-set tuning");
  tune->add_option("--method", tf.method,
                   "lasso | r-lasso | ra-lasso | catoni-lasso")
      ->required();
  tune->add_option("--lambda-grid", tf.lambda_grid, "comma-separated lambdas")
      ->delimiter(',');
  tune->add_option("--alpha-grid", tf.alpha_grid, "comma-separated alphas")
      ->delimiter(',');
  tune->add_option("--k", tf.k, "CV folds (dataset mode)");
  tune->add_option("--cv-loss", tf.cv_loss, "squared | absolute (dataset mode)");
  tune->add_option("--n-validation", tf.n_validation,
                   "validation datasets (scenario mode)");
  tune->add_option("--seed", tf.seed, "seed (RML_SEED overrides)");
  tune->add_option("--workers", tf.workers, "worker threads");
  tune->add_option("--out", tf.out_path, "output JSON path (default: stdout)");
  tune_sf.attach(tune);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a simulation scenario");
  SimulateFlags mf;
  SolverFlags sim_sf;
  sim->add_option("--scenario", mf.scenario_path, "scenario JSON")->required();
  sim->add_option("--out", mf.out_prefix, "output prefix (.csv/.json appended)")
      ->required();
  sim->add_option("--methods", mf.methods, "comma-separated method list")
      ->delimiter(',');
  sim->add_option("--workers", mf.workers, "worker threads");
  sim->add_option_function<std::uint64_t>(
      "--seed", [&mf](std::uint64_t s) { mf.seed = s; },
      "override the scenario seed (RML_SEED overrides both)");
  sim->add_option_function<int>(
      "--replications", [&mf](int r) { mf.replications = r; },
      "override the scenario replication count");
  sim_sf.attach(sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_data, fit_pf, fit_sf, fit_out);
    if (mean->parsed())
      return cmd_mean(mean_data, mean_delta, mean_v, mean_alpha, mean_root_tol,
                      mean_out);
    if (cov->parsed()) return cmd_cov(cov_data, cov_delta, cov_v, cov_out);
    if (sig->parsed())
      return cmd_sigma2(sig_data, sig_pf, sig_sf, sig_k, sig_seed, sig_workers,
                        sig_out);
    if (tune->parsed()) return cmd_tune(tf, tune_sf);
    if (sim->parsed()) return cmd_simulate(mf, sim_sf);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const ralasso::CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ralasso::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
