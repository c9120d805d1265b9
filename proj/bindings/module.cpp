#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "ralasso/io.hpp"
#include "ralasso/robust_mean.hpp"
#include "ralasso/version.hpp"

namespace py = pybind11;
using namespace ralasso;

namespace {

FitConfig make_config(double rho, std::optional<double> gamma_u, int max_iters,
                      double tol, std::optional<Eigen::VectorXd> beta0) {
  FitConfig cfg;
  cfg.rho = rho;
  cfg.gamma_u = gamma_u;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.beta0 = std::move(beta0);
  return cfg;
}

py::dict result_dict(const FitResult& res) {
  py::dict d;
  d["beta"] = res.beta;
  d["objective_trace"] = res.objective_trace;
  d["iterations"] = res.iterations;
  d["converged"] = res.converged;
  return d;
}

Dataset make_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Dataset data{X, y};
  data.validate();
  return data;
}

}  // namespace

PYBIND11_MODULE(_ralasso, m) {
  m.doc() = "Penalized robust regression, truncated means, and simulation tooling";
  m.attr("__version__") = kVersion;
  m.attr("RNG_NAME") = kRngName;

  // pointwise losses
  m.def("huber_value", &huber_value, py::arg("x"), py::arg("alpha"));
  m.def("huber_psi", &huber_psi, py::arg("x"));
  m.def("catoni_psi", &catoni_psi, py::arg("t"));

  // optimizer primitives
  m.def("soft_threshold", &soft_threshold, py::arg("v"), py::arg("tau"));
  m.def("project_l1_ball", &project_l1_ball, py::arg("v"), py::arg("rho"));
  m.def("estimate_gamma_u", &estimate_gamma_u, py::arg("X"));

  // penalized fitters
  m.def(
      "fit_lasso",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam, double rho,
         std::optional<double> gamma_u, int max_iters, double tol,
         std::optional<Eigen::VectorXd> beta0) {
        return result_dict(fit_lasso(make_dataset(X, y), lam,
                                     make_config(rho, gamma_u, max_iters, tol,
                                                 std::move(beta0))));
      },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("rho") = 1e6,
      py::arg("gamma_u") = py::none(), py::arg("max_iters") = 10000,
      py::arg("tol") = 1e-10, py::arg("beta0") = py::none());
  m.def(
      "fit_ra_lasso",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, double lam,
         double rho, std::optional<double> gamma_u, int max_iters, double tol,
         std::optional<Eigen::VectorXd> beta0) {
        return result_dict(fit_ra_lasso(make_dataset(X, y), alpha, lam,
                                        make_config(rho, gamma_u, max_iters, tol,
                                                    std::move(beta0))));
      },
      py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("lam"),
      py::arg("rho") = 1e6, py::arg("gamma_u") = py::none(),
      py::arg("max_iters") = 10000, py::arg("tol") = 1e-10,
      py::arg("beta0") = py::none());
  m.def(
      "fit_catoni_lasso",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, double lam,
         double rho, std::optional<double> gamma_u, int max_iters, double tol,
         std::optional<Eigen::VectorXd> beta0) {
        return result_dict(fit_catoni_lasso(make_dataset(X, y), alpha, lam,
                                            make_config(rho, gamma_u, max_iters, tol,
                                                        std::move(beta0))));
      },
      py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("lam"),
      py::arg("rho") = 1e6, py::arg("gamma_u") = py::none(),
      py::arg("max_iters") = 10000, py::arg("tol") = 1e-10,
      py::arg("beta0") = py::none());
  m.def(
      "fit_r_lasso",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam, double delta,
         double rho, std::optional<double> gamma_u, int max_iters, double tol,
         std::optional<Eigen::VectorXd> beta0) {
        return result_dict(fit_r_lasso(make_dataset(X, y), lam,
                                       make_config(rho, gamma_u, max_iters, tol,
                                                   std::move(beta0)),
                                       delta));
      },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("delta") = 1e-2,
      py::arg("rho") = 1e6, py::arg("gamma_u") = py::none(),
      py::arg("max_iters") = 10000, py::arg("tol") = 1e-10,
      py::arg("beta0") = py::none());
  m.def(
      "fit_oracle",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
         const std::vector<int>& support) {
        return fit_oracle(make_dataset(X, y), support);
      },
      py::arg("X"), py::arg("y"), py::arg("support"));
  m.def("predict", &predict, py::arg("X"), py::arg("beta"));

  // robust mean / covariance
  m.def(
      "ra_mean",
      [](const Eigen::VectorXd& samples, std::optional<double> alpha, double delta,
         double v, std::optional<double> root_tol) {
        RaMeanConfig cfg;
        cfg.alpha = alpha;
        cfg.delta = delta;
        cfg.v = v;
        cfg.root_tol = root_tol;
        return ra_mean(samples, cfg);
      },
      py::arg("samples"), py::arg("alpha") = py::none(), py::arg("delta") = 0.05,
      py::arg("v") = 1.0, py::arg("root_tol") = py::none());
  m.def("choose_alpha", &choose_alpha, py::arg("n"), py::arg("delta"), py::arg("v"));
  m.def("concentration_radius", &concentration_radius, py::arg("n"), py::arg("delta"),
        py::arg("v"));
  m.def("deviation_bound_applicable", &deviation_bound_applicable, py::arg("n"),
        py::arg("delta"));
  m.def("deviation_bound_min_n", &deviation_bound_min_n, py::arg("delta"));
  m.def(
      "robust_covariance",
      [](const Eigen::MatrixXd& X, std::optional<double> delta,
         std::optional<double> v) {
        RobustCovariance cov = robust_covariance(X, delta, v);
        py::dict d;
        d["sigma"] = cov.sigma;
        d["alpha"] = cov.alpha;
        d["v"] = cov.v;
        d["radius"] = cov.radius;
        d["delta"] = cov.delta;
        return d;
      },
      py::arg("X"), py::arg("delta") = py::none(), py::arg("v") = py::none());

  // variance estimation
  m.def(
      "estimate_sigma2_cv",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int k,
         const std::string& method, double lam, double alpha, std::uint64_t seed,
         int workers) {
        Method meth = method_from_string(method);
        if (meth == Method::Oracle)
          throw std::invalid_argument("method 'oracle' is not valid here");
        GridPoint pt{lam, alpha};
        FitConfig cfg;
        Eigen::VectorXd unused;
        Fitter fitter = [&](const Dataset& train) {
          return fit_method(train, meth, pt, cfg, unused);
        };
        VarianceEstimate est =
            estimate_sigma2_cv(make_dataset(X, y), k, fitter, seed, workers);
        py::dict d;
        d["sigma2_hat"] = est.sigma2_hat;
        d["per_fold"] = est.per_fold;
        return d;
      },
      py::arg("X"), py::arg("y"), py::arg("k"), py::arg("method"), py::arg("lam"),
      py::arg("alpha") = 0.0, py::arg("seed") = 0, py::arg("workers") = 1);

  // metrics
  m.def(
      "compute_metrics",
      [](const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
         double zero_tol) {
        Metrics met = compute_metrics(beta_hat, beta_star, zero_tol);
        py::dict d;
        d["l2"] = met.l2;
        d["l1"] = met.l1;
        d["fp"] = met.fp;
        d["fn"] = met.fn;
        return d;
      },
      py::arg("beta_hat"), py::arg("beta_star"), py::arg("zero_tol") = 1e-8);
  m.def("relative_gain", &relative_gain, py::arg("err_method"), py::arg("err_ra"),
        py::arg("err_oracle"));

  // scenario runner (scenario given as a JSON string)
  m.def(
      "run_scenario",
      [](const std::string& scenario_json, const std::vector<std::string>& methods,
         int workers) {
        Scenario sc = scenario_from_json(json::parse(scenario_json));
        std::vector<Method> ms;
        for (const auto& name : methods) ms.push_back(method_from_string(name));
        MetricsReport report = run_scenario(sc, ms, FitConfig{}, workers);
        return py::module_::import("json").attr("loads")(
            dump_json(report_to_json(report)));
      },
      py::arg("scenario_json"),
      py::arg("methods") =
          std::vector<std::string>{"lasso", "r-lasso", "ra-lasso", "oracle"},
      py::arg("workers") = 1);
}
