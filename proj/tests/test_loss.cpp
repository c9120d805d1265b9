#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "ralasso/errors.hpp"
#include "ralasso/loss.hpp"

using ralasso::LossKind;
using ralasso::LossSpec;
using ralasso::catoni_psi;
using ralasso::huber_psi;
using ralasso::huber_value;
using ralasso::loss_deriv;
using ralasso::loss_value;

namespace {
const std::vector<double> kAlphaGrid{0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
}

TEST_CASE("robust quadratic matches the square branch exactly inside the knot") {
  for (double alpha : kAlphaGrid) {
    double inv = 1.0 / alpha;
    for (int i = 0; i <= 400; ++i) {
      double x = -inv + 2.0 * inv * i / 400.0;
      if (std::fabs(x) > inv) continue;
      CHECK(huber_value(x, alpha) == x * x);  // bit identical, same expression
    }
    // The knot itself belongs to the quadratic branch.
    CHECK(huber_value(inv, alpha) == inv * inv);
    CHECK(huber_value(-inv, alpha) == inv * inv);
  }
}

TEST_CASE("hand-computed robust quadratic values on both branches") {
  CHECK(huber_value(0.25, 1.0) == doctest::Approx(0.0625).epsilon(1e-15));
  // alpha = 0.5, |x| = 3 > 2: 2*3/0.5 - 1/0.25 = 12 - 4 = 8.
  CHECK(huber_value(3.0, 0.5) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(huber_value(-3.0, 0.5) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(loss_value(LossSpec::ra_quadratic(0.5), 3.0)
        == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(loss_deriv(LossSpec::ra_quadratic(1.0), 0.25)
        == doctest::Approx(0.5).epsilon(1e-15));
  // Outside the knot the slope saturates at 2/alpha.
  CHECK(loss_deriv(LossSpec::ra_quadratic(0.5), 3.0)
        == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(loss_deriv(LossSpec::ra_quadratic(0.5), -3.0)
        == doctest::Approx(-4.0).epsilon(1e-15));
}

TEST_CASE("smoothed absolute loss values and derivatives") {
  LossSpec spec = LossSpec::smoothed_lad(0.01);
  CHECK(loss_value(spec, 5.0) == doctest::Approx(4.995).epsilon(1e-15));
  CHECK(loss_value(spec, -5.0) == doctest::Approx(4.995).epsilon(1e-15));
  CHECK(loss_value(spec, 0.005) == doctest::Approx(0.00125).epsilon(1e-15));
  CHECK(loss_deriv(spec, 5.0) == 1.0);
  CHECK(loss_deriv(spec, -5.0) == -1.0);
  CHECK(loss_deriv(spec, 0.005) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spec.curvature_bound() == doctest::Approx(100.0).epsilon(1e-15));
  CHECK(LossSpec::square().curvature_bound() == 2.0);
  CHECK(LossSpec::ra_quadratic(0.3).curvature_bound() == 2.0);
  CHECK(LossSpec::catoni(0.3).curvature_bound() == 2.0);
}

TEST_CASE("log-based influence frozen values") {
  // psi_c(0.5) = -log(1 - 0.5 + 0.125) = -log(0.625).
  CHECK(catoni_psi(0.5)
        == doctest::Approx(0.47000362924573555365).epsilon(1e-15));
  CHECK(catoni_psi(-0.5)
        == doctest::Approx(-0.47000362924573555365).epsilon(1e-15));
  CHECK(catoni_psi(0.0) == 0.0);
  CHECK(catoni_psi(1.0) == doctest::Approx(M_LN2).epsilon(1e-15));
  CHECK(catoni_psi(100.0) == doctest::Approx(M_LN2).epsilon(1e-15));
  CHECK(catoni_psi(-100.0) == doctest::Approx(-M_LN2).epsilon(1e-15));
  // Pointwise loss: value(alpha=1, 0.5) = 2 F(0.5); deriv(alpha=1, 5) = 2 log 2.
  CHECK(loss_value(LossSpec::catoni(1.0), 0.5)
        == doctest::Approx(0.24299415316769567274).epsilon(1e-14));
  CHECK(ralasso::detail::catoni_antideriv(1.0)
        == doctest::Approx(0.42920367320510338077).epsilon(1e-15));
  CHECK(loss_deriv(LossSpec::catoni(1.0), 5.0)
        == doctest::Approx(1.3862943611198906188).epsilon(1e-15));
}

TEST_CASE("clipped influence is sandwiched by the log envelopes") {
  // -log(1 - x + x^2) <= psi(x) <= log(1 + x + x^2) on a wide grid.
  for (int i = 0; i <= 10000; ++i) {
    double x = -30.0 + 60.0 * i / 10000.0;
    double lower = -std::log(1.0 - x + x * x);
    double upper = std::log(1.0 + x + x * x);
    double psi = huber_psi(x);
    CHECK(psi >= lower - 1e-12);
    CHECK(psi <= upper + 1e-12);
  }
}

TEST_CASE("log influence is sandwiched by its half-quadratic envelopes") {
  // -log(1 - x + x^2/2) <= psi_c(x) <= log(1 + x + x^2/2) on a wide grid.
  for (int i = 0; i <= 10000; ++i) {
    double x = -30.0 + 60.0 * i / 10000.0;
    double lower = -std::log(1.0 - x + 0.5 * x * x);
    double upper = std::log(1.0 + x + 0.5 * x * x);
    double psi = catoni_psi(x);
    CHECK(psi >= lower - 1e-12);
    CHECK(psi <= upper + 1e-12);
  }
}

TEST_CASE("values and derivatives are continuous across every knot") {
  auto check_value_knot = [](const LossSpec& spec, double k) {
    double up = std::nextafter(k, std::numeric_limits<double>::infinity());
    double dn = std::nextafter(k, -std::numeric_limits<double>::infinity());
    CHECK(std::fabs(loss_value(spec, up) - loss_value(spec, k)) <= 1e-12);
    CHECK(std::fabs(loss_value(spec, dn) - loss_value(spec, k)) <= 1e-12);
    CHECK(std::fabs(loss_deriv(spec, up) - loss_deriv(spec, k)) <= 1e-12);
    CHECK(std::fabs(loss_deriv(spec, dn) - loss_deriv(spec, k)) <= 1e-12);
  };
  for (double alpha : kAlphaGrid) {
    check_value_knot(LossSpec::ra_quadratic(alpha), 1.0 / alpha);
    check_value_knot(LossSpec::ra_quadratic(alpha), -1.0 / alpha);
    check_value_knot(LossSpec::catoni(alpha), 1.0 / alpha);
    check_value_knot(LossSpec::catoni(alpha), -1.0 / alpha);
  }
  check_value_knot(LossSpec::smoothed_lad(0.01), 0.01);
  check_value_knot(LossSpec::smoothed_lad(0.01), -0.01);
  // Influence kernels at their clip points.
  for (double k : {1.0, -1.0}) {
    double up = std::nextafter(k, std::numeric_limits<double>::infinity());
    double dn = std::nextafter(k, -std::numeric_limits<double>::infinity());
    CHECK(std::fabs(huber_psi(up) - huber_psi(dn)) <= 1e-12);
    CHECK(std::fabs(catoni_psi(up) - catoni_psi(dn)) <= 1e-12);
  }
  // Series/closed-form handoff inside the antiderivative.
  double s = 0.02;
  double below = std::nextafter(s, 0.0);
  CHECK(ralasso::detail::catoni_antideriv(below)
        == doctest::Approx(ralasso::detail::catoni_antideriv(s)).epsilon(1e-12));
}

TEST_CASE("log-loss closed form agrees with quadrature of its derivative") {
  for (double alpha : kAlphaGrid) {
    LossSpec spec = LossSpec::catoni(alpha);
    for (double x : {0.001, 0.01, 0.3, 0.9 / alpha, 1.0 / alpha, 2.5 / alpha,
                     40.0 / alpha}) {
      double integral = oracles::integrate(
          [&](double t) { return loss_deriv(spec, t); }, 0.0, x, 1e-13);
      CHECK(loss_value(spec, x) == doctest::Approx(integral).epsilon(1e-9));
      CHECK(loss_value(spec, -x) == doctest::Approx(integral).epsilon(1e-9));
    }
  }
}

TEST_CASE("robust quadratic closed form agrees with quadrature too") {
  for (double alpha : {0.2, 1.0, 5.0}) {
    LossSpec spec = LossSpec::ra_quadratic(alpha);
    for (double x : {0.4 / alpha, 1.0 / alpha, 3.7 / alpha}) {
      double integral = oracles::integrate(
          [&](double t) { return loss_deriv(spec, t); }, 0.0, x, 1e-13);
      CHECK(loss_value(spec, x) == doctest::Approx(integral).epsilon(1e-9));
    }
  }
}

TEST_CASE("tiny alpha collapses the robust families onto least squares") {
  LossSpec ra = LossSpec::ra_quadratic(1e-8);
  LossSpec cat = LossSpec::catoni(1e-8);
  LossSpec sq = LossSpec::square();
  for (double x : {-75.3, -1.0, -0.123, 0.0, 0.5, 3.25, 99.0}) {
    CHECK(loss_value(ra, x) == loss_value(sq, x));   // same float ops
    CHECK(loss_deriv(ra, x) == loss_deriv(sq, x));
    CHECK(loss_value(cat, x) == doctest::Approx(x * x).epsilon(1e-13));
    if (x != 0.0)
      CHECK(loss_deriv(cat, x) == doctest::Approx(2.0 * x).epsilon(1e-11));
  }
}

TEST_CASE("empirical loss and gradient on a hand-checked instance") {
  Eigen::MatrixXd X(3, 2);
  X << 1, 0,
       0, 1,
       1, 1;
  Eigen::VectorXd beta(2);
  beta << 1, 1;
  Eigen::VectorXd y(3);
  y << 2, 2, 3;  // residuals all equal 1
  CHECK(ralasso::empirical_loss(LossSpec::square(), X, y, beta)
        == doctest::Approx(1.0).epsilon(1e-15));
  // gradient = -(1/3) X' (2,2,2)' = -(1/3)(4, 4)'.
  Eigen::VectorXd g = ralasso::empirical_gradient(LossSpec::square(), X, y, beta);
  CHECK(g[0] == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(-4.0 / 3.0).epsilon(1e-15));
  // Robust quadratic with the knot below 1 switches to the linear branch:
  // alpha = 2, each residual 1 > 1/2, loss = 2*1/2 - 1/4 = 0.75.
  CHECK(ralasso::empirical_loss(LossSpec::ra_quadratic(2.0), X, y, beta)
        == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("empirical gradient matches central finite differences") {
  std::vector<LossSpec> specs{LossSpec::square(), LossSpec::ra_quadratic(0.7),
                              LossSpec::catoni(0.9), LossSpec::smoothed_lad(0.05)};
  auto rng = oracles::test_rng(10);
  for (int rep = 0; rep < 8; ++rep) {
    int n = 5 + static_cast<int>(rng.next_below(12));
    int p = 1 + static_cast<int>(rng.next_below(6));
    Eigen::MatrixXd X = oracles::random_matrix(rng, n, p);
    Eigen::VectorXd y = oracles::random_vector(rng, n);
    Eigen::VectorXd beta = 0.5 * oracles::random_vector(rng, p);
    for (const auto& spec : specs) {
      Eigen::VectorXd g = ralasso::empirical_gradient(spec, X, y, beta);
      Eigen::VectorXd fd = oracles::fd_gradient(spec, X, y, beta);
      double denom = std::max(1.0, fd.cwiseAbs().maxCoeff());
      CHECK((g - fd).cwiseAbs().maxCoeff() / denom < 1e-6);
    }
  }
}

TEST_CASE("invalid specs and non-finite inputs are rejected") {
  CHECK_THROWS_AS(LossSpec::ra_quadratic(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::ra_quadratic(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::catoni(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::smoothed_lad(0.0), std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::smoothed_lad(-0.3), std::invalid_argument);
  CHECK_THROWS_AS(huber_value(1.0, 0.0), std::invalid_argument);
  double nan = std::numeric_limits<double>::quiet_NaN();
  double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(huber_value(nan, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(huber_psi(nan), std::invalid_argument);
  CHECK_THROWS_AS(catoni_psi(inf), std::invalid_argument);
  CHECK_THROWS_AS(loss_value(LossSpec::square(), inf), std::invalid_argument);
  CHECK_THROWS_AS(loss_deriv(LossSpec::square(), nan), std::invalid_argument);

  LossSpec bad;  // default-constructed spec with kind patched to need alpha
  bad.kind = LossKind::RaQuadratic;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(loss_value(bad, 1.0), std::invalid_argument);

  Eigen::MatrixXd X(2, 2);
  X << 1, 0, 0, 1;
  Eigen::VectorXd y2(2), y3(3), beta2(2), beta3(3);
  y2.setZero();
  y3.setZero();
  beta2.setZero();
  beta3.setZero();
  CHECK_THROWS_AS(ralasso::empirical_loss(LossSpec::square(), X, y3, beta2),
                  ralasso::ShapeError);
  CHECK_THROWS_AS(ralasso::empirical_loss(LossSpec::square(), X, y2, beta3),
                  ralasso::ShapeError);
  CHECK_THROWS_AS(
      ralasso::empirical_loss(LossSpec::square(), Eigen::MatrixXd(), y2, beta2),
      ralasso::ShapeError);
  Eigen::VectorXd ybad = y2;
  ybad[0] = nan;
  CHECK_THROWS_AS(ralasso::empirical_loss(LossSpec::square(), X, ybad, beta2),
                  std::invalid_argument);
  CHECK_THROWS_AS(ralasso::empirical_gradient(LossSpec::square(), X, ybad, beta2),
                  std::invalid_argument);
}
