"""Smoke tests for the python bindings: import, shapes, and a few known values."""

import math

import numpy as np
import pytest

import ralasso


def test_module_metadata():
    assert ralasso.__version__ == "0.1.0"
    assert ralasso.RNG_NAME == "philox4x32-10"


def test_pointwise_losses():
    assert ralasso.huber_value(0.5, 1.0) == 0.25
    assert ralasso.huber_value(3.0, 0.5) == 8.0
    assert ralasso.huber_psi(-7.0) == -1.0
    assert ralasso.catoni_psi(0.5) == pytest.approx(0.47000362924573555, abs=1e-15)


def test_optimizer_primitives():
    v = np.array([3.0, -1.0, 0.2])
    out = ralasso.soft_threshold(v, 0.5)
    assert out == pytest.approx([2.5, -0.5, 0.0])
    proj = ralasso.project_l1_ball(np.array([3.0, 1.0]), 3.0)
    assert proj == pytest.approx([2.5, 0.5], abs=1e-12)
    gamma = ralasso.estimate_gamma_u(np.eye(3))
    assert gamma == pytest.approx(2.02 / 3.0, rel=1e-9)


def test_fit_recovers_sparse_signal():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((80, 6))
    beta_star = np.array([2.0, -1.0, 0.0, 0.0, 0.0, 0.0])
    y = X @ beta_star
    res = ralasso.fit_lasso(X, y, lam=1e-4)
    assert res["converged"]
    assert np.max(np.abs(res["beta"] - beta_star)) < 1e-3
    trace = np.asarray(res["objective_trace"])
    assert np.all(np.diff(trace) <= 1e-10)

    robust = ralasso.fit_ra_lasso(X, y, alpha=0.5, lam=1e-4)
    assert np.max(np.abs(robust["beta"] - beta_star)) < 1e-2

    oracle = ralasso.fit_oracle(X, y, [0, 1])
    assert oracle == pytest.approx(beta_star, abs=1e-10)
    resid = y - ralasso.predict(X, oracle)
    assert np.max(np.abs(resid)) < 1e-10


def test_ra_mean_shrugs_off_outliers():
    rng = np.random.default_rng(11)
    samples = np.concatenate([rng.standard_normal(500), [1e6]])
    assert abs(ralasso.ra_mean(samples)) < 1.0
    assert abs(samples.mean()) > 1e3
    assert ralasso.deviation_bound_min_n(0.05) == 24
    assert ralasso.choose_alpha(1000, 0.05, 2.0) == pytest.approx(
        0.027366641525559868, abs=1e-15
    )


def test_robust_covariance_shape():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((200, 3))
    cov = ralasso.robust_covariance(X)
    assert cov["sigma"].shape == (3, 3)
    assert np.allclose(cov["sigma"], cov["sigma"].T)
    assert np.max(np.abs(cov["sigma"] - np.eye(3))) < 0.5


def test_metrics_and_gain():
    met = ralasso.compute_metrics(
        np.array([2.5, 0.0, 0.3]), np.array([3.0, 0.0, 0.0])
    )
    assert met["l2"] == pytest.approx(math.hypot(0.5, 0.3))
    assert met["fp"] == 1 and met["fn"] == 0
    assert ralasso.relative_gain(11.08, 10.10, 2.89) == pytest.approx(
        1.1359223300970873
    )


def test_run_scenario_roundtrip():
    scenario = (
        '{"model":"homoscedastic","error":"zero","n":30,"p":4,'
        '"beta_star_spec":{"nonzero":2,"value":3.0},"replications":2,'
        '"grid":{"lambda":[0.0001],"alpha":[],"n_validation":1}}'
    )
    report = ralasso.run_scenario(scenario, methods=["lasso", "oracle"])
    by_method = {entry["method"]: entry for entry in report["results"]}
    assert by_method["lasso"]["mean_l2"] < 1e-3
    assert by_method["oracle"]["mean_l2"] < 1e-8
