import json
import math

import numpy as np
import pytest

import clickcascade as cc


def test_headline_features():
    f = cc.extract_formal("She Did Not Expect THIS")
    assert f["forward_reference"] == 1.0
    assert f["n_words"] == 5.0
    assert cc.classify_headline("How To Win") == "howto"
    with pytest.raises(ValueError):
        cc.extract_formal("  ")


def test_bayes():
    assert cc.prob_b_beats_a(1, 1, 2, 1) == pytest.approx(2 / 3, abs=1e-9)
    assert cc.prob_b_beats_a(30, 70, 30, 70) == pytest.approx(0.5, abs=1e-12)
    exact = cc.prob_b_beats_a(40, 960, 60, 940)
    assert cc.prob_b_beats_a_mc(40, 960, 60, 940, 200_000, 1) == pytest.approx(exact, abs=0.01)
    d = cc.ab_decide(0, 0, 0, 0)
    assert d["action"] == "keep_control" and d["uplift"] is None
    assert cc.z_test(100, 1000, 190, 1000)["verdict"] == "significant_b_better"
    with pytest.raises(cc.InvalidInput):
        cc.prob_b_beats_a(1, 1, 2.5, 1)


def test_lasso_matches_least_squares():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(80, 5))
    y = x @ np.array([1.0, 0.0, -2.0, 0.5, 0.0]) + 0.3 + 0.1 * rng.normal(size=80)
    fit = cc.lasso_fit(x, y, 0.0, tolerance=1e-12, max_iterations=100_000)
    design = np.column_stack([np.ones(80), x])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    assert fit["w0"] == pytest.approx(beta[0], abs=1e-6)
    np.testing.assert_allclose(fit["weights"], beta[1:], atol=1e-6)
    zero = cc.lasso_fit(x, y, cc.lasso_lambda_max(x, y))
    assert np.all(zero["weights"] == 0.0)
    cv = cc.lasso_cv(x, y, k_folds=4, grid_size=20, seed=3)
    assert len(cv["cv_errors"]) == 20


def test_graphs():
    assert len(cc.erdos_renyi(20, 1.0, 1)) == 190
    n, m = 100, 3
    assert len(cc.barabasi_albert(n, m, 2)) == (m + 1) * m // 2 + m * (n - m - 1)
    edges = cc.sbm([5, 5], [[1.0, 0.0], [0.0, 1.0]], 0)
    assert len(edges) == 20 and all((i < 5) == (j < 5) for i, j in edges)


def test_metrics():
    assert cc.shannon_entropy([0.25] * 4) == pytest.approx(math.log(4))
    assert cc.gini([0.25] * 4) == pytest.approx(0.0, abs=1e-12)
    t = np.linspace(0, 1, 50)
    _, r2 = cc.polyfit_r2(list(2 * t + 1), 1)
    assert r2 == pytest.approx(1.0)


def test_simulate_is_deterministic():
    config = {
        "schema_version": 1,
        "simulation": {"n_agents": 60, "total_steps": 20, "feature_universe": 20,
                       "scenario": "ab_led", "master_seed": 4, "n_replicas": 3},
        "graph": {"topology": "erdos_renyi", "p": 0.1},
        "decision_model": {"synthetic_seed": 2},
    }
    a = cc.simulate(config, threads=1)
    b = cc.simulate(json.dumps(config), threads=3)
    assert a == b
    assert len(a["replicas"]) == 3
    assert len(a["replicas"][0]["rounds"]) == 4
    with pytest.raises(cc.ValidationError):
        cc.simulate({"schema_version": 1, "simulation": {"bogus": 1}})


def test_cli_usage_error():
    status, _, err = cc.run_cli(["simulate"])
    assert status == 2
    assert json.loads(err)["error"]["kind"] == "usage"
