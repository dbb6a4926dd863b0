"""Headline features, LASSO click models, Bayesian A/B tests and cascade simulation."""

import json

from ._core import (
    InvalidInput,
    ValidationError,
    ab_decide,
    barabasi_albert,
    classify_headline,
    erdos_renyi,
    extract_formal,
    gini,
    lasso_cv,
    lasso_fit,
    lasso_lambda_max,
    polyfit_r2,
    prob_b_beats_a,
    prob_b_beats_a_mc,
    run_cli,
    sbm,
    shannon_entropy,
    tokenize,
    z_test,
)
from ._core import _simulate_json

__version__ = "0.1.0"


def simulate(config, threads=0):
    """Run an experiment config (dict or JSON text) and return the results as a dict."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_simulate_json(text, threads))


__all__ = [
    "InvalidInput",
    "ValidationError",
    "ab_decide",
    "barabasi_albert",
    "classify_headline",
    "erdos_renyi",
    "extract_formal",
    "gini",
    "lasso_cv",
    "lasso_fit",
    "lasso_lambda_max",
    "polyfit_r2",
    "prob_b_beats_a",
    "prob_b_beats_a_mc",
    "run_cli",
    "sbm",
    "shannon_entropy",
    "simulate",
    "tokenize",
    "z_test",
]
