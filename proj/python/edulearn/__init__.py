"""Logistic and least-squares toolkit for learning-style and dropout classification.

The heavy lifting lives in the compiled ``_edulearn`` module. This wrapper
turns the JSON documents it returns into plain dicts.
"""

import json

from ._edulearn import (
    DegeneratePredictorError,
    DegenerateTargetError,
    DimensionError,
    DivergenceError,
    EdulearnError,
    IoError,
    LabelError,
    LinearModel,
    LogisticModel,
    ParameterError,
    ParseError,
    SchemaError,
    SingularityError,
    SplitError,
    StalledDescentError,
    class_level_summary,
    fit_lasso,
    fit_multiple,
    fit_ridge,
    fit_simple,
    r_squared,
    route_learner_stage,
    sigmoid,
    style_ratio_label,
)
from . import _edulearn

__version__ = "0.1.0"


def fit_logistic(x, y, class_names, **config):
    """Train a logistic model. Returns ``(model, loss_trace)``.

    ``config`` accepts solver, max_iter, epochs, learning_rate, tol, l2, l1,
    lbfgs_memory and seed.
    """
    return _edulearn.fit_logistic(x, y, list(class_names), **config)


def compute_metrics(y_true, y_pred, n_classes):
    return json.loads(_edulearn.compute_metrics(y_true, y_pred, n_classes))


def run_style_experiment(**kwargs):
    """Synthetic learning-style experiment. Returns ``(report, model)`` dicts."""
    report, model = _edulearn.run_style_experiment(**kwargs)
    return json.loads(report), json.loads(model)


def run_academic_case_study(**kwargs):
    """Academic dropout case study on synthetic data, or on ``csv`` + ``schema``.

    Returns ``(report, model)`` dicts.
    """
    report, model = _edulearn.run_academic_case_study(**kwargs)
    return json.loads(report), json.loads(model)
