import json
import os
import pathlib
import subprocess

import numpy as np
import pytest

import edulearn

SOURCE_DIR = pathlib.Path(os.environ.get("EDULEARN_SOURCE_DIR", pathlib.Path(__file__).parents[2]))
CLI = os.environ.get("EDULEARN_CLI")


def test_sigmoid_stays_inside_unit_interval():
    assert edulearn.sigmoid(0.0) == 0.5
    assert 0.0 < edulearn.sigmoid(-100.0) < edulearn.sigmoid(100.0) < 1.0


def test_fit_multiple_matches_numpy_lstsq():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(60, 3))
    y = x @ np.array([1.5, -2.0, 0.25]) + 0.7 + rng.normal(scale=0.1, size=60)
    model = edulearn.fit_multiple(x, y)
    design = np.column_stack([x, np.ones(len(x))])
    oracle, *_ = np.linalg.lstsq(design, y, rcond=None)
    np.testing.assert_allclose(model.coefficients, oracle[:3], atol=1e-10)
    assert model.intercept == pytest.approx(oracle[3], abs=1e-10)
    np.testing.assert_allclose(model.predict(x), design @ oracle, atol=1e-10)
    simple = edulearn.fit_simple(x[:, 0], y)
    r2 = edulearn.r_squared(simple, x[:, :1], y)
    assert r2 == pytest.approx(np.corrcoef(x[:, 0], y)[0, 1] ** 2, abs=1e-10)


def test_lasso_and_ridge_run():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(40, 4))
    y = 3.0 * x[:, 0] + rng.normal(scale=0.1, size=40)
    lasso = edulearn.fit_lasso(x, y, lam=0.5)
    assert lasso.converged
    assert np.count_nonzero(lasso.coefficients[1:]) < 3
    ridge = edulearn.fit_ridge(x, y, lam=1e9)
    assert np.max(np.abs(ridge.coefficients)) < 1e-6


def test_errors_map_to_python_classes():
    x = np.column_stack([np.arange(5.0), np.arange(5.0)])
    with pytest.raises(edulearn.SingularityError):
        edulearn.fit_multiple(x, np.arange(5.0))
    with pytest.raises(edulearn.EdulearnError):
        edulearn.fit_simple(np.ones(3), np.arange(3.0))
    with pytest.raises(edulearn.ParameterError):
        edulearn.style_ratio_label(5, 4)
    with pytest.raises(edulearn.DimensionError):
        edulearn.fit_multiple(np.ones(3), np.ones(3))


@pytest.mark.parametrize("n_classes", [2, 3])
def test_lbfgs_matches_sklearn(n_classes):
    linear_model = pytest.importorskip("sklearn.linear_model")
    rng = np.random.default_rng(n_classes)
    x = rng.normal(size=(120, 3))
    y = rng.integers(0, n_classes, size=120).astype(np.int32)
    l2 = 0.1
    names = [f"c{k}" for k in range(n_classes)]
    model, losses = edulearn.fit_logistic(x, y, names, solver="lbfgs", l2=l2, tol=1e-10)
    assert model.converged
    assert all(b <= a for a, b in zip(losses, losses[1:]))

    oracle = linear_model.LogisticRegression(C=1.0 / (len(x) * l2), tol=1e-12, max_iter=10000)
    oracle.fit(x, y)
    np.testing.assert_allclose(model.predict_proba(x)[:, -1] if n_classes == 2 else model.predict_proba(x),
                               oracle.predict_proba(x)[:, -1] if n_classes == 2 else oracle.predict_proba(x),
                               atol=1e-5)
    assert list(model.predict(x)) == list(oracle.predict(x))


def test_metrics_dict():
    m = edulearn.compute_metrics(np.array([0, 0, 1, 1]), np.array([0, 1, 1, 1]), 2)
    assert m["accuracy"] == 0.75
    assert m["confusion"] == [[1, 1], [0, 2]]
    assert m["per_class"][1]["f1"] == pytest.approx(0.8, abs=1e-15)


def test_staging_helpers():
    assert edulearn.style_ratio_label(27, 40) == "visual"
    assert edulearn.style_ratio_label(26, 40) == "auditory"
    assert edulearn.route_learner_stage(40) == "beginner"
    assert edulearn.route_learner_stage(85, 90) == "advanced"
    assert edulearn.class_level_summary(["advanced", "beginner"])["recommendation"] == "beginner-track"


def test_style_experiment_report():
    report, model = edulearn.run_style_experiment(n_students=100, noise_std=0.0, seed=3)
    assert report["task"] == "style"
    assert report["test_metrics"]["accuracy"] == 1.0
    assert model["model_type"] == "binary_logistic"
    again, _ = edulearn.run_style_experiment(n_students=100, noise_std=0.0, seed=3)
    assert again == report


def test_academic_case_study_report():
    report, model = edulearn.run_academic_case_study(n_rows=600, seed=1)
    assert report["class_names"] == ["Graduate", "Dropout", "Enrolled"]
    assert abs(report["test_metrics"]["accuracy"] - report["planted_test_accuracy"]) < 0.1
    assert len(model["weights"]) == 3 * model["n_features"]


def _validate(instance):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads((SOURCE_DIR / "schemas" / "report.schema.json").read_text())
    jsonschema.validate(instance, schema)


def test_library_reports_match_schema():
    _validate(edulearn.run_style_experiment(n_students=50)[0])
    _validate(edulearn.run_academic_case_study(n_rows=300, solver="sgd", epochs=5)[0])


@pytest.mark.skipif(not CLI, reason="EDULEARN_CLI not set")
def test_cli_report_matches_schema(tmp_path):
    subprocess.run([CLI, "train", "--task", "academic", "--n", "500", "--out", f"{tmp_path}/"],
                   check=True, capture_output=True)
    report = json.loads((tmp_path / "report.json").read_text())
    _validate(report)
    same, _ = edulearn.run_academic_case_study(n_rows=500, seed=0)
    assert same == report
