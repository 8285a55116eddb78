"""Training stack: scaling, splitting, oversampling, boosting, model selection."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression

from jitgp.errors import ConfigError, DataError, DomainError, ShapeError
from jitgp.features import ROLE_TEST, FeatureMatrix
from jitgp.learner import (
    GradientBoostedTrees,
    ClassifierSpec,
    ScalerState,
    SmoteConfig,
    build_estimator,
    canonical_kind,
    grid_search,
    load_model,
    minmax_apply,
    minmax_fit,
    predict_scores,
    save_model,
    smote_oversample,
    stratified_folds,
    stratified_split_indices,
    train_classifier,
)


# ---------------------------------------------------------------- scaling

def test_minmax_scales_into_unit_range():
    X = np.array([[0.0, 10.0], [5.0, 20.0], [10.0, 30.0]])
    state = minmax_fit(X)
    out = minmax_apply(state, X)
    np.testing.assert_allclose(out, [[0, 0], [0.5, 0.5], [1, 1]])


def test_minmax_constant_column_and_no_clipping():
    X = np.array([[2.0, 1.0], [2.0, 3.0]])
    state = minmax_fit(X)
    out = minmax_apply(state, np.array([[2.0, 5.0], [7.0, -1.0]]))
    assert out[:, 0].tolist() == [0.0, 0.0]  # constant column pins to 0
    assert out[0, 1] == 2.0  # beyond max stays beyond 1
    assert out[1, 1] == -1.0


def test_minmax_refuses_test_rows():
    fm = FeatureMatrix(
        columns=("a",), X=np.array([[1.0], [2.0]]), y=np.array([0, 1]), setting=1, role=ROLE_TEST
    )
    with pytest.raises(DataError):
        minmax_fit(fm)


def test_minmax_width_check():
    state = ScalerState(mins=np.zeros(2), maxs=np.ones(2))
    with pytest.raises(DataError):
        minmax_apply(state, np.zeros((2, 3)))


# ---------------------------------------------------------------- splitting

def test_split_small_example_keeps_both_classes_in_train():
    # 2+2 rows at 75 percent: one test row, three train rows with both classes
    y = np.array([0, 0, 1, 1])
    train, test = stratified_split_indices(y, 0.75, seed=0)
    assert len(test) == 1 and len(train) == 3
    assert set(y[train]) == {0, 1}
    assert sorted(np.concatenate([train, test]).tolist()) == [0, 1, 2, 3]


def test_split_preserves_prevalence():
    rng = np.random.default_rng(0)
    y = (rng.random(400) < 0.3).astype(int)
    train, test = stratified_split_indices(y, 0.75, seed=3)
    assert len(set(train) & set(test)) == 0
    assert len(train) + len(test) == 400
    assert abs(y[test].mean() - y.mean()) < 0.02
    assert abs(y[train].mean() - y.mean()) < 0.02


def test_split_deterministic_and_seed_sensitive():
    y = np.array([0] * 20 + [1] * 10)
    a = stratified_split_indices(y, 0.75, seed=5)
    b = stratified_split_indices(y, 0.75, seed=5)
    c = stratified_split_indices(y, 0.75, seed=6)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert a[1].tolist() != c[1].tolist()


def test_split_validation():
    with pytest.raises(DomainError):
        stratified_split_indices(np.array([1, 1, 1]), 0.75)
    with pytest.raises(DomainError):
        stratified_split_indices(np.array([0, 1]), 1.0)


def test_folds_partition_and_stratify():
    y = np.array([0] * 20 + [1] * 12)
    folds = stratified_folds(y, 4, seed=1)
    all_idx = np.concatenate(folds)
    assert sorted(all_idx.tolist()) == list(range(32))
    for fold in folds:
        assert set(y[fold]) == {0, 1}
        assert len(fold) == 8


def test_folds_demand_enough_minority_rows():
    y = np.array([0] * 20 + [1] * 3)
    with pytest.raises(DomainError, match="fewer folds"):
        stratified_folds(y, 5, seed=0)
    with pytest.raises(DomainError):
        stratified_folds(y, 1, seed=0)


# ---------------------------------------------------------------- smote

def _imbalanced(seed=0, n_maj=40, n_min=12, d=3):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, (n_maj, d)), rng.normal(4, 1, (n_min, d))])
    y = np.array([0] * n_maj + [1] * n_min)
    return X, y


def test_smote_balances_and_keeps_originals_bytewise():
    X, y = _imbalanced()
    X_out, y_out = smote_oversample(X, y, SmoteConfig(k=5, seed=9))
    assert (y_out == 0).sum() == (y_out == 1).sum() == 40
    assert X_out[: len(X)].tobytes() == X.tobytes()
    np.testing.assert_array_equal(y_out[: len(y)], y)


def test_smote_synthetics_lie_on_minority_segments():
    X, y = _imbalanced(seed=4)
    k = 5
    X_out, y_out = smote_oversample(X, y, SmoteConfig(k=k, seed=2))
    x_min = X[y == 1]
    synth = X_out[len(X):]
    assert (y_out[len(X):] == 1).all()
    # independent neighbor lists: ties included to stay order-agnostic
    dists = np.linalg.norm(x_min[:, None, :] - x_min[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    kth = np.sort(dists, axis=1)[:, k - 1]
    for s in synth:
        found = False
        for i, x in enumerate(x_min):
            neighbors = np.flatnonzero(dists[i] <= kth[i] + 1e-12)
            for j in neighbors:
                gap = x_min[j] - x
                denom = float(gap @ gap)
                if denom == 0.0:
                    continue
                delta = float((s - x) @ gap) / denom
                if -1e-9 <= delta <= 1.0 + 1e-9 and np.allclose(s, x + delta * gap, atol=1e-9):
                    found = True
                    break
            if found:
                break
        assert found, "synthetic row off every minority segment"


def test_smote_noop_when_balanced():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    X_out, y_out = smote_oversample(X, y)
    np.testing.assert_array_equal(X_out, X)
    np.testing.assert_array_equal(y_out, y)
    assert X_out is not X  # a copy, never a view


def test_smote_needs_enough_minority_neighbors():
    X = np.zeros((10, 2))
    y = np.array([0] * 7 + [1] * 3)
    with pytest.raises(DataError):
        smote_oversample(X, y, SmoteConfig(k=5, seed=0))


def test_smote_deterministic():
    X, y = _imbalanced(seed=8)
    a = smote_oversample(X, y, SmoteConfig(k=3, seed=11))
    b = smote_oversample(X, y, SmoteConfig(k=3, seed=11))
    assert a[0].tobytes() == b[0].tobytes()


def test_smote_rejects_single_class():
    with pytest.raises(DomainError):
        smote_oversample(np.zeros((4, 1)), np.array([1, 1, 1, 1]))


# ---------------------------------------------------------------- gbdt

def test_gbdt_zero_learning_rate_predicts_base_rate():
    X = np.arange(10, dtype=float).reshape(-1, 1)
    y = np.array([0, 0, 0, 0, 0, 0, 1, 1, 1, 1])
    model = GradientBoostedTrees(n_estimators=5, learning_rate=0.0).fit(X, y)
    proba = model.predict_proba(X)
    np.testing.assert_allclose(proba[:, 1], 0.4, atol=1e-12)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    assert model.classes_.tolist() == [0, 1]


def test_gbdt_learns_threshold_rule():
    rng = np.random.default_rng(0)
    X = rng.random((200, 2))
    y = (X[:, 0] > 0.5).astype(int)
    model = GradientBoostedTrees(n_estimators=30, learning_rate=0.3, max_depth=3).fit(X, y)
    pred = (model.predict_proba(X)[:, 1] >= 0.5).astype(int)
    assert (pred == y).mean() >= 0.98


def test_gbdt_deterministic():
    rng = np.random.default_rng(3)
    X = rng.random((80, 3))
    y = (X[:, 1] + 0.2 * rng.random(80) > 0.6).astype(int)
    a = GradientBoostedTrees(n_estimators=10, learning_rate=0.1).fit(X, y)
    b = GradientBoostedTrees(n_estimators=10, learning_rate=0.1).fit(X, y)
    np.testing.assert_array_equal(a.decision_function(X), b.decision_function(X))


def test_gbdt_validation():
    with pytest.raises(DomainError):
        GradientBoostedTrees(n_estimators=0)
    with pytest.raises(DomainError):
        GradientBoostedTrees(learning_rate=-0.1)
    with pytest.raises(DataError):
        GradientBoostedTrees().decision_function(np.zeros((1, 1)))


# ---------------------------------------------------------------- models

def test_canonical_kind_aliases():
    assert canonical_kind("logreg") == canonical_kind("LR") == "logistic_regression"
    assert canonical_kind("rf") == "random_forest"
    assert canonical_kind("GBDT") == "gradient_boosted_trees"
    with pytest.raises(ConfigError):
        canonical_kind("svm")


def test_spec_validates_hyperparameters_and_merges_defaults():
    with pytest.raises(ConfigError):
        ClassifierSpec(kind="rf", hyperparameters={"C": 1.0})
    spec = ClassifierSpec(kind="gbdt", hyperparameters={"n_estimators": 10})
    assert spec.resolved() == {"learning_rate": 0.01, "n_estimators": 10}
    assert ClassifierSpec(kind="logreg").resolved() == {"C": 100.0}


def test_build_estimator_configurations():
    lr = build_estimator(ClassifierSpec(kind="logreg", hyperparameters={"C": 0.5}))
    assert isinstance(lr, LogisticRegression)
    assert (lr.C, lr.penalty, lr.solver) == (0.5, "l2", "lbfgs")
    rf = build_estimator(ClassifierSpec(kind="rf", hyperparameters={"n_estimators": 17}, seed=4))
    assert isinstance(rf, RandomForestClassifier)
    assert (rf.n_estimators, rf.max_features, rf.n_jobs) == (17, "sqrt", 1)
    gb = build_estimator(ClassifierSpec(kind="gbdt"))
    assert isinstance(gb, GradientBoostedTrees)
    assert (gb.n_estimators, gb.learning_rate, gb.max_depth) == (1000, 0.01, 6)


def test_train_and_score_applies_stored_scaler():
    rng = np.random.default_rng(1)
    X_raw = np.hstack([rng.normal(0, 50, (60, 1)), rng.normal(100, 5, (60, 1))])
    y = (X_raw[:, 0] > 0).astype(int)
    scaler = minmax_fit(X_raw)
    model = train_classifier(
        ClassifierSpec(kind="logreg"), minmax_apply(scaler, X_raw), y, scaler=scaler
    )
    via_raw = predict_scores(model, X_raw, raw=True)
    via_scaled = predict_scores(model, minmax_apply(scaler, X_raw), raw=False)
    np.testing.assert_allclose(via_raw, via_scaled)
    assert ((via_raw >= 0.5).astype(int) == y).mean() > 0.95


def test_train_rejects_single_class():
    with pytest.raises(DomainError):
        train_classifier(ClassifierSpec(kind="logreg"), np.zeros((3, 1)), np.array([1, 1, 1]))


def test_predict_scores_shape_guard():
    X = np.array([[0.0], [1.0]])
    model = train_classifier(ClassifierSpec(kind="gbdt", hyperparameters={"n_estimators": 1}), X, np.array([0, 1]))
    with pytest.raises(ShapeError):
        predict_scores(model, np.zeros((2, 4)))


def test_model_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    X = rng.random((50, 3))
    y = (X[:, 0] > 0.5).astype(int)
    model = train_classifier(
        ClassifierSpec(kind="rf", hyperparameters={"n_estimators": 12}, seed=3),
        X,
        y,
        columns=("a", "b", "c"),
    )
    path = tmp_path / "model.bin"
    save_model(model, path)
    again = load_model(path)
    assert again.kind == model.kind
    assert again.columns == ("a", "b", "c")
    np.testing.assert_array_equal(
        predict_scores(again, X, raw=False), predict_scores(model, X, raw=False)
    )
    bad = tmp_path / "junk.bin"
    bad.write_bytes(b"\x80\x04N.")  # pickled None
    with pytest.raises(DataError):
        load_model(bad)


# ---------------------------------------------------------------- grid search

def _separable(n_per=15, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0.2, 0.05, (n_per, 2)), rng.normal(0.8, 0.05, (n_per, 2))])
    y = np.array([0] * n_per + [1] * n_per)
    return X, y


def test_grid_search_tie_breaks_to_simplest():
    # both C values separate this data perfectly, so the smaller C must win
    X, y = _separable()
    scores = []
    spec = grid_search(
        "logreg", X, y, grid={"C": [0.1, 100.0]}, folds=3, seed=5, scores_out=scores
    )
    assert [s[1] for s in scores] == [1.0, 1.0]
    assert spec.hyperparameters == {"C": 0.1}
    assert spec.kind == "logistic_regression"
    assert spec.seed == 5


def test_grid_search_prefers_clearly_better_point():
    # lr=0 never beats the prior; any positive rate separates the clusters
    X, y = _separable(seed=3)
    spec = grid_search(
        "gbdt",
        X,
        y,
        grid={"learning_rate": [0.0, 0.5], "n_estimators": [5]},
        folds=3,
        seed=1,
    )
    assert spec.hyperparameters == {"learning_rate": 0.5, "n_estimators": 5}


def test_grid_search_rejects_empty_grid():
    X, y = _separable()
    with pytest.raises(ConfigError):
        grid_search("rf", X, y, grid={}, folds=3)
