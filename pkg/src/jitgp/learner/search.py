"""Hyperparameter selection by stratified cross-validation.

The objective is mean F1 at the 0.5 threshold. Oversampling runs inside each
fold on the training side only, so validation rows never leak into the
synthesis. Ties go to the simpler model: fewer trees, then smaller C, then
smaller learning rate.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from ..errors import ConfigError
from ..evaluation import confusion_at_threshold, precision_recall_f1
from ..seeds import derive_seed
from .models import DEFAULT_GRIDS, ClassifierSpec, canonical_kind, predict_scores, train_classifier
from .prep import stratified_folds
from .smote import SmoteConfig, smote_oversample

_SCORE_EPS = 1e-12


def _grid_points(kind: str, grid: dict) -> list[dict]:
    if not grid:
        raise ConfigError(f"empty hyperparameter grid for {kind}")
    names = sorted(grid)
    points = [dict(zip(names, combo)) for combo in product(*(grid[n] for n in names))]

    def simplicity(point: dict):
        return (
            point.get("n_estimators", 0),
            point.get("C", 0.0),
            point.get("learning_rate", 0.0),
        )

    return sorted(points, key=simplicity)


def grid_search(
    kind: str,
    X: np.ndarray,
    y: np.ndarray,
    grid: dict | None = None,
    folds: int = 10,
    seed: int = 0,
    smote_k: int = 5,
    scores_out: list | None = None,
) -> ClassifierSpec:
    """Pick the grid point with the best mean validation F1.

    Rows must already be scaled. Candidate points are tried simplest first
    and replaced only on a strict improvement, which realizes the tie-break.
    scores_out, when given, collects (params, mean_f1) pairs for reporting.
    """
    kind = canonical_kind(kind)
    if grid is None:
        grid = DEFAULT_GRIDS[kind]
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    fold_indices = stratified_folds(y, folds, derive_seed(seed, "grid.folds"))

    prepared = []
    for f, val_idx in enumerate(fold_indices):
        train_mask = np.ones(len(y), dtype=bool)
        train_mask[val_idx] = False
        X_tr, y_tr = X[train_mask], y[train_mask]
        X_tr, y_tr = smote_oversample(
            X_tr, y_tr, SmoteConfig(k=smote_k, seed=derive_seed(seed, f"grid.smote.{f}"))
        )
        prepared.append((X_tr, y_tr, X[val_idx], y[val_idx]))

    best_point = None
    best_score = -np.inf
    for point in _grid_points(kind, grid):
        f1s = []
        for f, (X_tr, y_tr, X_val, y_val) in enumerate(prepared):
            spec = ClassifierSpec(
                kind=kind,
                hyperparameters=point,
                seed=derive_seed(seed, f"grid.model.{f}"),
            )
            model = train_classifier(spec, X_tr, y_tr)
            scores = predict_scores(model, X_val, raw=False)
            counts = confusion_at_threshold(scores, y_val, 0.5)
            f1s.append(precision_recall_f1(counts)[2])
        mean_f1 = float(np.mean(f1s))
        if scores_out is not None:
            scores_out.append((dict(point), mean_f1))
        if mean_f1 > best_score + _SCORE_EPS:
            best_score = mean_f1
            best_point = point
    return ClassifierSpec(kind=kind, hyperparameters=best_point, seed=seed)
