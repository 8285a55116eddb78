"""Classifier construction, training, scoring, and persistence.

Three model families share one interface: L2 logistic regression and random
forests come from scikit-learn; the boosted-tree model is local. Defaults are
the tuned values that won model selection on the reference datasets.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression

from ..errors import ConfigError, DataError, DomainError, ShapeError
from .gbdt import GradientBoostedTrees
from .prep import ScalerState, minmax_apply

LOGISTIC_REGRESSION = "logistic_regression"
RANDOM_FOREST = "random_forest"
GRADIENT_BOOSTED = "gradient_boosted_trees"

KIND_ALIASES = {
    "logreg": LOGISTIC_REGRESSION,
    "lr": LOGISTIC_REGRESSION,
    LOGISTIC_REGRESSION: LOGISTIC_REGRESSION,
    "rf": RANDOM_FOREST,
    RANDOM_FOREST: RANDOM_FOREST,
    "gbdt": GRADIENT_BOOSTED,
    GRADIENT_BOOSTED: GRADIENT_BOOSTED,
}
ALL_KINDS = (LOGISTIC_REGRESSION, RANDOM_FOREST, GRADIENT_BOOSTED)

ALLOWED_HYPERPARAMETERS = {
    LOGISTIC_REGRESSION: {"C"},
    RANDOM_FOREST: {"n_estimators"},
    GRADIENT_BOOSTED: {"n_estimators", "learning_rate"},
}

DEFAULT_GRIDS = {
    LOGISTIC_REGRESSION: {"C": [0.01, 0.1, 1.0, 10.0, 100.0]},
    RANDOM_FOREST: {"n_estimators": [10, 100, 1000]},
    GRADIENT_BOOSTED: {
        "learning_rate": [0.001, 0.01, 0.1],
        "n_estimators": [10, 100, 1000],
    },
}

DEFAULT_HYPERPARAMETERS = {
    LOGISTIC_REGRESSION: {"C": 100.0},
    RANDOM_FOREST: {"n_estimators": 100},
    GRADIENT_BOOSTED: {"learning_rate": 0.01, "n_estimators": 1000},
}

_MODEL_FORMAT = 1


def canonical_kind(name: str) -> str:
    key = name.strip().lower().replace("-", "_")
    if key not in KIND_ALIASES:
        raise ConfigError(
            f"unknown classifier {name!r}; use one of logreg, rf, gbdt"
        )
    return KIND_ALIASES[key]


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        allowed = ALLOWED_HYPERPARAMETERS[self.kind]
        unknown = set(self.hyperparameters) - allowed
        if unknown:
            raise ConfigError(
                f"hyperparameters {sorted(unknown)} are not valid for {self.kind}; "
                f"allowed: {sorted(allowed)}"
            )

    def resolved(self) -> dict:
        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        merged.update(self.hyperparameters)
        return merged


@dataclass
class TrainedModel:
    kind: str
    hyperparameters: dict
    estimator: object
    scaler: ScalerState | None = None
    columns: tuple[str, ...] | None = None
    n_features: int = 0
    manifest: dict = field(default_factory=dict)


def build_estimator(spec: ClassifierSpec):
    params = spec.resolved()
    if spec.kind == LOGISTIC_REGRESSION:
        return LogisticRegression(
            penalty="l2",
            C=float(params["C"]),
            solver="lbfgs",
            tol=1e-6,
            max_iter=10000,
        )
    if spec.kind == RANDOM_FOREST:
        return RandomForestClassifier(
            n_estimators=int(params["n_estimators"]),
            criterion="gini",
            max_features="sqrt",
            bootstrap=True,
            n_jobs=1,
            random_state=spec.seed % (2**32),
        )
    return GradientBoostedTrees(
        n_estimators=int(params["n_estimators"]),
        learning_rate=float(params["learning_rate"]),
        max_depth=6,
    )


def train_classifier(
    spec: ClassifierSpec,
    X: np.ndarray,
    y: np.ndarray,
    scaler: ScalerState | None = None,
    columns: tuple[str, ...] | None = None,
    manifest: dict | None = None,
) -> TrainedModel:
    """Fit one classifier on already-scaled training rows.

    The scaler is stored alongside so that scoring raw rows reapplies it.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise DataError("training needs a 2-D matrix with one label per row")
    if len(np.unique(y)) < 2:
        raise DomainError("training rows contain a single class; cannot fit a classifier")
    estimator = build_estimator(spec)
    estimator.fit(X, y)
    return TrainedModel(
        kind=spec.kind,
        hyperparameters=spec.resolved(),
        estimator=estimator,
        scaler=scaler,
        columns=columns,
        n_features=X.shape[1],
        manifest=dict(manifest or {}),
    )


def predict_scores(model: TrainedModel, rows: np.ndarray, raw: bool = True) -> np.ndarray:
    """Positive-class probability per row.

    raw=True means rows are unscaled and the stored scaler is applied first;
    raw=False expects pre-scaled rows.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != model.n_features:
        raise ShapeError(
            f"expected rows of width {model.n_features}, got {rows.shape}"
        )
    if raw and model.scaler is not None:
        rows = minmax_apply(model.scaler, rows)
    proba = model.estimator.predict_proba(rows)
    classes = list(getattr(model.estimator, "classes_", [0, 1]))
    return proba[:, classes.index(1)]


def save_model(model: TrainedModel, path) -> None:
    payload = {
        "format": _MODEL_FORMAT,
        "kind": model.kind,
        "hyperparameters": model.hyperparameters,
        "estimator": model.estimator,
        "scaler": model.scaler,
        "columns": model.columns,
        "n_features": model.n_features,
        "manifest": model.manifest,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh)


def load_model(path) -> TrainedModel:
    with open(Path(path), "rb") as fh:
        payload = pickle.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != _MODEL_FORMAT:
        raise DataError(f"{path}: not a recognized model file")
    return TrainedModel(
        kind=payload["kind"],
        hyperparameters=payload["hyperparameters"],
        estimator=payload["estimator"],
        scaler=payload["scaler"],
        columns=payload["columns"],
        n_features=payload["n_features"],
        manifest=payload["manifest"],
    )
