"""Train/test preparation: min-max scaling, stratified splitting, CV folds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError, DomainError
from ..features import ROLE_MIXED, ROLE_TEST, ROLE_TRAIN, FeatureMatrix


@dataclass(frozen=True)
class ScalerState:
    mins: np.ndarray
    maxs: np.ndarray


def minmax_fit(train) -> ScalerState:
    """Fit column minima/maxima. Accepts a FeatureMatrix or a 2-D array.

    Refuses to fit on rows tagged as test or mixed: scaling parameters must
    come from training data only.
    """
    if isinstance(train, FeatureMatrix):
        if train.role in (ROLE_TEST, ROLE_MIXED):
            raise DataError(
                f"refusing to fit a scaler on {train.role!r} rows; fit on the training partition"
            )
        X = train.X
    else:
        X = np.asarray(train, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("scaler needs a non-empty 2-D matrix")
    return ScalerState(mins=X.min(axis=0).copy(), maxs=X.max(axis=0).copy())


def minmax_apply(state: ScalerState, rows: np.ndarray) -> np.ndarray:
    """Scale rows by the fitted range; constant columns map to 0.

    Values are not clipped, so rows outside the fitted range land outside
    [0, 1].
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != len(state.mins):
        raise DataError(
            f"cannot scale rows of width {rows.shape}; scaler was fit on {len(state.mins)} columns"
        )
    span = state.maxs - state.mins
    safe = np.where(span == 0.0, 1.0, span)
    out = (rows - state.mins) / safe
    out[:, span == 0.0] = 0.0
    return out


def _class_indices(y: np.ndarray) -> dict[int, np.ndarray]:
    return {int(c): np.flatnonzero(y == c) for c in np.unique(y)}


def stratified_split_indices(
    y: np.ndarray, train_fraction: float = 0.75, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class split preserving prevalence within one sample per class.

    Test quotas are floor(per-class share) plus largest-remainder rounding up
    to the overall test size; every class keeps at least one training row.
    """
    y = np.asarray(y)
    if not 0.0 < train_fraction < 1.0:
        raise DomainError(f"train fraction {train_fraction!r} must lie strictly between 0 and 1")
    classes = _class_indices(y)
    if len(classes) < 2:
        raise DomainError("stratified split needs both classes present")
    n = len(y)
    n_test = n - int(round(train_fraction * n))
    labels = sorted(classes)
    ideal = {c: (1.0 - train_fraction) * len(classes[c]) for c in labels}
    quota = {c: int(ideal[c]) for c in labels}
    remainders = sorted(labels, key=lambda c: (-(ideal[c] - quota[c]), c))
    short = n_test - sum(quota.values())
    progress = True
    while short > 0 and progress:
        progress = False
        for c in remainders:
            if short <= 0:
                break
            if quota[c] < len(classes[c]) - 1:
                quota[c] += 1
                short -= 1
                progress = True
    rng = np.random.default_rng(seed)
    test_parts, train_parts = [], []
    for c in labels:
        idx = classes[c].copy()
        rng.shuffle(idx)
        take = min(quota[c], len(idx) - 1)
        test_parts.append(idx[:take])
        train_parts.append(idx[take:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return train_idx, test_idx


def stratified_split(
    fm: FeatureMatrix, train_fraction: float = 0.75, seed: int = 0
) -> tuple[FeatureMatrix, FeatureMatrix]:
    train_idx, test_idx = stratified_split_indices(fm.y, train_fraction, seed)
    return fm.subset(train_idx, ROLE_TRAIN), fm.subset(test_idx, ROLE_TEST)


def stratified_folds(y: np.ndarray, folds: int, seed: int = 0) -> list[np.ndarray]:
    """Validation index arrays for k-fold CV, stratified per class.

    Each class must have at least `folds` members so every fold's training
    side keeps both classes.
    """
    y = np.asarray(y)
    if folds < 2:
        raise DomainError("cross-validation needs at least 2 folds")
    classes = _class_indices(y)
    if len(classes) < 2:
        raise DomainError("stratified folds need both classes present")
    for c, idx in classes.items():
        if len(idx) < folds:
            raise DomainError(
                f"class {c} has only {len(idx)} rows for {folds} folds; use fewer folds"
            )
    rng = np.random.default_rng(seed)
    parts: list[list[np.ndarray]] = [[] for _ in range(folds)]
    for c in sorted(classes):
        idx = classes[c].copy()
        rng.shuffle(idx)
        for f, chunk in enumerate(np.array_split(idx, folds)):
            parts[f].append(chunk)
    return [np.sort(np.concatenate(p)) for p in parts]
