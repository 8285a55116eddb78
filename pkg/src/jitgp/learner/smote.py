"""Minority oversampling by interpolation between nearest minority neighbors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.neighbors import NearestNeighbors

from ..errors import DataError, DomainError


@dataclass(frozen=True)
class SmoteConfig:
    k: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise DomainError(f"smote neighbor count {self.k} must be positive")


def smote_oversample(
    X: np.ndarray, y: np.ndarray, cfg: SmoteConfig = SmoteConfig()
) -> tuple[np.ndarray, np.ndarray]:
    """Balance a binary training set by synthesizing minority rows.

    Each synthetic row is x + delta * (nn - x) for a uniformly drawn minority
    seed row, one of its k nearest minority neighbors, and delta ~ U[0, 1).
    Originals come first in the output, byte-untouched; synthetics follow.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or len(X) != len(y):
        raise DataError("smote needs a 2-D matrix with one label per row")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) != 2:
        raise DomainError(f"smote needs exactly two classes, got {len(classes)}")
    if counts[0] == counts[1]:
        return X.copy(), y.copy()
    minority = classes[np.argmin(counts)]
    x_min = X[y == minority]
    n_min = len(x_min)
    n_new = int(counts.max() - counts.min())
    if n_min <= cfg.k:
        raise DataError(
            f"minority class has {n_min} rows; {cfg.k} neighbors need at least "
            f"{cfg.k + 1}; reduce k or skip resampling"
        )
    # k+1 including each point itself, which is dropped
    nn = NearestNeighbors(n_neighbors=cfg.k + 1, algorithm="brute")
    nn.fit(x_min)
    neighbor_idx = nn.kneighbors(x_min, return_distance=False)[:, 1:]

    rng = np.random.default_rng(cfg.seed)
    seeds = rng.integers(0, n_min, size=n_new)
    picks = rng.integers(0, cfg.k, size=n_new)
    deltas = rng.random(n_new)
    base = x_min[seeds]
    partner = x_min[neighbor_idx[seeds, picks]]
    synth = base + deltas[:, None] * (partner - base)

    X_out = np.vstack([X, synth])
    y_out = np.concatenate([y, np.full(n_new, minority, dtype=y.dtype)])
    return X_out, y_out
