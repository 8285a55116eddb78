"""Gradient boosted regression trees for binary classification.

Boosting on the logistic loss: each stage fits a depth-limited regression
tree to the current residuals (label minus predicted probability) with exact
greedy MSE splits, then replaces leaf outputs with a single Newton step.
Everything is deterministic: split ties resolve to the lowest feature index
and the first qualifying position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError, DomainError

_EPS = 1e-12
_PRIOR_CLIP = 1e-6


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


@dataclass
class _Tree:
    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(len(X), dtype=np.float64)
        idx = np.arange(len(X))
        stack = [(0, idx)]
        while stack:
            node, rows = stack.pop()
            if self.feature[node] < 0:
                out[rows] = self.value[node]
                continue
            go_left = X[rows, self.feature[node]] <= self.threshold[node]
            stack.append((self.left[node], rows[go_left]))
            stack.append((self.right[node], rows[~go_left]))
        return out


def _best_split(X: np.ndarray, residual: np.ndarray, rows: np.ndarray):
    """Exact greedy MSE split: maximize sum of squared child sums over counts.

    Returns (feature, threshold) or None if no position separates the rows.
    """
    n = len(rows)
    best_score = -np.inf
    best = None
    total = residual[rows].sum()
    base = total * total / n
    for f in range(X.shape[1]):
        xs_all = X[rows, f]
        order = np.argsort(xs_all, kind="stable")
        xs = xs_all[order]
        if xs[0] == xs[-1]:
            continue
        gs = residual[rows][order]
        left_sum = np.cumsum(gs)[:-1]
        left_cnt = np.arange(1, n)
        right_sum = total - left_sum
        score = left_sum**2 / left_cnt + right_sum**2 / (n - left_cnt)
        score[xs[1:] <= xs[:-1]] = -np.inf
        pos = int(np.argmax(score))
        if score[pos] > best_score + _EPS and score[pos] > base + _EPS:
            best_score = score[pos]
            best = (f, (xs[pos] + xs[pos + 1]) / 2.0)
    return best


def _build_tree(
    X: np.ndarray,
    residual: np.ndarray,
    hessian: np.ndarray,
    max_depth: int,
    min_leaf: int,
) -> _Tree:
    tree = _Tree()

    def leaf_value(rows: np.ndarray) -> float:
        return float(residual[rows].sum() / max(hessian[rows].sum(), _EPS))

    def grow(rows: np.ndarray, depth: int) -> int:
        node = tree.add_node()
        split = None
        if depth < max_depth and len(rows) >= 2 * min_leaf:
            split = _best_split(X, residual, rows)
        if split is None:
            tree.value[node] = leaf_value(rows)
            return node
        f, t = split
        go_left = X[rows, f] <= t
        left_rows = rows[go_left]
        right_rows = rows[~go_left]
        if len(left_rows) < min_leaf or len(right_rows) < min_leaf:
            tree.value[node] = leaf_value(rows)
            return node
        tree.feature[node] = f
        tree.threshold[node] = t
        tree.left[node] = grow(left_rows, depth + 1)
        tree.right[node] = grow(right_rows, depth + 1)
        return node

    grow(np.arange(len(X)), 0)
    return tree


class GradientBoostedTrees:
    """Binary classifier: staged depth-limited trees on logistic residuals.

    With learning_rate 0 the model stays at the prior log-odds and predicts
    the training base rate everywhere.
    """

    def __init__(
        self,
        n_estimators: int = 100,
        learning_rate: float = 0.1,
        max_depth: int = 6,
        min_leaf: int = 1,
    ):
        if n_estimators < 1:
            raise DomainError("need at least one boosting stage")
        if learning_rate < 0:
            raise DomainError("learning rate must be non-negative")
        self.n_estimators = n_estimators
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.base_score_: float | None = None
        self.trees_: list[_Tree] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GradientBoostedTrees":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or len(X) != len(y):
            raise DataError("fit needs a 2-D matrix with one label per row")
        prior = float(np.clip(y.mean(), _PRIOR_CLIP, 1.0 - _PRIOR_CLIP))
        self.classes_ = np.array([0, 1], dtype=np.int64)
        self.base_score_ = float(np.log(prior / (1.0 - prior)))
        self.trees_ = []
        raw = np.full(len(y), self.base_score_)
        if self.learning_rate == 0.0:
            return self
        for _ in range(self.n_estimators):
            p = _sigmoid(raw)
            residual = y - p
            hessian = p * (1.0 - p)
            tree = _build_tree(X, residual, hessian, self.max_depth, self.min_leaf)
            raw += self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        if self.base_score_ is None:
            raise DataError("model is not fitted")
        X = np.asarray(X, dtype=np.float64)
        raw = np.full(len(X), self.base_score_)
        for tree in self.trees_:
            raw += self.learning_rate * tree.predict(X)
        return raw

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Two-column (negative, positive) probabilities, sklearn-style."""
        pos = _sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - pos, pos])
