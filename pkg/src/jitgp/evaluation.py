"""Threshold metrics, precision-recall curves, and cross-dataset rank summaries.

Conventions: a row is predicted positive iff its score is >= the threshold;
undefined ratios (empty denominators) are 0; MCC is 0 whenever any factor of
its denominator vanishes. The area under the PR curve is the step-wise sum
over distinct thresholds with no interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DomainError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise DomainError("confusion counts must be non-negative")

    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion_at_threshold(scores, labels, threshold: float) -> ConfusionCounts:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise DataError("scores and labels must align")
    pred = scores >= threshold
    pos = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
        tn=int(np.sum(~pred & ~pos)),
    )


def precision_recall_f1(c: ConfusionCounts) -> tuple[float, float, float]:
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) > 0 else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else 0.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if (precision + recall) > 0
        else 0.0
    )
    return precision, recall, f1


def mcc(c: ConfusionCounts) -> float:
    """Matthews correlation; 0 by convention when the denominator vanishes."""
    denom_factors = (
        (c.tp + c.fp) * (c.tp + c.fn),
        (c.tn + c.fp) * (c.tn + c.fn),
    )
    if denom_factors[0] == 0 or denom_factors[1] == 0:
        return 0.0
    numerator = c.tp * c.tn - c.fp * c.fn
    return numerator / math.sqrt(float(denom_factors[0]) * float(denom_factors[1]))


@dataclass(frozen=True)
class PrCurve:
    """(threshold, precision, recall) points in ascending threshold order.

    The last point sits just above the maximum score, so recall reaches 0.
    """

    points: tuple[tuple[float, float, float], ...]

    def thresholds(self) -> tuple[float, ...]:
        return tuple(t for t, _, _ in self.points)


def pr_curve(scores, labels) -> PrCurve:
    """One point per distinct score plus the above-maximum boundary point."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError("scores and labels must be aligned 1-D arrays")
    n_pos = int(np.sum(labels == 1))
    if n_pos == 0:
        raise DomainError("precision-recall needs at least one positive row")
    order = np.argsort(scores, kind="stable")
    s_sorted = scores[order]
    pos_sorted = (labels[order] == 1).astype(np.int64)
    # suffix counts: rows and positives with score >= s_sorted[i]
    n = len(scores)
    suffix_pos = np.cumsum(pos_sorted[::-1])[::-1]
    distinct = np.flatnonzero(np.diff(s_sorted, prepend=-np.inf))
    points = []
    for i in distinct:
        t = float(s_sorted[i])
        kept = int(n - i)
        tp = int(suffix_pos[i])
        precision = tp / kept
        recall = tp / n_pos
        points.append((t, precision, recall))
    points.append((float(s_sorted[-1]) + 1.0, 0.0, 0.0))
    return PrCurve(points=tuple(points))


def auc_pr(curve: PrCurve) -> float:
    """Step-wise area: sum of recall increments times the precision there."""
    area = 0.0
    prev_recall = 0.0
    for _, precision, recall in reversed(curve.points):
        area += (recall - prev_recall) * precision
        prev_recall = recall
    return area


def best_f1_threshold(curve: PrCurve) -> tuple[float, float, float, float]:
    """(threshold, precision, recall, f1) maximizing F1; ties pick the higher threshold."""
    best = None
    for t, precision, recall in curve.points:
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if (precision + recall) > 0
            else 0.0
        )
        if best is None or f1 > best[3] or (f1 == best[3] and t > best[0]):
            best = (t, precision, recall, f1)
    return best


@dataclass(frozen=True)
class EvaluationReport:
    precision: float
    recall: float
    f1: float
    mcc: float
    auc_pr: float
    threshold: float
    counts: ConfusionCounts


def evaluate_scores(scores, labels, threshold: float = 0.5) -> EvaluationReport:
    """All metrics at one decision threshold plus ranking quality."""
    counts = confusion_at_threshold(scores, labels, threshold)
    precision, recall, f1 = precision_recall_f1(counts)
    curve = pr_curve(scores, labels)
    return EvaluationReport(
        precision=precision,
        recall=recall,
        f1=f1,
        mcc=mcc(counts),
        auc_pr=auc_pr(curve),
        threshold=threshold,
        counts=counts,
    )


def aggregate_ranks(per_dataset: dict[str, dict[str, float]]) -> dict[str, tuple[float, float]]:
    """Mean value and mean rank of each method across datasets.

    Rank 1 is the best (highest value); tied values share the mean of the
    positions they span. Every dataset must score every method.
    """
    if not per_dataset:
        raise DataError("rank aggregation needs at least one dataset")
    names = sorted(per_dataset)
    methods = sorted(per_dataset[names[0]])
    for name in names:
        if sorted(per_dataset[name]) != methods:
            raise DataError(f"dataset {name!r} is missing methods; all must score all")
    sums = {m: 0.0 for m in methods}
    rank_sums = {m: 0.0 for m in methods}
    for name in names:
        scores = per_dataset[name]
        ordered = sorted(methods, key=lambda m: -scores[m])
        pos = 0
        while pos < len(ordered):
            end = pos
            while end + 1 < len(ordered) and scores[ordered[end + 1]] == scores[ordered[pos]]:
                end += 1
            mean_rank = (pos + end) / 2.0 + 1.0
            for i in range(pos, end + 1):
                rank_sums[ordered[i]] += mean_rank
            pos = end + 1
        for m in methods:
            sums[m] += scores[m]
    k = float(len(names))
    return {m: (sums[m] / k, rank_sums[m] / k) for m in methods}
