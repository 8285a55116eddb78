"""Acceptance gate: nine end-to-end checks, one verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines;
each check also stands alone as a regular test. Check 8 needs the labeled
project dataset and skips when it is not installed (point JITGP_DATA_DIR at
a directory with one subdirectory per project, each holding changes.csv).
"""

from __future__ import annotations

import functools
import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from jitgp.centrality import betweenness, closeness, degree, harmonic, pagerank
from jitgp.community import louvain, modularity
from jitgp.evaluation import (
    ConfusionCounts,
    auc_pr,
    mcc,
    pr_curve,
    precision_recall_f1,
)
from jitgp.graphs import (
    COMMON_NEIGHBORS,
    ContributionGraph,
    ProjectionGraph,
    project_developer_graph,
)
from jitgp.ingest import ChangeRecord, ChangeSet, changes_to_table
from jitgp.learner import SmoteConfig, smote_oversample, stratified_split_indices
from jitgp.pipeline import PipelineConfig, run_pipeline
from jitgp.szz import DefectPair, ExposureThreshold, compute_exposure_threshold, label_early_exposed

from .gen import planted_repo, random_bipartite, random_confusion, random_graph
from .oracles import (
    brute_betweenness,
    brute_closeness,
    brute_degree,
    brute_harmonic,
    brute_modularity,
    brute_projection,
    dense_pagerank,
    direct_mcc,
    exact_precision_recall_f1,
    pearson_mcc,
)

WEEK = 7 * 86400


def criterion(number: int, title: str):
    """Print one `criterion N: PASS|FAIL|SKIP` line per check."""

    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except pytest.skip.Exception:
                print(f"criterion {number}: SKIP  {title}", flush=True)
                raise
            except BaseException:
                print(f"criterion {number}: FAIL  {title}", flush=True)
                raise
            print(f"criterion {number}: PASS  {title}", flush=True)

        return wrapper

    return decorate


# ---------------------------------------------------------------- 1


@criterion(1, "centralities match exhaustive oracles on 50 random graphs in <10 s")
def test_criterion_1_centrality_oracles():
    started = time.perf_counter()
    rng = np.random.default_rng(20260816)
    for _ in range(50):
        nodes, weights = random_graph(rng)
        pg = ProjectionGraph(nodes=tuple(nodes), weights=dict(weights))
        assert degree(pg) == brute_degree(nodes, weights)
        bet, bet_oracle = betweenness(pg), brute_betweenness(nodes, weights)
        clo, clo_oracle = closeness(pg), brute_closeness(nodes, weights)
        har, har_oracle = harmonic(pg), brute_harmonic(nodes, weights)
        for u in nodes:
            assert abs(bet[u] - bet_oracle[u]) <= 1e-12
            assert abs(clo[u] - clo_oracle[u]) <= 1e-12
            assert abs(har[u] - har_oracle[u]) <= 1e-12
        pr, pr_oracle = pagerank(pg), dense_pagerank(nodes, weights)
        assert max(abs(pr[u] - pr_oracle[u]) for u in nodes) < 1e-8
    assert time.perf_counter() - started < 10.0


# ---------------------------------------------------------------- 2


def _two_cliques():
    left = [f"n{i:02d}" for i in range(6)]
    right = [f"n{i:02d}" for i in range(6, 12)]
    weights = {}
    for group in (left, right):
        for i, u in enumerate(group):
            for v in group[i + 1 :]:
                weights[(u, v)] = 1.0
    weights[("n00", "n06")] = 1.0
    return left + right, weights, {frozenset(left), frozenset(right)}


@criterion(2, "Louvain recovers two planted 6-cliques; Q matches recomputation to 1e-12")
def test_criterion_2_louvain_planted_partition():
    nodes, weights, planted = _two_cliques()
    pg = ProjectionGraph(nodes=tuple(nodes), weights=dict(weights))
    for seed in (0, 1, 7, 42):
        part = louvain(pg, seed=seed)
        groups: dict[int, set[str]] = {}
        for node, cid in part.assignment.items():
            groups.setdefault(cid, set()).add(node)
        assert {frozenset(g) for g in groups.values()} == planted
        assert abs(part.modularity - 0.467741935483871) <= 1e-12
        assert abs(part.modularity - brute_modularity(nodes, weights, part.assignment)) <= 1e-12
        assert abs(part.modularity - modularity(pg, part.assignment)) <= 1e-12


# ---------------------------------------------------------------- 3


@criterion(3, "SMOTE rows are 5-NN convex combinations; classes balance; test rows untouched")
def test_criterion_3_smote_properties():
    rng = np.random.default_rng(33)
    X = np.vstack([rng.normal(0, 1, (80, 4)), rng.normal(3, 1, (26, 4))])
    y = np.array([0] * 80 + [1] * 26)
    train_idx, test_idx = stratified_split_indices(y, 0.75, seed=2)
    test_before = X[test_idx].tobytes()

    k = 5
    X_out, y_out = smote_oversample(X[train_idx], y[train_idx], SmoteConfig(k=k, seed=4))
    assert (y_out == 0).sum() == (y_out == 1).sum()
    n_train = len(train_idx)
    assert X_out[:n_train].tobytes() == X[train_idx].tobytes()

    # every synthetic row must sit on a segment from a minority row to one
    # of its k nearest minority neighbors (ties on the kth distance allowed)
    x_min = X[train_idx][y[train_idx] == 1]
    dists = np.linalg.norm(x_min[:, None, :] - x_min[None, :, :], axis=2)
    np.fill_diagonal(dists, np.inf)
    kth = np.sort(dists, axis=1)[:, k - 1]
    for s in X_out[n_train:]:
        on_segment = False
        for i, x in enumerate(x_min):
            for j in np.flatnonzero(dists[i] <= kth[i] + 1e-12):
                gap = x_min[j] - x
                denom = float(gap @ gap)
                if denom == 0.0:
                    continue
                delta = float((s - x) @ gap) / denom
                if -1e-9 <= delta <= 1.0 + 1e-9 and np.allclose(s, x + delta * gap, atol=1e-9):
                    on_segment = True
                    break
            if on_segment:
                break
        assert on_segment, "synthetic row off every minority segment"

    assert X[test_idx].tobytes() == test_before


# ---------------------------------------------------------------- 4


@criterion(4, "P/R/F1/MCC match two oracles on 1000 random confusions; AUC-PR edge cases hold")
def test_criterion_4_metric_oracles():
    rng = np.random.default_rng(4000)
    for _ in range(1000):
        tp, fp, tn, fn = random_confusion(rng)
        counts = ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)
        got = precision_recall_f1(counts)
        want = exact_precision_recall_f1(tp, fp, tn, fn)
        assert all(abs(g - w) <= 1e-12 for g, w in zip(got, want))
        m = mcc(counts)
        assert abs(m - direct_mcc(tp, fp, tn, fn)) <= 1e-12
        assert abs(m - pearson_mcc(tp, fp, tn, fn)) <= 1e-12

    # zero-denominator conventions
    assert mcc(ConfusionCounts(0, 0, 0, 7)) == 0.0
    assert mcc(ConfusionCounts(0, 0, 5, 0)) == 0.0
    assert mcc(ConfusionCounts(3, 0, 0, 0)) == 0.0
    assert mcc(ConfusionCounts(0, 4, 0, 0)) == 0.0
    assert precision_recall_f1(ConfusionCounts(0, 0, 0, 3)) == (0.0, 0.0, 0.0)

    # perfect ranking and constant scores
    perfect = pr_curve([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
    assert auc_pr(perfect) == 1.0
    constant = pr_curve([0.5] * 10, [1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
    assert auc_pr(constant) == pytest.approx(0.3, abs=1e-12)


# ---------------------------------------------------------------- 5


@criterion(5, "projection edges/weights match direct formula on 100 bipartite fixtures")
def test_criterion_5_projection_formula():
    rng = np.random.default_rng(5050)
    for _ in range(100):
        devs, files, weights = random_bipartite(rng)
        g = ContributionGraph(
            developers=tuple(sorted(devs)), files=tuple(sorted(files)), weights=dict(weights)
        )
        edges, shared = brute_projection(devs, files, weights)
        projected = project_developer_graph(g)
        assert set(projected.weights) == set(edges)
        assert projected.weights == edges
        variant = project_developer_graph(g, COMMON_NEIGHBORS)
        assert set(variant.weights) == set(shared)
        assert variant.weights == shared


# ---------------------------------------------------------------- 6


def _span_changes(weeks: float) -> ChangeSet:
    return ChangeSet.from_records(
        [
            ChangeRecord("first", "a", "f.py", 0),
            ChangeRecord("last", "b", "g.py", int(weeks * WEEK)),
        ]
    )


@criterion(6, "exposure threshold boundary cases exact; labels monotone in theta")
def test_criterion_6_theta_boundaries():
    assert compute_exposure_threshold(_span_changes(520)).seconds == 4 * WEEK
    assert compute_exposure_threshold(_span_changes(100)).seconds == 1 * WEEK
    assert compute_exposure_threshold(_span_changes(400)).seconds == 4 * WEEK

    rng = np.random.default_rng(66)
    commits = [f"k{i}" for i in range(60)]
    changes = ChangeSet.from_records(
        [ChangeRecord(c, "a", f"f{i}.py", 100 + i) for i, c in enumerate(commits)]
    )
    pairs = {DefectPair(c, "fixer", int(rng.integers(0, 3 * WEEK))) for c in commits}
    previous: set[str] = set()
    for theta in (0.1 * WEEK, 0.5 * WEEK, 1.0 * WEEK, 2.0 * WEEK, 3.5 * WEEK):
        labeled = label_early_exposed(changes, pairs, ExposureThreshold(seconds=theta))
        positive = {r.commit_id for r in labeled.records if r.label == 1}
        assert previous <= positive
        previous = positive


# ---------------------------------------------------------------- 7


@criterion(7, "planted-signal repo: setting-1 random forest reaches AUC-PR >= 0.80 in <60 s")
def test_criterion_7_planted_signal(tmp_path):
    started = time.perf_counter()
    changes = planted_repo(n_changes=500, n_devs=20, seed=42)
    labels = np.array([r.label for r in changes.records])
    prevalence = labels.mean()
    assert 0.2 <= prevalence <= 0.4

    table = tmp_path / "changes.csv"
    table.write_text(changes_to_table(changes), encoding="utf-8")

    def run(out_name: str):
        cfg = PipelineConfig(
            out_dir=str(tmp_path / out_name),
            labeled_table=str(table),
            setting=1,
            classifier="rf",
            seed=0,
            grid=False,
        )
        return run_pipeline(cfg, upto="evaluate")

    result = run("a")
    score = result.report["classifiers"]["random_forest"]["metrics"]["auc_pr"]
    assert score >= 0.80

    again = run("b")
    assert again.report_path.read_bytes() == result.report_path.read_bytes()
    assert time.perf_counter() - started < 60.0


# ---------------------------------------------------------------- 8


def _dataset_root() -> Path:
    env = os.environ.get("JITGP_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[1] / "data"


def _run_repo(table: Path, out_dir: Path) -> dict:
    cfg = PipelineConfig(
        out_dir=str(out_dir),
        labeled_table=str(table),
        setting=1,
        classifier="rf",
        seed=0,
        grid=True,
        folds=10,
    )
    result = run_pipeline(cfg, upto="evaluate")
    return result.report["classifiers"]["random_forest"]


@criterion(8, "labeled project dataset: F1/MCC floors, mean bands, baseline beaten")
def test_criterion_8_project_dataset_soft(tmp_path):
    root = _dataset_root()
    repos = (
        sorted(d for d in root.iterdir() if (d / "changes.csv").is_file())
        if root.is_dir()
        else []
    )
    ivy = next((d for d in repos if d.name.lower() == "ivy"), None)
    if ivy is None:
        pytest.skip(
            "labeled project dataset not installed; set JITGP_DATA_DIR to a "
            "directory of <project>/changes.csv tables (must include ivy)"
        )

    entry = _run_repo(ivy / "changes.csv", tmp_path / "ivy")
    assert entry["best_f1"]["f1"] >= 0.55
    assert entry["metrics"]["mcc"] >= 0.25
    assert entry["best_f1"]["f1"] > 0.3083

    if len(repos) >= 14:
        f1s, mccs = [], []
        for repo in repos:
            best = _run_repo(repo / "changes.csv", tmp_path / repo.name)
            assert best["best_f1"]["f1"] > 0.3083, f"{repo.name} below the constant baseline"
            f1s.append(best["best_f1"]["f1"])
            mccs.append(best["metrics"]["mcc"])
        assert abs(float(np.mean(f1s)) - 0.7724) <= 0.10
        assert abs(float(np.mean(mccs)) - 0.5316) <= 0.10


# ---------------------------------------------------------------- 9


@criterion(9, "identical config and seed give byte-identical reports across thread counts")
def test_criterion_9_thread_count_determinism(tmp_path):
    changes = planted_repo(n_changes=300, n_devs=12, seed=9)
    table = tmp_path / "changes.csv"
    table.write_text(changes_to_table(changes), encoding="utf-8")

    reports = []
    for name, threads in (("one", "1"), ("four", "4")):
        out_dir = tmp_path / name
        cfg_path = tmp_path / f"{name}.cfg"
        cfg_path.write_text(
            "\n".join(
                [
                    f"out_dir = {out_dir}",
                    f"labeled_table = {table}",
                    "classifier = rf",
                    "grid = false",
                    "seed = 17",
                ]
            )
        )
        env = dict(os.environ)
        env.update(
            {
                "OMP_NUM_THREADS": threads,
                "OPENBLAS_NUM_THREADS": threads,
                "MKL_NUM_THREADS": threads,
            }
        )
        proc = subprocess.run(
            [
                sys.executable,
                "-c",
                "import sys; from jitgp.cli import main; sys.exit(main(sys.argv[1:]))",
                "evaluate",
                "--config",
                str(cfg_path),
            ],
            env=env,
            capture_output=True,
            text=True,
            timeout=300,
        )
        assert proc.returncode == 0, proc.stderr
        reports.append((out_dir / "report.json").read_bytes())
    assert reports[0] == reports[1]
