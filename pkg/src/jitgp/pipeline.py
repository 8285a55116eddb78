"""End-to-end orchestration: ingest, label, graph, features, train, evaluate.

Stages are cached content-addressed: each stage's key hashes its config
slice plus the bytes of its inputs, and a stage whose key matches the
previous run is reused. Partial outputs of a failed stage move under
failed/ for inspection.

report.json is byte-deterministic for a fixed config and input data: it
carries no paths, timestamps, or timings. Those live in manifest.json.
"""

from __future__ import annotations

import hashlib
import json
import platform
import shutil
import time
import warnings
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import szz
from .centrality import compute_centralities
from .community import louvain
from .embedding import node2vec_embed
from .errors import ConfigError, DataError, StageError
from .features import (
    ROLE_TEST,
    ROLE_TRAIN,
    assemble_features,
    read_features,
    write_features,
)
from .graphs import (
    AS_PAPER,
    PROJECTION_SCHEMES,
    build_contribution_graph,
    project_developer_graph,
    read_bipartite,
    write_bipartite,
    write_projection,
)
from .ingest import ChangeSet, parse_changelog, read_changes, write_changes
from .learner import (
    ALL_KINDS,
    DEFAULT_GRIDS,
    ClassifierSpec,
    SmoteConfig,
    canonical_kind,
    grid_search,
    load_model,
    minmax_apply,
    minmax_fit,
    predict_scores,
    save_model,
    smote_oversample,
    stratified_split_indices,
    train_classifier,
)
from .evaluation import best_f1_threshold, evaluate_scores, pr_curve
from .seeds import derive_seed, seed_derivation

SCOPE_FULL = "full"
SCOPE_TRAIN_ONLY = "train-only"
STAGE_ORDER = ("ingest", "label", "graph", "features", "train", "evaluate")

_KIND_FILE_ALIAS = {
    "logistic_regression": "logreg",
    "random_forest": "rf",
    "gradient_boosted_trees": "gbdt",
}


@dataclass
class PipelineConfig:
    out_dir: str = ""
    labeled_table: str | None = None
    changelog: str | None = None
    messages: str | None = None
    blame: str | None = None
    issue_reports: str | None = None
    issue_pattern: str = r"[A-Z][A-Z0-9]*-[0-9]+"
    fix_fallback: bool = False
    setting: int = 1
    classifier: str = "rf"
    projection_weight: str = AS_PAPER
    graph_scope: str = SCOPE_FULL
    seed: int = 0
    train_fraction: float = 0.75
    grid: bool = True
    folds: int = 10
    smote_k: int = 5
    embedding_dim: int = 128

    def validate(self) -> None:
        if not self.out_dir:
            raise ConfigError("out_dir is required")
        if not self.labeled_table and not self.changelog:
            raise ConfigError("provide labeled_table or changelog as the change source")
        if self.labeled_table and self.changelog:
            raise ConfigError("labeled_table and changelog are mutually exclusive")
        if self.setting not in (1, 2):
            raise ConfigError(f"setting must be 1 or 2, got {self.setting!r}")
        if self.classifier != "all":
            canonical_kind(self.classifier)
        if self.projection_weight not in PROJECTION_SCHEMES:
            raise ConfigError(
                f"projection_weight must be one of {PROJECTION_SCHEMES}, got {self.projection_weight!r}"
            )
        if self.graph_scope not in (SCOPE_FULL, SCOPE_TRAIN_ONLY):
            raise ConfigError(
                f"graph_scope must be '{SCOPE_FULL}' or '{SCOPE_TRAIN_ONLY}', got {self.graph_scope!r}"
            )
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie strictly between 0 and 1")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")
        if self.smote_k < 1:
            raise ConfigError("smote_k must be positive")
        if self.embedding_dim < 1:
            raise ConfigError("embedding_dim must be positive")
        for name in ("labeled_table", "changelog", "messages", "blame", "issue_reports"):
            value = getattr(self, name)
            if value is not None and not Path(value).is_file():
                raise ConfigError(f"{name} file not found: {value}")

    def kinds(self) -> tuple[str, ...]:
        if self.classifier == "all":
            return ALL_KINDS
        return (canonical_kind(self.classifier),)


_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, kind, raw: str):
    if kind in ("str", "str | None"):
        return raw
    if kind == "int":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"config key {name}: expected an integer, got {raw!r}") from None
    if kind == "float":
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"config key {name}: expected a number, got {raw!r}") from None
    if kind == "bool":
        if raw.strip().lower() not in _BOOL_WORDS:
            raise ConfigError(f"config key {name}: expected true/false, got {raw!r}")
        return _BOOL_WORDS[raw.strip().lower()]
    raise ConfigError(f"config key {name} has unsupported type {kind}")


def parse_config_text(text: str, source: str = "<config>") -> PipelineConfig:
    """Flat key=value format; # starts a comment; keys match config fields."""
    types = {f.name: f.type for f in fields(PipelineConfig)}
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in types:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate config key {key!r}")
        values[key] = _coerce(key, types[key], raw)
    return replace(PipelineConfig(), **values)


def load_config(path, overrides: dict | None = None) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = parse_config_text(path.read_text(encoding="utf-8"), source=str(path))
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


class TestPartition:
    """Holds the held-out rows; enforces that they are taken exactly once."""

    __test__ = False  # not a test case despite the name

    def __init__(self, X: np.ndarray, y: np.ndarray):
        self._X = X
        self._y = y
        self.reads = 0

    def take(self) -> tuple[np.ndarray, np.ndarray]:
        self.reads += 1
        if self.reads > 1:
            raise DataError("test partition may be read only once per run")
        return self._X, self._y


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path: Path) -> str:
    return _sha256_bytes(Path(path).read_bytes())


def _stable_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


class _Runner:
    """Runs stages into out/stages/<name>, reusing outputs whose key matches."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.stages_dir = out_dir / "stages"
        self.failed_dir = out_dir / "failed"
        self.stages_dir.mkdir(parents=True, exist_ok=True)
        self.record: dict[str, dict] = {}

    def path(self, stage: str, name: str) -> Path:
        return self.stages_dir / stage / name

    def run(self, stage: str, key_parts: dict, inputs: dict[str, Path], outputs: list[str], fn):
        """fn(stage_dir) must create every declared output inside stage_dir."""
        input_hashes = {name: _sha256_file(p) for name, p in sorted(inputs.items())}
        key = _sha256_bytes(
            json.dumps(
                {"stage": stage, "config": key_parts, "inputs": input_hashes}, sort_keys=True
            ).encode("utf-8")
        )
        stage_dir = self.stages_dir / stage
        manifest_path = stage_dir / "stage.json"
        if manifest_path.is_file():
            try:
                old = json.loads(manifest_path.read_text(encoding="utf-8"))
            except json.JSONDecodeError:
                old = {}
            if old.get("key") == key and all((stage_dir / o).is_file() for o in outputs):
                self.record[stage] = {"key": key, "cached": True, "seconds": 0.0}
                return stage_dir
        if stage_dir.exists():
            shutil.rmtree(stage_dir)
        stage_dir.mkdir(parents=True)
        started = time.perf_counter()
        try:
            fn(stage_dir)
            missing = [o for o in outputs if not (stage_dir / o).is_file()]
            if missing:
                raise DataError(f"stage did not produce {missing}")
        except Exception as exc:
            target = self.failed_dir / stage
            if target.exists():
                shutil.rmtree(target)
            self.failed_dir.mkdir(parents=True, exist_ok=True)
            shutil.move(str(stage_dir), str(target))
            raise StageError(
                stage, f"partial outputs moved to {target}", exc
            ) from exc
        manifest_path.write_text(
            _stable_json({"key": key, "outputs": outputs}), encoding="utf-8"
        )
        self.record[stage] = {
            "key": key,
            "cached": False,
            "seconds": time.perf_counter() - started,
        }
        return stage_dir


@dataclass
class PipelineResult:
    out_dir: Path
    stages: dict[str, dict]
    report: dict | None = None
    report_path: Path | None = None
    manifest_path: Path | None = None
    plot_paths: tuple[Path, ...] = ()
    test_partition_reads: int = 0


def _read_meta(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def _labeled_y(changes: ChangeSet) -> np.ndarray:
    return np.asarray([r.label for r in changes.records if r.label is not None], dtype=np.int64)


def _stage_ingest(cfg: PipelineConfig, runner: _Runner) -> Path:
    source = Path(cfg.labeled_table or cfg.changelog)
    use_table = cfg.labeled_table is not None

    def fn(stage_dir: Path):
        if use_table:
            changes = read_changes(source, require_labels=False)
        else:
            changes = parse_changelog(source.read_text(encoding="utf-8"))
        write_changes(changes, stage_dir / "changes.csv")
        meta = {
            "records": len(changes.records),
            "commits": len({r.commit_id for r in changes.records}),
            "authors": len({r.author_id for r in changes.records}),
            "files": len({r.file_path for r in changes.records}),
            "span_start": changes.start,
            "span_end": changes.end,
        }
        (stage_dir / "ingest_meta.json").write_text(_stable_json(meta), encoding="utf-8")

    return runner.run(
        "ingest",
        {"source": "table" if use_table else "changelog"},
        {"source": source},
        ["changes.csv", "ingest_meta.json"],
        fn,
    )


def _stage_label(cfg: PipelineConfig, runner: _Runner) -> Path:
    changes_path = runner.path("ingest", "changes.csv")
    inputs = {"changes": changes_path}
    for name in ("messages", "blame", "issue_reports"):
        value = getattr(cfg, name)
        if value:
            inputs[name] = Path(value)

    def fn(stage_dir: Path):
        changes = read_changes(changes_path)
        if all(r.label is not None for r in changes.records):
            write_changes(changes, stage_dir / "labeled.csv")
            meta = {
                "szz": False,
                "labeled": len(changes.records),
                "positives": int(sum(r.label for r in changes.records)),
            }
            (stage_dir / "label_meta.json").write_text(_stable_json(meta), encoding="utf-8")
            return
        if not cfg.messages or not cfg.blame:
            raise ConfigError(
                "changes are unlabeled; labeling needs messages and blame tables"
            )
        messages = szz.messages_from_table(Path(cfg.messages).read_text(encoding="utf-8"))
        blame = szz.blame_from_table(Path(cfg.blame).read_text(encoding="utf-8"))
        report_created = None
        if cfg.issue_reports:
            report_created = _read_issue_reports(Path(cfg.issue_reports))
        timestamps = {}
        for rec in changes.records:
            timestamps.setdefault(rec.commit_id, rec.timestamp)
        fixes = szz.identify_fix_commits(
            messages, cfg.issue_pattern, fallback=cfg.fix_fallback, timestamps=timestamps
        )
        by_fix: dict[str, list] = {}
        for rec in blame:
            by_fix.setdefault(rec.fix_commit_id, []).append(rec)
        pairs = set()
        dated_fixes = 0
        for fix in sorted(fixes, key=lambda f: f.commit_id):
            if fix.commit_id not in timestamps:
                continue  # cannot date a fix outside the mined history
            dated_fixes += 1
            pairs |= szz.trace_bug_introducers(
                fix,
                by_fix.get(fix.commit_id, []),
                report_created=report_created,
                repository_start=changes.start,
            )
        threshold = szz.compute_exposure_threshold(changes)
        labeled = szz.label_early_exposed(changes, pairs, threshold)
        write_changes(labeled, stage_dir / "labeled.csv")
        meta = {
            "szz": True,
            "labeled": len(labeled.records),
            "positives": int(sum(r.label for r in labeled.records)),
            "fix_commits": dated_fixes,
            "defect_pairs": len(pairs),
            "threshold_seconds": threshold.seconds,
        }
        (stage_dir / "label_meta.json").write_text(_stable_json(meta), encoding="utf-8")

    return runner.run(
        "label",
        {"issue_pattern": cfg.issue_pattern, "fix_fallback": cfg.fix_fallback},
        inputs,
        ["labeled.csv", "label_meta.json"],
        fn,
    )


def _read_issue_reports(path: Path) -> dict[str, int]:
    """issue,created table mapping issue ids to report creation timestamps."""
    import csv
    import io

    reader = csv.reader(io.StringIO(path.read_text(encoding="utf-8")))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["issue", "created"]:
        raise DataError(f"{path}: expected header issue,created")
    out = {}
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{rownum}: expected 2 fields")
        try:
            out[row[0].strip()] = int(row[1])
        except ValueError:
            raise DataError(f"{path}:{rownum}: non-integer timestamp {row[1]!r}") from None
    return out


def _stage_graph(cfg: PipelineConfig, runner: _Runner) -> Path:
    labeled_path = runner.path("label", "labeled.csv")
    key_parts = {"projection_weight": cfg.projection_weight, "graph_scope": cfg.graph_scope}
    if cfg.graph_scope == SCOPE_TRAIN_ONLY:
        key_parts["seed"] = cfg.seed
        key_parts["train_fraction"] = cfg.train_fraction

    def fn(stage_dir: Path):
        changes = read_changes(labeled_path)
        source = changes
        if cfg.graph_scope == SCOPE_TRAIN_ONLY:
            labeled_records = [r for r in changes.records if r.label is not None]
            train_idx, _ = stratified_split_indices(
                _labeled_y(changes), cfg.train_fraction, derive_seed(cfg.seed, "split")
            )
            keep = [labeled_records[i] for i in train_idx]
            source = ChangeSet.from_records(keep)
        graph = build_contribution_graph(source)
        projection = project_developer_graph(graph, cfg.projection_weight)
        write_bipartite(graph, stage_dir / "bipartite.csv")
        write_projection(projection, stage_dir / "projection.csv")
        meta = {
            "scope": cfg.graph_scope,
            "developers": len(graph.developers),
            "files": len(graph.files),
            "bipartite_edges": len(graph.weights),
            "total_weight": graph.total_weight(),
            "projection_edges": projection.edge_count(),
        }
        (stage_dir / "graph_meta.json").write_text(_stable_json(meta), encoding="utf-8")

    return runner.run(
        "graph",
        key_parts,
        {"labeled": labeled_path},
        ["bipartite.csv", "projection.csv", "graph_meta.json"],
        fn,
    )


def _stage_features(cfg: PipelineConfig, runner: _Runner) -> Path:
    labeled_path = runner.path("label", "labeled.csv")
    bipartite_path = runner.path("graph", "bipartite.csv")
    key_parts = {
        "setting": cfg.setting,
        "projection_weight": cfg.projection_weight,
    }
    if cfg.setting == 2:
        key_parts["seed"] = cfg.seed
        key_parts["embedding_dim"] = cfg.embedding_dim

    def fn(stage_dir: Path):
        changes = read_changes(labeled_path)
        graph = read_bipartite(bipartite_path)
        projection = project_developer_graph(graph, cfg.projection_weight)
        meta = {"setting": cfg.setting}
        if cfg.setting == 1:
            centralities = compute_centralities(projection)
            fm = assemble_features(changes, 1, centralities=centralities)
        else:
            partition = louvain(projection, derive_seed(cfg.seed, "louvain"))
            embeddings = node2vec_embed(
                projection, derive_seed(cfg.seed, "node2vec"), dim=cfg.embedding_dim
            )
            fm = assemble_features(changes, 2, partition=partition, embeddings=embeddings)
            meta["communities"] = partition.community_count()
            meta["modularity"] = partition.modularity
            meta["embedding"] = embeddings.params
        if fm.excluded_unlabeled:
            warnings.warn(
                f"excluded {fm.excluded_unlabeled} unlabeled changes from the feature matrix",
                stacklevel=2,
            )
        write_features(fm, stage_dir / "features.csv")
        meta["rows"] = len(fm)
        meta["columns"] = list(fm.columns)
        meta["excluded_unlabeled"] = fm.excluded_unlabeled
        (stage_dir / "features_meta.json").write_text(_stable_json(meta), encoding="utf-8")

    return runner.run(
        "features",
        key_parts,
        {"labeled": labeled_path, "bipartite": bipartite_path},
        ["features.csv", "features_meta.json"],
        fn,
    )


def _stage_train(cfg: PipelineConfig, runner: _Runner) -> Path:
    features_path = runner.path("features", "features.csv")
    kinds = cfg.kinds()
    key_parts = {
        "classifiers": list(kinds),
        "grid": cfg.grid,
        "folds": cfg.folds,
        "smote_k": cfg.smote_k,
        "train_fraction": cfg.train_fraction,
        "seed": cfg.seed,
    }
    outputs = ["test.csv", "train_meta.json"] + [
        f"model_{_KIND_FILE_ALIAS[k]}.bin" for k in kinds
    ]

    def fn(stage_dir: Path):
        fm = read_features(features_path)
        train_idx, test_idx = stratified_split_indices(
            fm.y, cfg.train_fraction, derive_seed(cfg.seed, "split")
        )
        train_fm = fm.subset(train_idx, ROLE_TRAIN)
        test_fm = fm.subset(test_idx, ROLE_TEST)
        write_features(test_fm, stage_dir / "test.csv")

        scaler = minmax_fit(train_fm)
        X_scaled = minmax_apply(scaler, train_fm.X)
        y = train_fm.y

        chosen: dict[str, dict] = {}
        cv_results: dict[str, list] = {}
        if cfg.grid:
            for kind in kinds:
                scores_out: list = []
                spec = grid_search(
                    kind,
                    X_scaled,
                    y,
                    grid=DEFAULT_GRIDS[kind],
                    folds=cfg.folds,
                    seed=derive_seed(cfg.seed, "grid"),
                    smote_k=cfg.smote_k,
                    scores_out=scores_out,
                )
                chosen[kind] = spec.resolved()
                cv_results[kind] = [
                    {"hyperparameters": params, "mean_f1": score}
                    for params, score in scores_out
                ]
        else:
            for kind in kinds:
                chosen[kind] = ClassifierSpec(kind=kind).resolved()

        X_bal, y_bal = smote_oversample(
            X_scaled, y, SmoteConfig(k=cfg.smote_k, seed=derive_seed(cfg.seed, "smote.final"))
        )
        for kind in kinds:
            alias = _KIND_FILE_ALIAS[kind]
            spec = ClassifierSpec(
                kind=kind,
                hyperparameters=chosen[kind],
                seed=derive_seed(cfg.seed, f"model.{alias}"),
            )
            model = train_classifier(
                spec,
                X_bal,
                y_bal,
                scaler=scaler,
                columns=fm.columns,
                manifest={"setting": cfg.setting, "grid": cfg.grid},
            )
            save_model(model, stage_dir / f"model_{alias}.bin")

        meta = {
            "n_rows": len(fm),
            "n_train": len(train_fm),
            "n_test": len(test_fm),
            "positives_train": int(train_fm.y.sum()),
            "positives_test": int(test_fm.y.sum()),
            "smote_added": int(len(y_bal) - len(y)),
            "grid": cfg.grid,
            "folds": cfg.folds if cfg.grid else None,
            "hyperparameters": chosen,
            "cv_results": cv_results,
        }
        (stage_dir / "train_meta.json").write_text(_stable_json(meta), encoding="utf-8")

    return runner.run("train", key_parts, {"features": features_path}, outputs, fn)


def _stage_evaluate(cfg: PipelineConfig, runner: _Runner) -> tuple[Path, int]:
    kinds = cfg.kinds()
    inputs = {
        "test": runner.path("train", "test.csv"),
        "train_meta": runner.path("train", "train_meta.json"),
        "ingest_meta": runner.path("ingest", "ingest_meta.json"),
        "label_meta": runner.path("label", "label_meta.json"),
        "graph_meta": runner.path("graph", "graph_meta.json"),
        "features_meta": runner.path("features", "features_meta.json"),
    }
    for kind in kinds:
        alias = _KIND_FILE_ALIAS[kind]
        inputs[f"model_{alias}"] = runner.path("train", f"model_{alias}.bin")
    reads_box = {"reads": 0}

    def fn(stage_dir: Path):
        test_fm = read_features(inputs["test"])
        partition = TestPartition(test_fm.X, test_fm.y)
        X_test, y_test = partition.take()
        results = {}
        for kind in kinds:
            alias = _KIND_FILE_ALIAS[kind]
            model = load_model(inputs[f"model_{alias}"])
            scores = predict_scores(model, X_test, raw=True)
            report = evaluate_scores(scores, y_test, threshold=0.5)
            curve = pr_curve(scores, y_test)
            bt, bp, br, bf1 = best_f1_threshold(curve)
            _write_curve(stage_dir / f"pr_curve_{alias}.csv", curve)
            results[kind] = {
                "hyperparameters": model.hyperparameters,
                "metrics": {
                    "precision": report.precision,
                    "recall": report.recall,
                    "f1": report.f1,
                    "mcc": report.mcc,
                    "auc_pr": report.auc_pr,
                    "threshold": report.threshold,
                },
                "best_f1": {
                    "threshold": bt,
                    "precision": bp,
                    "recall": br,
                    "f1": bf1,
                },
                "confusion": {
                    "tp": report.counts.tp,
                    "fp": report.counts.fp,
                    "fn": report.counts.fn,
                    "tn": report.counts.tn,
                },
            }
        report_doc = {
            "config": {
                "setting": cfg.setting,
                "classifier": cfg.classifier,
                "projection_weight": cfg.projection_weight,
                "graph_scope": cfg.graph_scope,
                "seed": cfg.seed,
                "train_fraction": cfg.train_fraction,
                "grid": cfg.grid,
                "folds": cfg.folds,
                "smote_k": cfg.smote_k,
                "embedding_dim": cfg.embedding_dim if cfg.setting == 2 else None,
            },
            "seed_derivation": seed_derivation(cfg.seed),
            "data": {
                "ingest": _read_meta(inputs["ingest_meta"]),
                "label": _read_meta(inputs["label_meta"]),
                "graph": _read_meta(inputs["graph_meta"]),
                "features": _read_meta(inputs["features_meta"]),
                "train": _read_meta(inputs["train_meta"]),
            },
            "classifiers": results,
        }
        (stage_dir / "report.json").write_text(_stable_json(report_doc), encoding="utf-8")
        reads_box["reads"] = partition.reads

    outputs = ["report.json"] + [f"pr_curve_{_KIND_FILE_ALIAS[k]}.csv" for k in kinds]
    stage_dir = runner.run("evaluate", {"classifiers": list(kinds)}, inputs, outputs, fn)
    return stage_dir, reads_box["reads"]


def _write_curve(path: Path, curve) -> None:
    lines = ["threshold,precision,recall"]
    for t, p, r in curve.points:
        lines.append(f"{t!r},{p!r},{r!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_plot_data(out_dir) -> list[Path]:
    """Copy PR curves and write the metric comparison table under plots/.

    Reruns are idempotent: contents depend only on the evaluate outputs.
    """
    out_dir = Path(out_dir)
    report_path = out_dir / "report.json"
    evaluate_dir = out_dir / "stages" / "evaluate"
    if not report_path.is_file() or not evaluate_dir.is_dir():
        raise DataError(f"no evaluation outputs under {out_dir}; run evaluate first")
    report = json.loads(report_path.read_text(encoding="utf-8"))
    plots = out_dir / "plots"
    plots.mkdir(parents=True, exist_ok=True)
    written = []
    rows = ["classifier,precision,recall,f1,mcc,auc_pr,best_f1_threshold"]
    for kind in sorted(report["classifiers"]):
        entry = report["classifiers"][kind]
        m = entry["metrics"]
        rows.append(
            f"{kind},{m['precision']!r},{m['recall']!r},{m['f1']!r},"
            f"{m['mcc']!r},{m['auc_pr']!r},{entry['best_f1']['threshold']!r}"
        )
        alias = _KIND_FILE_ALIAS[kind]
        src = evaluate_dir / f"pr_curve_{alias}.csv"
        if not src.is_file():
            raise DataError(f"missing curve data {src}")
        dst = plots / f"pr_curve_{alias}.csv"
        dst.write_bytes(src.read_bytes())
        written.append(dst)
    comparison = plots / "metric_comparison.csv"
    comparison.write_text("\n".join(rows) + "\n", encoding="utf-8")
    written.append(comparison)
    return written


def run_pipeline(cfg: PipelineConfig, upto: str = "run") -> PipelineResult:
    """Execute stages in order through `upto` ('run' = everything plus plots)."""
    cfg.validate()
    target = "evaluate" if upto == "run" else upto
    if target not in STAGE_ORDER:
        raise ConfigError(f"unknown stage {upto!r}; use one of {STAGE_ORDER + ('run',)}")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = _Runner(out_dir)

    last = STAGE_ORDER.index(target)
    result = PipelineResult(out_dir=out_dir, stages=runner.record)
    started = time.perf_counter()

    _stage_ingest(cfg, runner)
    if last >= 1:
        _stage_label(cfg, runner)
    if last >= 2:
        _stage_graph(cfg, runner)
    if last >= 3:
        _stage_features(cfg, runner)
    if last >= 4:
        _stage_train(cfg, runner)
    if last >= 5:
        stage_dir, reads = _stage_evaluate(cfg, runner)
        report_path = out_dir / "report.json"
        report_path.write_bytes((stage_dir / "report.json").read_bytes())
        result.report = json.loads(report_path.read_text(encoding="utf-8"))
        result.report_path = report_path
        result.test_partition_reads = reads
    if upto == "run":
        result.plot_paths = tuple(emit_plot_data(out_dir))

    manifest = {
        "config": {f.name: getattr(cfg, f.name) for f in fields(PipelineConfig)},
        "seed_derivation": seed_derivation(cfg.seed),
        "versions": _version_info(),
        "stages": runner.record,
        "test_partition_reads": result.test_partition_reads,
        "wall_seconds": time.perf_counter() - started,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(_stable_json(manifest), encoding="utf-8")
    result.manifest_path = manifest_path
    return result


def _version_info() -> dict:
    import sklearn

    from . import __version__

    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scikit-learn": sklearn.__version__,
    }
