"""Per-change feature rows derived from the developer graph.

Setting 1 uses the five centrality measures of the change author; setting 2
uses the author's community id plus their embedding vector. Rows follow the
labeled changes in change-set order; unlabeled changes are excluded and
counted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .centrality import CentralityVector
from .community import CommunityPartition
from .embedding import EmbeddingMatrix
from .errors import ConfigError, DataError, SchemaError
from .ingest import ChangeSet

SETTING_CENTRALITY = 1
SETTING_COMMUNITY = 2
SETTING1_COLUMNS = ("degree", "betweenness", "closeness", "harmonic", "pagerank")
LABEL_COLUMN = "label"

ROLE_UNSPLIT = "unsplit"
ROLE_TRAIN = "train"
ROLE_TEST = "test"
ROLE_MIXED = "mixed"


@dataclass(eq=False)
class FeatureMatrix:
    columns: tuple[str, ...]
    X: np.ndarray  # (n_rows, n_columns) float64
    y: np.ndarray  # (n_rows,) int64 in {0, 1}
    setting: int
    excluded_unlabeled: int = 0
    role: str = ROLE_UNSPLIT
    authors: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2 or self.X.shape[1] != len(self.columns):
            raise DataError(
                f"feature matrix width {self.X.shape} does not match {len(self.columns)} columns"
            )
        if len(self.y) != self.X.shape[0]:
            raise DataError("feature rows and labels disagree in length")

    def subset(self, indices: np.ndarray, role: str) -> "FeatureMatrix":
        authors = (
            tuple(self.authors[i] for i in indices) if self.authors else ()
        )
        return FeatureMatrix(
            columns=self.columns,
            X=self.X[indices].copy(),
            y=self.y[indices].copy(),
            setting=self.setting,
            excluded_unlabeled=0,
            role=role,
            authors=authors,
        )

    def __len__(self) -> int:
        return int(self.X.shape[0])


def embedding_columns(dim: int) -> tuple[str, ...]:
    return tuple(f"e{i}" for i in range(1, dim + 1))


def assemble_features(
    changes: ChangeSet,
    setting: int,
    centralities: dict[str, CentralityVector] | None = None,
    partition: CommunityPartition | None = None,
    embeddings: EmbeddingMatrix | None = None,
) -> FeatureMatrix:
    """One row per labeled change, keyed by the change author.

    Authors absent from the supplied graph artifacts get zero-imputed
    centralities/embeddings and fresh singleton community ids.
    """
    if setting == SETTING_CENTRALITY:
        if centralities is None:
            raise ConfigError("setting 1 requires centralities")
    elif setting == SETTING_COMMUNITY:
        if partition is None or embeddings is None:
            raise ConfigError("setting 2 requires a community partition and embeddings")
    else:
        raise ConfigError(f"unknown feature setting {setting!r}; use 1 or 2")

    labeled = [r for r in changes.records if r.label is not None]
    excluded = len(changes.records) - len(labeled)

    rows: list[list[float]] = []
    authors: list[str] = []
    if setting == SETTING_CENTRALITY:
        columns = SETTING1_COLUMNS
        for rec in labeled:
            cv = centralities.get(rec.author_id)
            if cv is None:
                rows.append([0.0] * 5)
            else:
                rows.append([cv.degree, cv.betweenness, cv.closeness, cv.harmonic, cv.pagerank])
            authors.append(rec.author_id)
    else:
        dim = embeddings.dim()
        columns = ("community",) + embedding_columns(dim)
        node_pos = {u: i for i, u in enumerate(embeddings.nodes)}
        known = partition.assignment
        next_community = max(known.values(), default=-1) + 1
        fresh: dict[str, int] = {}
        zeros = [0.0] * dim
        for rec in labeled:
            author = rec.author_id
            if author in known:
                cid = known[author]
            else:
                if author not in fresh:
                    fresh[author] = next_community
                    next_community += 1
                cid = fresh[author]
            pos = node_pos.get(author)
            vec = zeros if pos is None else embeddings.matrix[pos].astype(np.float64).tolist()
            rows.append([float(cid)] + vec)
            authors.append(author)

    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(columns))
    y = np.asarray([r.label for r in labeled], dtype=np.int64)
    return FeatureMatrix(
        columns=columns,
        X=X,
        y=y,
        setting=setting,
        excluded_unlabeled=excluded,
        authors=tuple(authors),
    )


def features_to_csv(fm: FeatureMatrix) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(fm.columns) + [LABEL_COLUMN])
    for row, label in zip(fm.X, fm.y):
        writer.writerow([repr(float(v)) for v in row] + [int(label)])
    return out.getvalue()


def features_from_csv(text: str) -> FeatureMatrix:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[-1] != LABEL_COLUMN:
        raise SchemaError("feature table must end with a label column")
    columns = tuple(header[:-1])
    setting = SETTING_COMMUNITY if "community" in columns else SETTING_CENTRALITY
    rows, labels = [], []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise SchemaError(f"feature row {rownum}: expected {len(header)} fields")
        try:
            rows.append([float(v) for v in row[:-1]])
            labels.append(int(row[-1]))
        except ValueError:
            raise DataError(f"feature row {rownum}: non-numeric value") from None
        if labels[-1] not in (0, 1):
            raise DataError(f"feature row {rownum}: label must be 0 or 1")
    X = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(columns))
    return FeatureMatrix(
        columns=columns, X=X, y=np.asarray(labels, dtype=np.int64), setting=setting
    )


def write_features(fm: FeatureMatrix, path) -> None:
    Path(path).write_text(features_to_csv(fm), encoding="utf-8")


def read_features(path) -> FeatureMatrix:
    return features_from_csv(Path(path).read_text(encoding="utf-8"))
