"""Weighted bipartite developer-file graph and its developer one-mode projection.

Graphs are immutable after construction: plain dict/tuple adjacency with
sorted neighbor sequences, persisted as edge-list CSV files.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DataError, DomainError, SchemaError
from .ingest import ChangeSet

AS_PAPER = "as-paper"
COMMON_NEIGHBORS = "common-neighbors"
PROJECTION_SCHEMES = (AS_PAPER, COMMON_NEIGHBORS)

DEV_PREFIX = "dev:"
FILE_PREFIX = "file:"


@dataclass(frozen=True)
class ContributionGraph:
    """Bipartite graph: developers x files, edge weight = distinct commits."""

    developers: tuple[str, ...]
    files: tuple[str, ...]
    weights: dict[tuple[str, str], int]
    change_labels: dict[tuple[str, str, str], int | None] = field(default_factory=dict)

    def node_ids(self) -> tuple[str, ...]:
        """Union node set with disjoint namespaces enforced by prefixing."""
        return tuple(DEV_PREFIX + d for d in self.developers) + tuple(
            FILE_PREFIX + f for f in self.files
        )

    def total_weight(self) -> int:
        return sum(self.weights.values())

    def developer_strength(self, dev: str) -> int:
        """Total incident weight of one developer across all files."""
        return sum(w for (d, _), w in self.weights.items() if d == dev)


@dataclass(frozen=True)
class ProjectionGraph:
    """Developer-developer projection; every developer is a node, edges need a shared file."""

    nodes: tuple[str, ...]
    weights: dict[tuple[str, str], int]
    labeled_edges: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        adjacency: dict[str, list[tuple[str, int]]] = {u: [] for u in self.nodes}
        for (u, v), w in self.weights.items():
            if u == v:
                raise DataError(f"self-loop on projection node {u!r}")
            if w <= 0:
                raise DataError(f"non-positive projection weight on ({u!r}, {v!r})")
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))
        object.__setattr__(
            self, "_adjacency", {u: tuple(sorted(nbrs)) for u, nbrs in adjacency.items()}
        )

    def neighbors(self, node: str) -> tuple[tuple[str, int], ...]:
        return self._adjacency[node]

    def edge_count(self) -> int:
        return len(self.weights)


def _edge_key(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


def build_contribution_graph(changes: ChangeSet) -> ContributionGraph:
    """One node per distinct author/file; weight counts distinct commits per pair."""
    if not changes.records:
        raise DomainError("cannot build a contribution graph from an empty change set")
    commits: dict[tuple[str, str], set[str]] = defaultdict(set)
    labels: dict[tuple[str, str, str], int | None] = {}
    for rec in changes.records:
        commits[(rec.author_id, rec.file_path)].add(rec.commit_id)
        labels[(rec.author_id, rec.file_path, rec.commit_id)] = rec.label
    weights = {pair: len(ids) for pair, ids in commits.items()}
    return ContributionGraph(
        developers=tuple(sorted({d for d, _ in weights})),
        files=tuple(sorted({f for _, f in weights})),
        weights=weights,
        change_labels=labels,
    )


def project_developer_graph(g: ContributionGraph, scheme: str = AS_PAPER) -> ProjectionGraph:
    """Developer projection: u~v iff they share a file.

    Weight schemes:

    * ``as-paper``: sum of both endpoints' incidences over every file,
      i.e. strength(u) + strength(v);
    * ``common-neighbors``: the same sum restricted to the shared files.
    """
    if scheme not in PROJECTION_SCHEMES:
        raise ConfigError(f"unknown projection weight scheme {scheme!r}; use one of {PROJECTION_SCHEMES}")
    by_file: dict[str, list[str]] = defaultdict(list)
    strength: dict[str, int] = defaultdict(int)
    for (dev, file_path), w in g.weights.items():
        by_file[file_path].append(dev)
        strength[dev] += w
    weights: dict[tuple[str, str], int] = {}
    if scheme == AS_PAPER:
        for devs in by_file.values():
            devs = sorted(devs)
            for i, u in enumerate(devs):
                for v in devs[i + 1 :]:
                    weights[_edge_key(u, v)] = strength[u] + strength[v]
    else:
        for file_path, devs in by_file.items():
            devs = sorted(devs)
            for i, u in enumerate(devs):
                for v in devs[i + 1 :]:
                    key = _edge_key(u, v)
                    weights[key] = weights.get(key, 0) + g.weights[(u, file_path)] + g.weights[(v, file_path)]
    return ProjectionGraph(nodes=g.developers, weights=weights)


def bipartite_to_csv(g: ContributionGraph) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["developer", "file", "weight"])
    for (dev, file_path), w in sorted(g.weights.items()):
        writer.writerow([dev, file_path, w])
    return out.getvalue()


def bipartite_from_csv(text: str) -> ContributionGraph:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["developer", "file", "weight"]:
        raise SchemaError(f"bad bipartite header {header!r}: expected developer,file,weight")
    weights = {}
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise SchemaError(f"bipartite row {rownum}: expected 3 fields")
        try:
            weights[(row[0], row[1])] = int(row[2])
        except ValueError:
            raise DataError(f"bipartite row {rownum}: non-integer weight {row[2]!r}") from None
    return ContributionGraph(
        developers=tuple(sorted({d for d, _ in weights})),
        files=tuple(sorted({f for _, f in weights})),
        weights=weights,
    )


def projection_to_csv(pg: ProjectionGraph) -> str:
    """Edge list with u < v lexicographically; isolated nodes do not appear."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dev_u", "dev_v", "weight"])
    for (u, v), w in sorted(pg.weights.items()):
        writer.writerow([u, v, w])
    return out.getvalue()


def write_bipartite(g: ContributionGraph, path) -> None:
    Path(path).write_text(bipartite_to_csv(g), encoding="utf-8")


def read_bipartite(path) -> ContributionGraph:
    return bipartite_from_csv(Path(path).read_text(encoding="utf-8"))


def write_projection(pg: ProjectionGraph, path) -> None:
    Path(path).write_text(projection_to_csv(pg), encoding="utf-8")
