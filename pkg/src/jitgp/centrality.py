"""Centrality measures over the developer projection graph.

Distances are unweighted hop counts; edge weights only enter the weighted
degree and the PageRank transition probabilities.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graphs import ProjectionGraph

DAMPING = 0.85
PAGERANK_TOL = 1e-8
PAGERANK_MAX_ITER = 100


@dataclass(frozen=True)
class CentralityVector:
    degree: float
    betweenness: float
    closeness: float
    harmonic: float
    pagerank: float


@dataclass(frozen=True)
class PathStatistics:
    """Shortest-path counts between one node pair, through an optional pivot."""

    source: str
    target: str
    distance: int
    path_count: int
    through_count: int


def _index_graph(pg: ProjectionGraph):
    nodes = list(pg.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    adj = [[] for _ in nodes]
    wts = [[] for _ in nodes]
    for (u, v), w in sorted(pg.weights.items()):
        ui, vi = idx[u], idx[v]
        adj[ui].append(vi)
        wts[ui].append(float(w))
        adj[vi].append(ui)
        wts[vi].append(float(w))
    return nodes, idx, adj, wts


def bfs_shortest_paths(adj: list[list[int]], source: int):
    """Hop distances and shortest-path counts from one source.

    Returns (dist, sigma, order, preds): dist -1 where unreachable, sigma the
    number of distinct shortest paths, order the non-source visitation order,
    preds the shortest-path predecessor lists.
    """
    n = len(adj)
    dist = [-1] * n
    sigma = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    dist[source] = 0
    sigma[source] = 1
    order = []
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if u != source:
            order.append(u)
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
                preds[v].append(u)
    return dist, sigma, order, preds


def degree(pg: ProjectionGraph) -> dict[str, float]:
    """Weighted degree: total weight incident to each developer."""
    out = {u: 0.0 for u in pg.nodes}
    for (u, v), w in pg.weights.items():
        out[u] += w
        out[v] += w
    return out


def betweenness(pg: ProjectionGraph) -> dict[str, float]:
    """Brandes accumulation over unordered pairs, unnormalized."""
    nodes, _, adj, _ = _index_graph(pg)
    n = len(nodes)
    score = [0.0] * n
    for s in range(n):
        dist, sigma, order, preds = bfs_shortest_paths(adj, s)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            score[w] += delta[w]
    # each unordered pair was accumulated from both endpoints
    return {nodes[i]: score[i] / 2.0 for i in range(n)}


def closeness(pg: ProjectionGraph) -> dict[str, float]:
    """(n-1) / sum of hop distances to reachable peers; 0 when none reachable."""
    nodes, _, adj, _ = _index_graph(pg)
    n = len(nodes)
    out = {}
    for i in range(n):
        dist, _, _, _ = bfs_shortest_paths(adj, i)
        total = sum(d for d in dist if d > 0)
        out[nodes[i]] = (n - 1) / total if total > 0 else 0.0
    return out


def harmonic(pg: ProjectionGraph) -> dict[str, float]:
    """Mean reciprocal hop distance to the other n-1 nodes (0 for unreachable)."""
    nodes, _, adj, _ = _index_graph(pg)
    n = len(nodes)
    if n == 1:
        return {nodes[0]: 0.0}
    out = {}
    for i in range(n):
        dist, _, _, _ = bfs_shortest_paths(adj, i)
        out[nodes[i]] = sum(1.0 / d for d in dist if d > 0) / (n - 1)
    return out


def pagerank(pg: ProjectionGraph) -> dict[str, float]:
    """Weighted PageRank, damping 0.85; isolated nodes spread their mass uniformly."""
    nodes, idx, adj, wts = _index_graph(pg)
    n = len(nodes)
    deg = np.zeros(n)
    src, dst, wgt = [], [], []
    for u in range(n):
        for v, w in zip(adj[u], wts[u]):
            deg[u] += w
            src.append(u)
            dst.append(v)
            wgt.append(w)
    src = np.asarray(src, dtype=np.intp)
    dst = np.asarray(dst, dtype=np.intp)
    wgt = np.asarray(wgt, dtype=float)
    dangling = deg == 0.0
    safe_deg = np.where(dangling, 1.0, deg)

    x = np.full(n, 1.0 / n)
    for _ in range(PAGERANK_MAX_ITER):
        contrib = np.zeros(n)
        if len(src):
            np.add.at(contrib, dst, wgt * x[src] / safe_deg[src])
        contrib += x[dangling].sum() / n
        new = (1.0 - DAMPING) / n + DAMPING * contrib
        if np.abs(new - x).sum() < PAGERANK_TOL:
            x = new
            break
        x = new
    total = x.sum()
    if abs(total - 1.0) > 1e-6:
        raise DomainError(f"pagerank mass drifted to {total!r}")
    return {nodes[i]: float(x[i]) for i in range(n)}


def compute_centralities(pg: ProjectionGraph) -> dict[str, CentralityVector]:
    d = degree(pg)
    b = betweenness(pg)
    c = closeness(pg)
    h = harmonic(pg)
    pr = pagerank(pg)
    return {
        u: CentralityVector(
            degree=d[u], betweenness=b[u], closeness=c[u], harmonic=h[u], pagerank=pr[u]
        )
        for u in pg.nodes
    }


def path_statistics(pg: ProjectionGraph, source: str, target: str, through: str) -> PathStatistics:
    """Count shortest source-target paths and how many pass through a pivot node."""
    if source == target:
        raise DomainError("path statistics need two distinct endpoints")
    _, idx, adj, _ = _index_graph(pg)
    s, t, i = idx[source], idx[target], idx[through]
    dist_s, sigma_s, _, _ = bfs_shortest_paths(adj, s)
    if dist_s[t] < 0:
        raise DomainError(f"{target!r} is not reachable from {source!r}")
    dist_i, sigma_i, _, _ = bfs_shortest_paths(adj, i)
    through_count = 0
    if i not in (s, t) and dist_s[i] >= 0 and dist_i[t] >= 0:
        if dist_s[i] + dist_i[t] == dist_s[t]:
            through_count = sigma_s[i] * sigma_i[t]
    return PathStatistics(
        source=source,
        target=target,
        distance=dist_s[t],
        path_count=sigma_s[t],
        through_count=through_count,
    )
