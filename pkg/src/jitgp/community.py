"""Louvain community detection on the weighted developer projection.

Local moves use the standard modularity gain; node visitation order is a
seeded shuffle, so results are reproducible for a fixed seed.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field

from .graphs import ProjectionGraph

# minimum gain for a move / level to count as an improvement; guards against
# float noise producing infinite move loops
_GAIN_EPS = 1e-12
_MAX_LEVELS = 100


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict[str, int]
    modularity: float
    level_modularity: tuple[float, ...] = field(default=())

    def community_count(self) -> int:
        return len(set(self.assignment.values()))


def modularity(pg: ProjectionGraph, assignment: dict[str, int]) -> float:
    """Weighted Newman modularity of a full node partition; 0 for edgeless graphs."""
    m = float(sum(pg.weights.values()))
    if m == 0.0:
        return 0.0
    strength = {u: 0.0 for u in pg.nodes}
    intra = 0.0
    for (u, v), w in pg.weights.items():
        strength[u] += w
        strength[v] += w
        if assignment[u] == assignment[v]:
            intra += w
    tot = defaultdict(float)
    for u in pg.nodes:
        tot[assignment[u]] += strength[u]
    q = intra / m
    two_m = 2.0 * m
    for t in tot.values():
        q -= (t / two_m) ** 2
    return q


def _one_level(adj, loops, rng):
    """One round of local moves on an aggregated graph.

    adj: list of dicts neighbor -> weight (no self entries); loops: per-node
    self-loop weight counted once. Returns (community list, moved flag).
    Community labels may exceed len(adj) when a node retreats to a fresh
    singleton.
    """
    n = len(adj)
    k = [sum(adj[i].values()) + 2.0 * loops[i] for i in range(n)]
    m2 = sum(k)
    com = list(range(n))
    tot = defaultdict(float)
    for i in range(n):
        tot[i] = k[i]
    next_fresh = n

    order = list(range(n))
    rng.shuffle(order)
    moved_any = False
    improved = True
    while improved:
        improved = False
        for i in order:
            ci = com[i]
            w_to = defaultdict(float)
            for j, w in adj[i].items():
                w_to[com[j]] += w
            tot[ci] -= k[i]
            stay = w_to.get(ci, 0.0) - tot[ci] * k[i] / m2
            # candidates: stay, then a fresh singleton, then neighbors by id
            best_c, best_gain = ci, stay
            if 0.0 > best_gain + _GAIN_EPS:
                best_c, best_gain = next_fresh, 0.0
            for c in sorted(w_to):
                if c == ci:
                    continue
                gain = w_to[c] - tot[c] * k[i] / m2
                if gain > best_gain + _GAIN_EPS:
                    best_c, best_gain = c, gain
            com[i] = best_c
            tot[best_c] += k[i]
            if best_c != ci:
                if best_c == next_fresh:
                    next_fresh += 1
                improved = True
                moved_any = True
    return com, moved_any


def _aggregate(adj, loops, com):
    """Collapse communities into super-nodes, keeping intra weight as self-loops.

    Returns (new adj, new loops, groups) where groups maps each old node to
    its new super-node index (labels renumbered in sorted order).
    """
    labels = sorted(set(com))
    remap = {c: i for i, c in enumerate(labels)}
    groups = [remap[c] for c in com]
    k = len(labels)
    new_adj = [defaultdict(float) for _ in range(k)]
    new_loops = [0.0] * k
    for i in range(len(adj)):
        gi = groups[i]
        new_loops[gi] += loops[i]
        for j, w in adj[i].items():
            if j <= i:
                continue
            gj = groups[j]
            if gi == gj:
                new_loops[gi] += w
            else:
                new_adj[gi][gj] += w
                new_adj[gj][gi] += w
    return [dict(a) for a in new_adj], new_loops, groups


def louvain(pg: ProjectionGraph, seed: int = 0) -> CommunityPartition:
    """Community partition maximizing modularity greedily, level by level.

    The reported modularity is recomputed on the original graph, and
    level_modularity records that value after each aggregation level. An
    edgeless graph yields singleton communities with modularity 0.
    """
    nodes = list(pg.nodes)
    if not pg.weights:
        return CommunityPartition(
            assignment={u: i for i, u in enumerate(nodes)},
            modularity=0.0,
            level_modularity=(0.0,),
        )
    idx = {u: i for i, u in enumerate(nodes)}
    adj = [dict() for _ in nodes]
    loops = [0.0] * len(nodes)
    for (u, v), w in sorted(pg.weights.items()):
        adj[idx[u]][idx[v]] = float(w)
        adj[idx[v]][idx[u]] = float(w)

    rng = random.Random(seed)
    membership = list(range(len(nodes)))  # original node -> current super-node
    history: list[float] = []

    def flat_assignment():
        return {u: membership[idx[u]] for u in nodes}

    for level in range(_MAX_LEVELS):
        com, moved = _one_level(adj, loops, rng)
        if not moved:
            if level == 0:
                history.append(modularity(pg, flat_assignment()))
            break
        adj, loops, groups = _aggregate(adj, loops, com)
        membership = [groups[com[m]] for m in membership]
        history.append(modularity(pg, flat_assignment()))
        if len(history) >= 2 and history[-1] <= history[-2] + _GAIN_EPS:
            break

    remap: dict[int, int] = {}
    final: dict[str, int] = {}
    for u in nodes:
        c = membership[idx[u]]
        if c not in remap:
            remap[c] = len(remap)
        final[u] = remap[c]
    return CommunityPartition(
        assignment=final,
        modularity=modularity(pg, final),
        level_modularity=tuple(history),
    )
