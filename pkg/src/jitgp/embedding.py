"""Structural node embeddings for the developer projection graph.

Biased second-order random walks feed a from-scratch skip-gram trainer with
negative sampling. Everything is seeded: walk randomness comes from one RNG
stream per start node, so the corpus does not depend on scheduling, and
updates use elementwise reductions plus np.add.at scatter, which keeps the
result byte-identical across thread counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .graphs import ProjectionGraph

_INIT_NS = 1
_NEG_NS = 2
_WALK_NS = 3

LR_FLOOR_FACTOR = 1e-4
_BATCH = 1024
_SCORE_CLIP = 10.0


@dataclass(frozen=True)
class EmbeddingMatrix:
    nodes: tuple[str, ...]
    matrix: np.ndarray  # (len(nodes), dim) float32, zero rows for isolated nodes
    params: dict = field(default_factory=dict)

    def vector(self, node: str) -> np.ndarray:
        return self.matrix[self.nodes.index(node)]

    def dim(self) -> int:
        return int(self.matrix.shape[1])


def _index_adjacency(pg: ProjectionGraph):
    nodes = list(pg.nodes)
    idx = {u: i for i, u in enumerate(nodes)}
    nbrs = [np.empty(0, dtype=np.int64) for _ in nodes]
    wts = [np.empty(0, dtype=np.float64) for _ in nodes]
    for u in nodes:
        pairs = pg.neighbors(u)
        if pairs:
            nbrs[idx[u]] = np.array([idx[v] for v, _ in pairs], dtype=np.int64)
            wts[idx[u]] = np.array([float(w) for _, w in pairs], dtype=np.float64)
    return nodes, nbrs, wts


def _member_mask(sorted_arr: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Membership of values in a sorted unique array."""
    if len(sorted_arr) == 0:
        return np.zeros(len(values), dtype=bool)
    pos = np.searchsorted(sorted_arr, values)
    pos_c = np.minimum(pos, len(sorted_arr) - 1)
    return (pos < len(sorted_arr)) & (sorted_arr[pos_c] == values)


def _pick(cum: np.ndarray, rng) -> int:
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def generate_walks(
    pg: ProjectionGraph,
    seed: int,
    walks_per_node: int = 10,
    walk_length: int = 80,
    return_param: float = 1.0,
    in_out_param: float = 1.0,
) -> list[np.ndarray]:
    """Second-order weighted walks; isolated nodes produce none.

    Bias on a step from prev via cur to candidate x: weight/p when x == prev,
    plain weight when x neighbors prev, weight/q otherwise. p = q = 1 reduces
    to first-order weighted sampling, which takes a precomputed fast path.
    """
    if return_param <= 0 or in_out_param <= 0:
        raise DomainError("walk bias parameters must be positive")
    nodes, nbrs, wts = _index_adjacency(pg)
    cums = [np.cumsum(w) if len(w) else w for w in wts]
    unbiased = return_param == 1.0 and in_out_param == 1.0
    walks = []
    for start in range(len(nodes)):
        if len(nbrs[start]) == 0:
            continue
        rng = np.random.default_rng([seed, _WALK_NS, start])
        for _ in range(walks_per_node):
            walk = np.empty(walk_length, dtype=np.int64)
            walk[0] = start
            cur = start
            prev = -1
            for step in range(1, walk_length):
                cand = nbrs[cur]
                if unbiased or prev < 0:
                    j = _pick(cums[cur], rng)
                else:
                    mod = np.where(
                        cand == prev,
                        1.0 / return_param,
                        np.where(_member_mask(nbrs[prev], cand), 1.0, 1.0 / in_out_param),
                    )
                    j = _pick(np.cumsum(wts[cur] * mod), rng)
                prev = cur
                cur = int(cand[j])
                walk[step] = cur
            walks.append(walk)
    return walks


def _skipgram_pairs(walks: list[np.ndarray], window: int):
    centers, contexts = [], []
    for walk in walks:
        length = len(walk)
        for d in range(1, min(window, length - 1) + 1):
            a = walk[:-d]
            b = walk[d:]
            centers.append(a)
            contexts.append(b)
            centers.append(b)
            contexts.append(a)
    return np.concatenate(centers), np.concatenate(contexts)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -_SCORE_CLIP, _SCORE_CLIP)))


def node2vec_embed(
    pg: ProjectionGraph,
    seed: int = 0,
    dim: int = 128,
    walks_per_node: int = 10,
    walk_length: int = 80,
    window: int = 10,
    return_param: float = 1.0,
    in_out_param: float = 1.0,
    negatives: int = 5,
    epochs: int = 1,
    learning_rate: float = 0.025,
) -> EmbeddingMatrix:
    """Train skip-gram-with-negative-sampling embeddings over walk corpora.

    The window is fixed (not subsampled per pair), the noise distribution is
    corpus frequency raised to 0.75, and the learning rate decays linearly to
    a floor of learning_rate * 1e-4. Isolated nodes get zero vectors; a graph
    with no edges at all is an error.
    """
    if not pg.weights:
        raise DomainError("cannot embed a graph with no edges")
    n = len(pg.nodes)
    walks = generate_walks(
        pg, seed, walks_per_node, walk_length, return_param, in_out_param
    )
    centers, contexts = _skipgram_pairs(walks, window)
    total_pairs = len(centers) * epochs

    freq = np.bincount(np.concatenate(walks), minlength=n).astype(np.float64)
    noise = freq**0.75
    noise_cum = np.cumsum(noise / noise.sum())

    init_rng = np.random.default_rng([seed, _INIT_NS])
    w_in = ((init_rng.random((n, dim), dtype=np.float32) - 0.5) / dim).astype(np.float32)
    w_out = np.zeros((n, dim), dtype=np.float32)
    neg_rng = np.random.default_rng([seed, _NEG_NS])

    # per-batch gradient accumulators; rows a batch repeats are averaged, so
    # one step never exceeds the learning rate regardless of duplication
    sum_in = np.zeros((n, dim), dtype=np.float32)
    sum_out = np.zeros((n, dim), dtype=np.float32)
    cnt_in = np.zeros(n, dtype=np.float32)
    cnt_out = np.zeros(n, dtype=np.float32)

    processed = 0
    for _ in range(epochs):
        for lo in range(0, len(centers), _BATCH):
            c = centers[lo : lo + _BATCH]
            o = contexts[lo : lo + _BATCH]
            lr = np.float32(
                learning_rate * max(LR_FLOOR_FACTOR, 1.0 - processed / total_pairs)
            )
            u = w_in[c]
            v_pos = w_out[o]
            g_pos = (1.0 - _sigmoid((u * v_pos).sum(axis=1))).astype(np.float32)

            neg = np.minimum(
                np.searchsorted(noise_cum, neg_rng.random((len(c), negatives))), n - 1
            )
            v_neg = w_out[neg]
            s_neg = _sigmoid((u[:, None, :] * v_neg).sum(axis=2))
            g_neg = (-s_neg).astype(np.float32)

            grad_u = g_pos[:, None] * v_pos + (g_neg[:, :, None] * v_neg).sum(axis=1)
            sum_in.fill(0.0)
            sum_out.fill(0.0)
            cnt_in.fill(0.0)
            cnt_out.fill(0.0)
            np.add.at(sum_in, c, grad_u.astype(np.float32))
            np.add.at(cnt_in, c, np.float32(1.0))
            np.add.at(sum_out, o, (g_pos[:, None] * u).astype(np.float32))
            np.add.at(cnt_out, o, np.float32(1.0))
            np.add.at(
                sum_out,
                neg.reshape(-1),
                (g_neg[:, :, None] * u[:, None, :]).reshape(-1, dim).astype(np.float32),
            )
            np.add.at(cnt_out, neg.reshape(-1), np.float32(1.0))
            w_in += lr * sum_in / np.maximum(cnt_in, 1.0)[:, None]
            w_out += lr * sum_out / np.maximum(cnt_out, 1.0)[:, None]
            processed += len(c)

    has_edge = np.array([len(pg.neighbors(u)) > 0 for u in pg.nodes])
    w_in[~has_edge] = 0.0
    params = {
        "dim": dim,
        "walks_per_node": walks_per_node,
        "walk_length": walk_length,
        "window": window,
        "return_param": return_param,
        "in_out_param": in_out_param,
        "negatives": negatives,
        "epochs": epochs,
        "learning_rate": learning_rate,
        "seed": seed,
    }
    return EmbeddingMatrix(nodes=tuple(pg.nodes), matrix=w_in, params=params)
