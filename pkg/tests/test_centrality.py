"""Centrality measures checked against exhaustive-enumeration oracles."""

from __future__ import annotations

import numpy as np
import pytest

from jitgp.centrality import (
    betweenness,
    closeness,
    compute_centralities,
    degree,
    harmonic,
    pagerank,
    path_statistics,
)
from jitgp.errors import DomainError
from jitgp.graphs import ProjectionGraph

from .gen import random_graph
from .oracles import (
    brute_betweenness,
    brute_closeness,
    brute_degree,
    brute_harmonic,
    dense_pagerank,
)


def _pg(nodes, weights) -> ProjectionGraph:
    return ProjectionGraph(nodes=tuple(nodes), weights=dict(weights))


def test_path_graph_handmade_values():
    # A-B-C: the middle node carries the one A..C shortest path
    pg = _pg(["A", "B", "C"], {("A", "B"): 1, ("B", "C"): 1})
    assert betweenness(pg) == {"A": 0.0, "B": 1.0, "C": 0.0}
    assert closeness(pg)["B"] == pytest.approx(2 / 2)
    assert closeness(pg)["A"] == pytest.approx(2 / 3)
    assert harmonic(pg)["B"] == pytest.approx(1.0)
    assert harmonic(pg)["A"] == pytest.approx((1.0 + 0.5) / 2)


def test_star_center_betweenness():
    # 4 leaves: center lies on all C(4,2)=6 leaf pairs
    wts = {("hub", f"l{i}"): 1 for i in range(4)}
    pg = _pg(["hub"] + [f"l{i}" for i in range(4)], wts)
    assert betweenness(pg)["hub"] == 6.0
    assert betweenness(pg)["l0"] == 0.0


def test_disconnected_components_conventions():
    pg = _pg(["a", "b", "c", "d"], {("a", "b"): 1, ("c", "d"): 1})
    c = closeness(pg)
    # only one reachable peer at distance 1: (n-1)/1 = 3
    assert c["a"] == pytest.approx(3.0)
    h = harmonic(pg)
    assert h["a"] == pytest.approx(1.0 / 3)


def test_single_node_and_isolated():
    lone = _pg(["only"], {})
    assert closeness(lone)["only"] == 0.0
    assert harmonic(lone)["only"] == 0.0
    assert degree(lone)["only"] == 0.0
    assert pagerank(lone)["only"] == pytest.approx(1.0)


def test_degree_uses_weights():
    pg = _pg(["x", "y", "z"], {("x", "y"): 5, ("y", "z"): 2})
    assert degree(pg) == {"x": 5.0, "y": 7.0, "z": 2.0}


def test_pagerank_sums_to_one_and_ranks_hub_highest():
    wts = {("hub", f"l{i}"): 1 for i in range(5)}
    pg = _pg(["hub"] + [f"l{i}" for i in range(5)], wts)
    pr = pagerank(pg)
    assert sum(pr.values()) == pytest.approx(1.0, abs=1e-9)
    assert pr["hub"] > pr["l0"]


def test_pagerank_weighted_pull():
    # y splits its mass 4:1 between x and z
    pg = _pg(["x", "y", "z"], {("x", "y"): 4, ("y", "z"): 1})
    pr = pagerank(pg)
    assert pr["x"] > pr["z"]


def test_all_measures_match_oracles_on_random_graphs():
    rng = np.random.default_rng(99)
    for _ in range(50):
        nodes, weights = random_graph(rng)
        pg = _pg(nodes, weights)
        assert degree(pg) == pytest.approx(brute_degree(nodes, weights))
        assert betweenness(pg) == pytest.approx(brute_betweenness(nodes, weights), abs=1e-12)
        assert closeness(pg) == pytest.approx(brute_closeness(nodes, weights), abs=1e-12)
        assert harmonic(pg) == pytest.approx(brute_harmonic(nodes, weights), abs=1e-12)
        dense = dense_pagerank(nodes, weights)
        mine = pagerank(pg)
        assert max(abs(mine[u] - dense[u]) for u in nodes) < 1e-8


def test_compute_centralities_bundles_all_five():
    pg = _pg(["a", "b"], {("a", "b"): 2})
    vectors = compute_centralities(pg)
    v = vectors["a"]
    assert (v.degree, v.betweenness, v.closeness, v.harmonic) == (2.0, 0.0, 1.0, 1.0)
    assert v.pagerank == pytest.approx(0.5)


def test_path_statistics_counts_routes():
    # two parallel 2-hop routes from s to t
    pg = _pg(
        ["s", "m1", "m2", "t"],
        {("s", "m1"): 1, ("s", "m2"): 1, ("m1", "t"): 1, ("m2", "t"): 1},
    )
    st = path_statistics(pg, "s", "t", "m1")
    assert (st.distance, st.path_count, st.through_count) == (2, 2, 1)
    with pytest.raises(DomainError):
        path_statistics(pg, "s", "s", "m1")


def test_path_statistics_unreachable_target():
    pg = _pg(["s", "t"], {})
    with pytest.raises(DomainError):
        path_statistics(pg, "s", "t", "s")
