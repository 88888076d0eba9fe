from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dagcover.graph import (
    INF,
    CycleDetected,
    Dag,
    DagCover,
    InternalInvariantViolation,
    WeightedDigraph,
    apsp_array,
    batched_apsp,
    min_apsp_over,
    scc_partition,
    shortest_distances,
    strongly_connected_components,
    topological_order,
    transitive_closure,
    weak_diameter,
)

import oracles


def cycle(n):
    return WeightedDigraph(n, [(i, (i + 1) % n, 1) for i in range(n)])


# ---- construction ------------------------------------------------------------


def test_parallel_edges_keep_minimum_weight():
    g = WeightedDigraph(3, [(0, 1, 5), (0, 1, 2), (1, 2, 3), (0, 1, 9)])
    assert g.edges == [(0, 1, 2), (1, 2, 3)]
    assert g.max_weight == 3


def test_rejects_self_loop_bad_weight_and_range():
    with pytest.raises(ValueError):
        WeightedDigraph(2, [(0, 0, 1)])
    with pytest.raises(ValueError):
        WeightedDigraph(2, [(0, 1, 0)])
    with pytest.raises(ValueError):
        WeightedDigraph(2, [(0, 2, 1)])


def test_weight_bound_is_configurable():
    with pytest.raises(ValueError):
        WeightedDigraph(2, [(0, 1, 100)], weight_exponent=2)
    assert WeightedDigraph(2, [(0, 1, 100)], weight_exponent=None).max_weight == 100


def test_induced_relabels_in_given_order():
    g = WeightedDigraph(4, [(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 1, 4)])
    sub = g.induced([3, 1, 2])
    assert sub.edges == [(0, 1, 4), (1, 2, 2), (2, 0, 3)]


# ---- SCC ---------------------------------------------------------------------------


def test_scc_four_cycle_is_one_block():
    assert strongly_connected_components(cycle(4)) == [[0, 1, 2, 3]]


def test_scc_path_blocks_in_order():
    g = WeightedDigraph(3, [(0, 1, 1), (1, 2, 1)])
    assert strongly_connected_components(g) == [[0], [1], [2]]


def test_scc_two_cycles_joined():
    g = WeightedDigraph(4, [(0, 1, 1), (1, 0, 1), (2, 3, 1), (3, 2, 1), (1, 2, 1)])
    assert strongly_connected_components(g) == [[0, 1], [2, 3]]


@pytest.mark.parametrize("seed", range(15))
def test_scc_matches_mutual_reachability(seed):
    n, edges = oracles.random_digraph(18, 30, 5, seed)
    g = WeightedDigraph(n, edges)
    blocks = strongly_connected_components(g)
    assert sorted(blocks) == sorted(oracles.mutual_blocks(n, edges))
    # blocks come in a topological order of the condensation
    where = {v: i for i, b in enumerate(blocks) for v in b}
    assert all(where[u] <= where[v] for u, v, _ in edges)
    part, label = scc_partition(g)
    assert sorted(part) == sorted(blocks)
    assert all(label[v] == i for i, b in enumerate(part) for v in b)


# ---- topological order ------------------------------------------------------------


def test_topological_order_examples():
    assert topological_order(WeightedDigraph(3, [(0, 1, 1), (1, 2, 1)])) == [0, 1, 2]
    assert topological_order(WeightedDigraph(3)) == [0, 1, 2]
    assert topological_order(WeightedDigraph(3, [(2, 0, 1)])) == [1, 2, 0]


def test_topological_order_reports_cycle():
    g = WeightedDigraph(3, [(0, 1, 1), (1, 0, 1), (1, 2, 1)])
    with pytest.raises(CycleDetected) as info:
        topological_order(g)
    cyc = info.value.cycle
    assert sorted(cyc) == [0, 1]
    assert all(g.has_edge(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1]))


@pytest.mark.parametrize("seed", range(10))
def test_topological_order_on_random_dags(seed):
    n, edges = oracles.random_dag(20, 50, 3, seed)
    order = topological_order(WeightedDigraph(n, edges))
    pos = {v: i for i, v in enumerate(order)}
    assert sorted(order) == list(range(n))
    assert all(pos[u] < pos[v] for u, v, _ in edges)


# ---- distances ------------------------------------------------------------------------


def test_distance_examples():
    g = WeightedDigraph(3, [(0, 1, 1), (1, 2, 2)])
    dm = shortest_distances(g)
    assert dm[0, 2] == 3 and dm[2, 0] == INF
    c = shortest_distances(cycle(4))
    assert c[0, 3] == 3 and c[3, 0] == 1
    assert shortest_distances(g, 0) == [0, 1, 3]


@pytest.mark.parametrize("seed", range(10))
def test_distances_match_bellman_ford(seed):
    n, edges = oracles.random_digraph(20, 45, 9, seed)
    g = WeightedDigraph(n, edges)
    ref = oracles.bellman_ford_apsp(n, edges)
    dm = shortest_distances(g)
    for s in range(n):
        assert dm.row(s) == ref[s]
        assert shortest_distances(g, s) == ref[s]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10_000))
def test_triangle_inequality(n, seed):
    n, edges = oracles.random_digraph(n, 3 * n, 7, seed)
    d = apsp_array(WeightedDigraph(n, edges))
    assert np.all(np.diag(d) == 0)
    via = (d[:, :, None] + d[None, :, :]).min(axis=1)
    fin = np.isfinite(via)
    assert np.all(d[fin] <= via[fin])


def test_batched_apsp_matches_individual():
    graphs = [WeightedDigraph(*oracles.random_digraph(9, 20, 4, s)[0:2]) for s in range(5)]
    many = batched_apsp(graphs, 9)
    for g, d in zip(graphs, many):
        assert np.array_equal(d, apsp_array(g))
    best = min_apsp_over(graphs, 9, batch_vertices=20)
    assert np.array_equal(best, np.min([apsp_array(g) for g in graphs], axis=0))


# ---- closure and weak diameter -------------------------------------------------------


def test_transitive_closure_examples():
    assert transitive_closure(WeightedDigraph(3, [(0, 1, 1), (1, 2, 1)])) == {(0, 1), (0, 2), (1, 2)}
    assert len(transitive_closure(cycle(3))) == 6


@pytest.mark.parametrize("seed", range(10))
def test_transitive_closure_matches_dfs_and_distances(seed):
    n, edges = oracles.random_digraph(15, 25, 3, seed)
    g = WeightedDigraph(n, edges)
    tc = transitive_closure(g)
    assert tc == oracles.dfs_tc(n, edges)
    d = apsp_array(g)
    assert tc == {(s, t) for s in range(n) for t in range(n) if s != t and math.isfinite(d[s, t])}


def test_weak_diameter_examples():
    c = cycle(4)
    assert weak_diameter(c, [2]) == 0
    ref = oracles.bellman_ford_apsp(4, c.edges)
    assert weak_diameter(c, range(4)) == oracles.weak_diameter(ref, range(4)) == 3
    path = WeightedDigraph(3, [(0, 1, 1), (1, 2, 1)])
    assert weak_diameter(path, [0, 2]) == INF
    with pytest.raises(ValueError):
        weak_diameter(path, [])


def test_weak_diameter_uses_whole_graph():
    # 0 and 2 are only connected through vertex 1, outside the set
    g = WeightedDigraph(3, [(0, 1, 1), (1, 2, 1), (2, 1, 1), (1, 0, 1)])
    assert weak_diameter(g, [0, 2]) == 2


# ---- Dag / DagCover ------------------------------------------------------------------


def test_dag_with_order_rejects_backward_edge():
    g = WeightedDigraph(2, [(1, 0, 1)])
    with pytest.raises(InternalInvariantViolation):
        Dag.with_order(g, [0, 1])
    assert Dag.with_order(g, [1, 0]).topo == (1, 0)


def test_cover_ledger_counts_by_pair():
    base = WeightedDigraph(3, [(0, 1, 2), (1, 2, 2)])
    d = Dag.from_graph(WeightedDigraph(3, [(0, 1, 5), (0, 2, 4)]))
    e = Dag.from_graph(WeightedDigraph(3, [(0, 2, 3)]))
    cover = DagCover.assemble(base, [d, e])
    # (0,1) is a base edge even with a different weight; (0,2) is counted once
    assert cover.additional_edges == ((0, 2, 3),)
