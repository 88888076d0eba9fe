from __future__ import annotations

from fractions import Fraction

import pytest

from dagcover.graph import WeightedDigraph
from dagcover.ldd import InvalidParam, LddParams, cut_rate_experiment, directed_ldd

import oracles


def cycle4():
    return WeightedDigraph(4, [(i, (i + 1) % 4, 1) for i in range(4)])


def audit(n, edges, res, d):
    """Every SCC left after the cut has weak diameter <= d in the input graph."""
    cut = {(u, v) for u, v, _ in res.cut_edges}
    assert cut <= {(u, v) for u, v, _ in edges}
    rest = [e for e in edges if (e[0], e[1]) not in cut]
    dist = oracles.bellman_ford_apsp(n, edges)
    blocks = oracles.mutual_blocks(n, rest)
    for b in blocks:
        assert oracles.weak_diameter(dist, b) <= d
    assert sorted(blocks) == sorted(sorted(c) for c in res.components)


def test_params_validation():
    with pytest.raises(InvalidParam):
        LddParams(-1)
    with pytest.raises(InvalidParam):
        LddParams(1, c0=0)
    assert LddParams(0.5).d == Fraction(1, 2)


def test_acyclic_input_cuts_nothing():
    n, edges = oracles.random_dag(12, 30, 5, 1)
    res = directed_ldd(WeightedDigraph(n, edges), LddParams(1))
    assert res.cut_edges == [] and res.early_exit


def test_cycle_within_target_is_left_alone():
    res = directed_ldd(cycle4(), LddParams(3))
    assert res.cut_edges == []
    audit(4, cycle4().edges, res, 3)


@pytest.mark.parametrize("seed", range(10))
def test_small_target_breaks_the_cycle(seed):
    res = directed_ldd(cycle4(), LddParams(1, seed=seed))
    assert len(res.cut_edges) >= 1
    rest = [e for e in cycle4().edges if e not in res.cut_edges]
    assert oracles.is_acyclic(4, rest)


def test_fractional_target_below_one_cuts_all_intra_scc_edges():
    g = WeightedDigraph(4, [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 3, 2), (3, 2, 2)])
    res = directed_ldd(g, LddParams(Fraction(1, 2)))
    assert sorted(res.cut_edges) == [(0, 1, 1), (1, 0, 1), (2, 3, 2), (3, 2, 2)]


@pytest.mark.parametrize("seed", range(12))
def test_postcondition_on_random_graphs(seed):
    n, edges = oracles.random_digraph(30, 100, 8, seed)
    g = WeightedDigraph(n, edges)
    for d in (Fraction(n * 8, 8), Fraction(n * 8, 32), Fraction(5, 2)):
        audit(n, edges, directed_ldd(g, LddParams(d, seed=seed)), d)


def test_same_seed_same_cut():
    n, edges = oracles.random_digraph(40, 160, 8, 3)
    g = WeightedDigraph(n, edges)
    a = directed_ldd(g, LddParams(10, seed=7))
    b = directed_ldd(g, LddParams(10, seed=7))
    assert a.cut_edges == b.cut_edges


def test_cut_rate_table_counts_runs():
    n, edges = oracles.random_digraph(20, 60, 4, 0, strongly_connected=True)
    g = WeightedDigraph(n, edges)
    table = cut_rate_experiment(g, 8, range(20))
    assert table.runs == 20
    assert table.counts.max() <= 20
    assert 0 <= table.fitted_constant(n) < float("inf")
    assert set(table.alpha_hat()) == {(u, v) for u, v, _ in edges}
