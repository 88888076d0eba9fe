from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from dagcover.graph import WeightedDigraph
from dagcover.hierarchy import build_hierarchy, level_count, to_dump

import oracles


def cycle4():
    return WeightedDigraph(4, [(i, (i + 1) % 4, 1) for i in range(4)])


def audit_hierarchy(g, h):
    """Check the hierarchy invariants against the independent oracles."""
    n = g.n
    edges = g.edges
    dist = oracles.bellman_ford_apsp(n, edges)
    assert h.d == [Fraction(n * g.max_weight, 2 ** (i + 1)) for i in range(h.z + 1)]
    removed = set()
    for i in range(h.z + 1):
        level_edges = [e for e in edges if (e[0], e[1]) not in removed]
        blocks = h.families[i]
        # the family is the SCC partition of the level graph
        assert sorted(map(sorted, blocks)) == sorted(oracles.mutual_blocks(n, level_edges))
        if i >= 1:
            for b in blocks:
                assert oracles.weak_diameter(dist, b) <= 2 * h.d[i]
        rank = h.order.rank[i]
        # condensation edges go forward in rank
        for u, v, _ in level_edges:
            assert rank[u] <= rank[v]
        # ranks of level i refine level i-1 in order
        if i >= 1:
            prev = h.order.rank[i - 1]
            for s in range(n):
                for t in range(n):
                    if prev[s] < prev[t]:
                        assert rank[s] < rank[t]
                    if rank[s] == rank[t]:
                        assert prev[s] == prev[t]
        if i < h.z:
            removed |= {(u, v) for u, v, _ in h.cuts[i]}
    bottom = [e for e in edges if (e[0], e[1]) not in removed]
    assert oracles.is_acyclic(n, bottom)
    assert all(len(b) == 1 for b in h.families[h.z])
    pos = h.order.pos
    assert sorted(h.order.perm.tolist()) == list(range(n))
    for i in range(h.z + 1):
        rank = h.order.rank[i]
        for s in range(n):
            for t in range(n):
                if rank[s] < rank[t]:
                    assert pos[s] < pos[t]
        for b in h.families[i]:
            p = [pos[v] for v in b]
            for v in b:
                assert pos[h.reps.first[i, v]] == min(p)
                assert pos[h.reps.last[i, v]] == max(p)
    for k, (u, v, _) in enumerate(edges):
        lvl = int(h.reps.edge_level[k])
        assert h.order.rank[lvl, u] != h.order.rank[lvl, v]
        assert all(h.order.rank[j, u] == h.order.rank[j, v] for j in range(lvl))


def test_level_count():
    assert level_count(4, 1) == 2
    assert level_count(1, 1) == 0
    assert level_count(5, 1) == 3
    assert level_count(64, 8) == 9


def test_single_vertex():
    h = build_hierarchy(WeightedDigraph(1))
    assert h.z == 0 and h.order.perm.tolist() == [0]


def test_four_cycle():
    g = cycle4()
    h = build_hierarchy(g, seed=0)
    assert h.z == 2 and h.d == [Fraction(2), Fraction(1), Fraction(1, 2)]
    cut = {e for c in h.cuts for e in c}
    assert cut == set(g.edges) - set(h.bottom.edges)
    assert len(cut) >= 1
    audit_hierarchy(g, h)


def test_dag_input_gives_topological_order():
    n, edges = oracles.random_dag(15, 40, 4, 2)
    g = WeightedDigraph(n, edges)
    h = build_hierarchy(g, seed=1)
    assert all(c == [] for c in h.cuts)
    assert all(len(b) == 1 for b in h.families[0])
    pos = h.order.pos
    assert all(pos[u] < pos[v] for u, v, _ in edges)


@pytest.mark.parametrize("seed", range(8))
def test_invariants_on_random_graphs(seed):
    n, edges = oracles.random_digraph(24, 80, 8, seed)
    g = WeightedDigraph(n, edges)
    audit_hierarchy(g, build_hierarchy(g, seed=seed))


def test_deterministic_and_dump():
    n, edges = oracles.random_digraph(30, 100, 5, 9, strongly_connected=True)
    g = WeightedDigraph(n, edges)
    a, b = build_hierarchy(g, seed=4), build_hierarchy(g, seed=4)
    assert np.array_equal(a.order.perm, b.order.perm)
    assert a.cuts == b.cuts
    dump = to_dump(a)
    assert dump["z"] == a.z and len(dump["levels"]) == a.z + 1
    assert Fraction(dump["levels"][0]["d_num"], dump["levels"][0]["d_den"]) == a.d[0]
    assert dump["perm"] == a.order.perm.tolist()
