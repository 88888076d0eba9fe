"""Covers that do not use the LDD hierarchy.

* ``reachability_two_cover``: two DAGs that preserve reachability exactly.
* ``random_order_exact_cover``: many random vertex orders over the graph plus
  an exact hopset; with high probability every distance is preserved exactly.
* ``shortest_path_dag_cover``: one shortest-path tree per root.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Dag, DagCover, WeightedDigraph, apsp_array, strongly_connected_components
from .rng import STREAM_HOPSET, STREAM_ORDERS, generator

DEFAULT_MAX_DAGS = 100_000
HOPSET_ATTEMPTS = 20


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Hopset:
    edges: list[tuple[int, int, int]]
    hop_bound: int  # the d the hopset was built for; paths use at most 2d+1 hops
    landmarks: tuple[int, ...] = ()
    attempts: int = 1

    @property
    def path_hops(self) -> int:
        return 2 * self.hop_bound + 1


# ---- two-DAG reachability cover ------------------------------------------------


def reachability_two_cover(g: WeightedDigraph) -> DagCover:
    comps = strongly_connected_components(g)
    label = np.empty(g.n, dtype=np.int64)
    for i, c in enumerate(comps):
        label[c] = i
    path_t, path_h = [], []
    for c in comps:
        path_t.extend(c[:-1])
        path_h.extend(c[1:])
    first = np.array([c[0] for c in comps], dtype=np.int64)
    last = np.array([c[-1] for c in comps], dtype=np.int64)
    cross = label[g.tails] != label[g.heads]
    con_t = last[label[g.tails[cross]]]
    con_h = first[label[g.heads[cross]]]

    t1 = np.concatenate([np.array(path_t, dtype=np.int64), con_t])
    h1 = np.concatenate([np.array(path_h, dtype=np.int64), con_h])
    d1 = WeightedDigraph.from_arrays(g.n, t1, h1, np.ones(t1.shape[0], dtype=np.int64))
    d2 = WeightedDigraph.from_arrays(
        g.n, np.array(path_h, dtype=np.int64), np.array(path_t, dtype=np.int64),
        np.ones(len(path_t), dtype=np.int64),
    )
    # condensation order with ascending ids inside each SCC orders DAG1; DAG2 only
    # has in-SCC edges, so reversing each SCC gives its order
    order1 = [v for c in comps for v in c]
    order2 = [v for c in comps for v in reversed(c)]
    return DagCover.assemble(g, [Dag.with_order(d1, order1), Dag.with_order(d2, order2)], "reach2")


# ---- landmark hopset -------------------------------------------------------------


def hop_bounded_exact(g: WeightedDigraph, extra: list[tuple[int, int, int]], hops: int, dist: np.ndarray) -> bool:
    """True when every reachable pair has a path of exact weight with at most ``hops`` edges in g + extra."""
    n = g.n
    if n == 0:
        return True
    step = np.full((n, n), np.inf)
    np.fill_diagonal(step, 0.0)
    for u, v, w in g.edges + list(extra):
        if w < step[u, v]:
            step[u, v] = w
    cur = step.copy()
    reachable = np.isfinite(dist)
    for _ in range(hops - 1):
        if np.array_equal(cur[reachable], dist[reachable]):
            return True
        # min-plus product, one source row at a time to bound memory
        nxt = np.empty_like(cur)
        for i in range(n):
            nxt[i] = np.min(cur[i][:, None] + step, axis=0)
        cur = nxt
    return bool(np.array_equal(cur[reachable], dist[reachable]))


def landmark_exact_hopset(g: WeightedDigraph, d: int, seed: int = 0, attempts: int = HOPSET_ATTEMPTS) -> Hopset:
    """Exact hopset from all pairs of ``~ n ln n / d`` random landmarks.

    Every reachable pair gets an exact-weight path with at most ``2d+1``
    edges; the property is audited and the landmarks redrawn on failure.
    After ``attempts`` failures every vertex becomes a landmark, which
    passes trivially.
    """
    if d < 1:
        raise ValueError("hop parameter d must be positive")
    n = g.n
    hops = 2 * d + 1
    dist = apsp_array(g)
    if hop_bounded_exact(g, [], hops, dist):
        return Hopset([], d, (), 0)
    count = min(n, math.ceil(n * math.log(max(n, 2)) / (d + 1)))
    rng = generator(seed, STREAM_HOPSET)
    for attempt in range(1, attempts + 1):
        marks = np.sort(rng.choice(n, size=count, replace=False))
        edges = _landmark_edges(marks, dist)
        if hop_bounded_exact(g, edges, hops, dist):
            return Hopset(edges, d, tuple(marks.tolist()), attempt)
    marks = np.arange(n)
    return Hopset(_landmark_edges(marks, dist), d, tuple(marks.tolist()), attempts + 1)


def _landmark_edges(marks: np.ndarray, dist: np.ndarray) -> list[tuple[int, int, int]]:
    out = []
    for x in marks.tolist():
        for y in marks.tolist():
            if x != y and np.isfinite(dist[x, y]):
                out.append((x, y, int(dist[x, y])))
    return out


# ---- random-order exact cover ------------------------------------------------------


def order_count(n: int, d: int) -> int:
    """(2d+2)! * 10 * ceil(log2 n): the hop bound of the substitute hopset is 2d+1."""
    return math.factorial(2 * d + 2) * 10 * max(1, math.ceil(math.log2(max(n, 2))))


def _forward_dag(args):
    n, t, h, w, seed, index = args
    perm = generator(seed, STREAM_ORDERS, index).permutation(n)
    pos = np.empty(n, dtype=np.int64)
    pos[perm] = np.arange(n)
    keep = pos[t] < pos[h]
    return Dag(WeightedDigraph.from_arrays(n, t[keep], h[keep], w[keep]), tuple(perm.tolist()))


def random_order_exact_cover(
    g: WeightedDigraph,
    d: int,
    seed: int = 0,
    max_dags: int = DEFAULT_MAX_DAGS,
    workers: int = 1,
    hopset: Hopset | None = None,
) -> DagCover:
    if d < 1:
        raise ValueError("hop parameter d must be positive")
    k = order_count(g.n, d)
    if k > max_dags:
        raise BudgetExceeded(f"d={d} needs {k} DAGs, budget is {max_dags}")
    if hopset is None:
        hopset = landmark_exact_hopset(g, d, seed)
    extra = np.array(hopset.edges, dtype=np.int64).reshape(-1, 3)
    t = np.concatenate([g.tails, extra[:, 0]])
    h = np.concatenate([g.heads, extra[:, 1]])
    w = np.concatenate([g.weights, extra[:, 2]])
    jobs = [(g.n, t, h, w, seed, i) for i in range(k)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            dags = list(pool.map(_forward_dag, jobs, chunksize=max(1, k // (4 * workers))))
    else:
        dags = [_forward_dag(j) for j in jobs]
    return DagCover.assemble(g, dags, "orders", seed)


# ---- shortest-path trees -------------------------------------------------------------


def shortest_path_tree(g: WeightedDigraph, root: int) -> Dag:
    """Dijkstra tree from ``root``; each vertex's parent is its smallest-id tight in-neighbour."""
    dist = [math.inf] * g.n
    dist[root] = 0
    heap = [(0, root)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for v, w in g.out_adj[u]:
            if du + w < dist[v]:
                dist[v] = du + w
                heapq.heappush(heap, (du + w, v))
    tails, heads, weights = [], [], []
    for x in range(g.n):
        if x == root or dist[x] == math.inf:
            continue
        # in_adj is sorted by tail id, so the first tight edge is the min-id parent
        for p, w in g.in_adj[x]:
            if dist[p] != math.inf and dist[p] + w == dist[x]:
                tails.append(p)
                heads.append(x)
                weights.append(w)
                break
    tree = WeightedDigraph.from_arrays(g.n, tails, heads, weights)
    order = sorted(range(g.n), key=lambda v: (dist[v], v))
    return Dag.with_order(tree, order)


def shortest_path_dag_cover(g: WeightedDigraph) -> DagCover:
    return DagCover.assemble(g, [shortest_path_tree(g, r) for r in range(g.n)], "sp-dags")
