"""Weighted directed graphs and the exact oracles everything else leans on.

Graphs are immutable: the edge list is deduplicated (minimum weight wins),
sorted by ``(tail, head)`` and stored as numpy arrays.  Adjacency lists and
the sparse matrix used for all-pairs distances are built lazily on first use.

Unreachable distances are reported as :data:`INF`.  Code that does arithmetic
on distances must test :func:`is_finite` first; nothing here relies on
``inf + w`` silently saturating.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import block_diag, csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

INF = math.inf

# W <= max(n, 2) ** DEFAULT_WEIGHT_EXPONENT unless the caller says otherwise
DEFAULT_WEIGHT_EXPONENT = 6


class CycleDetected(ValueError):
    """Raised by :func:`topological_order` on a cyclic graph."""

    def __init__(self, cycle: Sequence[int]):
        self.cycle = list(cycle)
        super().__init__(f"graph has a cycle through {self.cycle}")


class InternalInvariantViolation(AssertionError):
    """A construction produced output that breaks its own contract."""


def is_finite(x) -> bool:
    return x != INF


class WeightedDigraph:
    """Directed graph on vertices ``0..n-1`` with positive integer weights."""

    __slots__ = ("n", "tails", "heads", "weights", "__dict__")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, int]] = (),
        weight_exponent: int | None = DEFAULT_WEIGHT_EXPONENT,
    ):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        arr = np.array(list(edges), dtype=np.int64).reshape(-1, 3)
        tails, heads, weights = arr[:, 0], arr[:, 1], arr[:, 2]
        if arr.shape[0]:
            if tails.min() < 0 or heads.min() < 0 or max(tails.max(), heads.max()) >= n:
                raise ValueError(f"edge endpoint out of range for n={n}")
            if np.any(tails == heads):
                bad = int(tails[tails == heads][0])
                raise ValueError(f"self-loop at vertex {bad}")
            if weights.min() < 1:
                raise ValueError("edge weights must be positive integers")
            if weight_exponent is not None:
                bound = max(n, 2) ** weight_exponent
                if weights.max() > bound:
                    raise ValueError(
                        f"max weight {int(weights.max())} exceeds polynomial bound {bound}"
                    )
        self.n = n
        self.tails, self.heads, self.weights = _dedup_min(n, tails, heads, weights)

    @classmethod
    def from_arrays(cls, n, tails, heads, weights) -> "WeightedDigraph":
        """Build from parallel arrays produced by trusted internal code.

        Endpoints and weights are not range-checked; duplicates are still
        collapsed to their minimum weight.
        """
        g = cls.__new__(cls)
        g.n = n
        g.tails, g.heads, g.weights = _dedup_min(
            n,
            np.asarray(tails, dtype=np.int64),
            np.asarray(heads, dtype=np.int64),
            np.asarray(weights, dtype=np.int64),
        )
        return g

    @property
    def m(self) -> int:
        return int(self.tails.shape[0])

    @cached_property
    def max_weight(self) -> int:
        return int(self.weights.max()) if self.m else 1

    @cached_property
    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.tails.tolist(), self.heads.tolist(), self.weights.tolist()))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}

    def weight(self, u: int, v: int) -> int | None:
        i = self.edge_index.get((u, v))
        return None if i is None else int(self.weights[i])

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edge_index

    @cached_property
    def out_adj(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
        return adj

    @cached_property
    def in_adj(self) -> list[list[tuple[int, int]]]:
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[v].append((u, w))
        for lst in adj:
            lst.sort()
        return adj

    @cached_property
    def csr(self) -> csr_matrix:
        return csr_matrix(
            (self.weights.astype(np.float64), (self.tails, self.heads)), shape=(self.n, self.n)
        )

    def reverse(self) -> "WeightedDigraph":
        return WeightedDigraph.from_arrays(self.n, self.heads, self.tails, self.weights)

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "WeightedDigraph":
        drop = {(int(u), int(v)) for u, v, *_ in removed}
        if not drop:
            return self
        keep = np.array([(u, v) not in drop for u, v, _ in self.edges], dtype=bool)
        return WeightedDigraph.from_arrays(
            self.n, self.tails[keep], self.heads[keep], self.weights[keep]
        )

    def induced(self, vertices: Sequence[int]) -> "WeightedDigraph":
        """Subgraph on ``vertices``, relabelled to ``0..k-1`` in the given order."""
        local = np.full(self.n, -1, dtype=np.int64)
        local[np.asarray(vertices, dtype=np.int64)] = np.arange(len(vertices))
        lt, lh = local[self.tails], local[self.heads]
        keep = (lt >= 0) & (lh >= 0)
        return WeightedDigraph.from_arrays(len(vertices), lt[keep], lh[keep], self.weights[keep])

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.tails, other.tails)
            and np.array_equal(self.heads, other.heads)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.n, self.tails.tobytes(), self.heads.tobytes(), self.weights.tobytes()))

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, m={self.m}, W={self.max_weight})"


def _dedup_min(n, tails, heads, weights):
    if tails.shape[0] == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy()
    key = tails * max(n, 1) + heads
    order = np.lexsort((weights, key))
    key, tails, heads, weights = key[order], tails[order], heads[order], weights[order]
    first = np.ones(key.shape[0], dtype=bool)
    first[1:] = key[1:] != key[:-1]
    return (
        np.ascontiguousarray(tails[first]),
        np.ascontiguousarray(heads[first]),
        np.ascontiguousarray(weights[first]),
    )


@dataclass(frozen=True)
class Dag:
    """A graph together with a vertex order witnessing that it is acyclic.

    ``topo`` is ``None`` only for DAGs read from untrusted input whose
    acyclicity has not been established; :meth:`is_acyclic` settles it.
    """

    graph: WeightedDigraph
    topo: tuple[int, ...] | None

    @classmethod
    def from_graph(cls, g: WeightedDigraph) -> "Dag":
        return cls(g, tuple(topological_order(g)))

    @classmethod
    def with_order(cls, g: WeightedDigraph, order: Sequence[int]) -> "Dag":
        """Wrap ``g`` with a claimed order; every edge must go forward in it."""
        pos = np.empty(g.n, dtype=np.int64)
        pos[np.asarray(order, dtype=np.int64)] = np.arange(g.n)
        if g.m and np.any(pos[g.tails] >= pos[g.heads]):
            i = int(np.argmax(pos[g.tails] >= pos[g.heads]))
            raise InternalInvariantViolation(
                f"edge ({int(g.tails[i])}, {int(g.heads[i])}) goes backward in the claimed order"
            )
        return cls(g, tuple(int(v) for v in order))

    def is_acyclic(self) -> bool:
        if self.topo is not None:
            return True
        try:
            topological_order(self.graph)
        except CycleDetected:
            return False
        return True


@dataclass(frozen=True)
class DagCover:
    """DAGs over the vertex set of a base graph plus the additional-edge ledger.

    ``additional_edges`` holds every vertex pair that appears in some DAG
    but is not an edge of the base graph, with the smallest weight any DAG
    gives it.
    """

    n: int
    dags: tuple[Dag, ...]
    additional_edges: tuple[tuple[int, int, int], ...]
    method: str = ""
    seed: int | None = None

    @classmethod
    def assemble(cls, base: WeightedDigraph, dags: Sequence[Dag], method: str = "", seed=None):
        return cls(base.n, tuple(dags), tuple(additional_edges(base, dags)), method, seed)


def additional_edges(base: WeightedDigraph, dags: Sequence[Dag]) -> list[tuple[int, int, int]]:
    if not dags:
        return []
    n = max(base.n, 1)
    t = np.concatenate([d.graph.tails for d in dags])
    h = np.concatenate([d.graph.heads for d in dags])
    w = np.concatenate([d.graph.weights for d in dags])
    t, h, w = _dedup_min(n, t, h, w)
    base_keys = base.tails * n + base.heads
    extra = ~np.isin(t * n + h, base_keys)
    return list(zip(t[extra].tolist(), h[extra].tolist(), w[extra].tolist()))


class DistanceMatrix:
    """All-pairs distances; entries are ints or :data:`INF`."""

    __slots__ = ("array",)

    def __init__(self, array: np.ndarray):
        self.array = array

    @property
    def n(self) -> int:
        return self.array.shape[0]

    def __getitem__(self, uv: tuple[int, int]):
        x = self.array[uv]
        return INF if np.isinf(x) else int(x)

    def row(self, u: int) -> list:
        return [INF if np.isinf(x) else int(x) for x in self.array[u]]

    def finite(self) -> np.ndarray:
        return np.isfinite(self.array)


# ---- SCC / topological order -------------------------------------------------


def strongly_connected_components(g: WeightedDigraph) -> list[list[int]]:
    """SCCs as sorted vertex lists, listed in a topological order of the condensation."""
    n = g.n
    adj = [[v for v, _ in nbrs] for nbrs in g.out_adj]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comp.sort()
                comps.append(comp)
    # Tarjan emits sinks first
    comps.reverse()
    return comps


def scc_labels(g: WeightedDigraph) -> tuple[list[list[int]], np.ndarray]:
    comps = strongly_connected_components(g)
    label = np.empty(g.n, dtype=np.int64)
    for i, comp in enumerate(comps):
        label[comp] = i
    return comps, label


def scc_partition(g: WeightedDigraph) -> tuple[list[list[int]], np.ndarray]:
    """SCCs sorted by smallest vertex, plus the per-vertex block index.

    Unlike :func:`strongly_connected_components` the blocks are not in
    condensation order; this is the cheap variant for callers that only
    need the partition.
    """
    if g.n == 0:
        return [], np.zeros(0, dtype=np.int64)
    if g.m == 0:
        return [[v] for v in range(g.n)], np.arange(g.n, dtype=np.int64)
    _, raw = connected_components(g.csr, directed=True, connection="strong")
    # relabel so block ids follow their smallest vertex
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    label = relabel[raw].astype(np.int64)
    sort = np.argsort(label, kind="stable")
    bounds = np.flatnonzero(np.diff(label[sort])) + 1
    blocks = [b.tolist() for b in np.split(sort, bounds)]
    return blocks, label


def topological_order(g: WeightedDigraph) -> list[int]:
    """Kahn's algorithm, smallest available vertex first."""
    indeg = [0] * g.n
    for v in g.heads.tolist():
        indeg[v] += 1
    heap = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for v, _ in g.out_adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    if len(order) < g.n:
        raise CycleDetected(_find_cycle(g, {v for v in range(g.n) if indeg[v] > 0}))
    return order


def _find_cycle(g: WeightedDigraph, candidates: set[int]) -> list[int]:
    # every leftover vertex has a leftover in-neighbour; walk backwards until a repeat
    v = min(candidates)
    seen: dict[int, int] = {}
    walk = []
    while v not in seen:
        seen[v] = len(walk)
        walk.append(v)
        v = next(u for u, _ in g.in_adj[v] if u in candidates)
    cycle = walk[seen[v]:]
    cycle.reverse()
    return cycle


# ---- distances ---------------------------------------------------------------


def shortest_distances(g: WeightedDigraph, source: int | None = None):
    """Exact shortest-path distances.

    With ``source`` given, returns one row (a list of ints / INF) computed by
    a binary-heap Dijkstra.  Without it, returns the full
    :class:`DistanceMatrix`.
    """
    if source is not None:
        return dijkstra_row(g, source)
    return DistanceMatrix(apsp_array(g))


def dijkstra_row(g: WeightedDigraph, source: int, limit=INF) -> list:
    """Single-source distances; vertices farther than ``limit`` are left at INF."""
    dist = [INF] * g.n
    dist[source] = 0
    heap = [(0, source)]
    adj = g.out_adj
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v] and nd <= limit:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def apsp_array(g: WeightedDigraph) -> np.ndarray:
    """Dense float64 distance array (integral entries or inf)."""
    if g.n == 0:
        return np.zeros((0, 0))
    if g.m == 0:
        out = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(out, 0.0)
        return out
    return dijkstra(g.csr, directed=True)


def min_apsp_over(graphs: Sequence[WeightedDigraph], n: int, batch_vertices: int = 2048) -> np.ndarray:
    """Elementwise minimum of the distance matrices of ``graphs`` (all on ``n`` vertices).

    Several graphs are packed into one block-diagonal matrix per Dijkstra
    call; at desk scale this is far cheaper than one call per graph.
    """
    best = np.full((n, n), np.inf)
    np.fill_diagonal(best, 0.0)
    if n == 0 or not graphs:
        return best
    per_batch = max(1, batch_vertices // n)
    for start in range(0, len(graphs), per_batch):
        chunk = graphs[start:start + per_batch]
        dists = batched_apsp(chunk, n)
        np.minimum(best, dists.min(axis=0), out=best)
    return best


# below this vertex count a vectorized Floyd-Warshall over a stack of graphs
# beats packing them into one sparse Dijkstra call
SMALL_APSP_N = 32


def batched_apsp(graphs: Sequence[WeightedDigraph], n: int) -> np.ndarray:
    """Distance matrices of several ``n``-vertex graphs, shape ``(len, n, n)``."""
    k = len(graphs)
    if k == 1:
        return apsp_array(graphs[0])[None]
    if n <= SMALL_APSP_N:
        return _stacked_floyd_warshall(graphs, n)
    big = block_diag([g.csr for g in graphs], format="csr")
    # inside a block diagonal matrix explicit zeros never appear: weights are >= 1
    full = dijkstra(big, directed=True)
    idx = np.arange(k)
    return full.reshape(k, n, k, n)[idx, :, idx, :]


def _stacked_floyd_warshall(graphs: Sequence[WeightedDigraph], n: int) -> np.ndarray:
    k = len(graphs)
    d = np.full((k, n, n), np.inf)
    sizes = [g.m for g in graphs]
    if sum(sizes):
        gi = np.repeat(np.arange(k), sizes)
        t = np.concatenate([g.tails for g in graphs])
        h = np.concatenate([g.heads for g in graphs])
        w = np.concatenate([g.weights for g in graphs]).astype(float)
        d[gi, t, h] = w  # graphs hold one edge per ordered pair
    idx = np.arange(n)
    d[:, idx, idx] = 0.0
    for m in range(n):
        np.minimum(d, d[:, :, m:m + 1] + d[:, m:m + 1, :], out=d)
    return d


def reachability_matrix(g: WeightedDigraph) -> np.ndarray:
    return np.isfinite(apsp_array(g))


def transitive_closure(g: WeightedDigraph) -> set[tuple[int, int]]:
    """Ordered pairs ``(s, t)``, ``s != t``, with ``t`` reachable from ``s``."""
    pairs = set()
    adj = g.out_adj
    for s in range(g.n):
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        pairs.update((s, t) for t in seen if t != s)
    return pairs


def weak_diameter(g: WeightedDigraph, s_set: Iterable[int], dist: np.ndarray | None = None):
    """Largest distance in ``g`` between an ordered pair of vertices of ``s_set``."""
    verts = sorted(set(s_set))
    if not verts:
        raise ValueError("weak diameter of an empty set")
    if len(verts) == 1:
        return 0
    if dist is None:
        sub = dijkstra(g.csr, directed=True, indices=verts) if g.m else np.full((len(verts), g.n), np.inf)
        block = sub[:, verts]
        np.fill_diagonal(block, 0.0)
    else:
        block = dist[np.ix_(verts, verts)]
    x = block.max()
    return INF if np.isinf(x) else int(x)


# ---- paths -------------------------------------------------------------------


def is_path(g: WeightedDigraph, path: Sequence[int]) -> bool:
    return len(path) >= 1 and all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def path_weight(g: WeightedDigraph, path: Sequence[int]) -> int:
    total = 0
    for a, b in zip(path, path[1:]):
        w = g.weight(a, b)
        if w is None:
            raise ValueError(f"({a}, {b}) is not an edge")
        total += w
    return total
