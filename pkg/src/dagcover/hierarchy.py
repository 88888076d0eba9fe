"""Hierarchy of nested decompositions.

Level ``i`` graph ``G_i`` is the input minus the cuts of all earlier levels;
the cut at level ``i`` is a directed LDD of ``G_i`` with diameter target
``nW / 2^(i+1)``.  The blocks of level ``i`` are the SCCs of ``G_i``.

Blocks are totally ordered level by level: a level-``i`` block is ranked by
its parent's rank first and by a topological order of the condensation of
``G_i`` second, ties going to the block with the smallest vertex id.  The
ordering of the singletons at the last level is the vertex order used by
the DAG constructions.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import InternalInvariantViolation, WeightedDigraph, scc_partition
from .ldd import LddParams, directed_ldd, DEFAULT_C0
from .rng import STREAM_HIERARCHY, generator


@dataclass(frozen=True)
class VertexOrder:
    perm: np.ndarray  # vertices listed in order
    pos: np.ndarray  # inverse of perm
    rank: np.ndarray  # rank[i, v] = rank of the level-i block holding v

    def less(self, s: int, t: int) -> bool:
        return bool(self.pos[s] < self.pos[t])


@dataclass(frozen=True)
class Representatives:
    first: np.ndarray  # first[i, v]: earliest vertex of v's level-i block
    last: np.ndarray  # last[i, v]: latest vertex of v's level-i block
    edge_level: np.ndarray  # aligned with the input graph's edge arrays


@dataclass
class Hierarchy:
    graph: WeightedDigraph
    z: int
    d: list[Fraction]  # d[i] for i in 0..z
    cuts: list[list[tuple[int, int, int]]]  # cuts[i] removed from G_i, i in 0..z-1
    families: list[list[list[int]]]  # families[i] = blocks of level i in rank order
    order: VertexOrder
    reps: Representatives
    bottom: WeightedDigraph  # G_z, acyclic
    seed: int = 0

    @property
    def block_of(self) -> np.ndarray:
        return self.order.rank

    def level_graph(self, i: int) -> WeightedDigraph:
        g = self.graph
        for cut in self.cuts[:i]:
            g = g.without_edges(cut)
        return g

    def edge_level(self, u: int, v: int) -> int:
        return int(self.reps.edge_level[self.graph.edge_index[(u, v)]])


def level_count(n: int, w: int) -> int:
    """Smallest z with 2^z >= nW."""
    return (n * w - 1).bit_length()


def build_hierarchy(g: WeightedDigraph, seed: int = 0, c0: float = DEFAULT_C0) -> Hierarchy:
    n = g.n
    nw = max(n, 1) * g.max_weight
    z = level_count(max(n, 1), g.max_weight)
    d = [Fraction(nw, 2 ** (i + 1)) for i in range(z + 1)]

    cuts: list[list[tuple[int, int, int]]] = []
    families: list[list[list[int]]] = []
    rank = np.zeros((z + 1, n), dtype=np.int64)

    current = g
    parent_rank = np.zeros(n, dtype=np.int64)
    for i in range(z + 1):
        blocks, label = scc_partition(current)
        ordered, block_rank = _order_blocks(current, blocks, label, parent_rank)
        families.append(ordered)
        rank[i] = block_rank
        parent_rank = block_rank
        if i == z:
            break
        if i == z - 1:
            # d[z-1] may equal 1 when nW is a power of two; unit 2-cycles would
            # survive an honest LDD at that target, so the last step cuts every
            # edge still inside an SCC
            intra = label[current.tails] == label[current.heads]
            idx = np.flatnonzero(intra)
            cut = list(zip(current.tails[idx].tolist(), current.heads[idx].tolist(), current.weights[idx].tolist()))
        else:
            res = directed_ldd(current, LddParams(d[i], c0, seed), rng=generator(seed, STREAM_HIERARCHY, i))
            cut = res.cut_edges
        cuts.append(cut)
        current = current.without_edges(cut)

    if any(len(b) != 1 for b in families[z]):
        raise InternalInvariantViolation("bottom level of the hierarchy is not all singletons")
    perm = np.array([b[0] for b in families[z]], dtype=np.int64)
    pos = np.empty(n, dtype=np.int64)
    pos[perm] = np.arange(n)

    first = np.empty((z + 1, n), dtype=np.int64)
    last = np.empty((z + 1, n), dtype=np.int64)
    for i, blocks in enumerate(families):
        lo = np.full(len(blocks), n, dtype=np.int64)
        hi = np.full(len(blocks), -1, dtype=np.int64)
        np.minimum.at(lo, rank[i], pos)
        np.maximum.at(hi, rank[i], pos)
        first[i] = perm[lo[rank[i]]]
        last[i] = perm[hi[rank[i]]]

    if g.m:
        differs = rank[:, g.tails] != rank[:, g.heads]
        edge_level = np.argmax(differs, axis=0).astype(np.int64)
    else:
        edge_level = np.zeros(0, dtype=np.int64)

    return Hierarchy(
        graph=g,
        z=z,
        d=d,
        cuts=cuts,
        families=families,
        order=VertexOrder(perm, pos, rank),
        reps=Representatives(first, last, edge_level),
        bottom=current,
        seed=seed,
    )


def _order_blocks(g: WeightedDigraph, blocks, label, parent_rank):
    """Topological order of the condensation, smallest (parent rank, min id) first."""
    k = len(blocks)
    key = [(int(parent_rank[b[0]]), b[0]) for b in blocks]
    bt, bh = label[g.tails], label[g.heads]
    cross = bt != bh
    succ: list[set[int]] = [set() for _ in range(k)]
    for a, b in zip(bt[cross].tolist(), bh[cross].tolist()):
        succ[a].add(b)
    indeg = [0] * k
    for s in succ:
        for b in s:
            indeg[b] += 1
    heap = [(key[x], x) for x in range(k) if indeg[x] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, x = heapq.heappop(heap)
        out.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                heapq.heappush(heap, (key[y], y))
    ordered = [blocks[x] for x in out]
    block_rank = np.empty(g.n, dtype=np.int64)
    for r, b in enumerate(ordered):
        block_rank[b] = r
    return ordered, block_rank


def to_dump(h: Hierarchy) -> dict:
    levels = []
    for i in range(h.z + 1):
        cut = h.cuts[i] if i < h.z else []
        levels.append({
            "d_num": h.d[i].numerator,
            "d_den": h.d[i].denominator,
            "cut_edges": [list(e) for e in cut],
            "sccs": [list(map(int, b)) for b in h.families[i]],
        })
    return {"z": h.z, "levels": levels, "perm": h.order.perm.tolist()}
