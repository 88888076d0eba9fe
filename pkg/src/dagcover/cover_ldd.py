"""DAG cover built from the LDD hierarchy.

One hierarchy yields two DAGs.  ``D1`` follows the hierarchy's vertex order
and holds the acyclic bottom graph, representative-to-representative copies
of its edges at every pair of levels above the edge's level, and the hop
edges of every block.  ``D2`` is the hop edges reversed.  Repeating with
fresh randomness gives the cover.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .graph import Dag, DagCover, InternalInvariantViolation, WeightedDigraph
from .hierarchy import Hierarchy, VertexOrder, build_hierarchy
from .ldd import DEFAULT_C0
from .rng import STREAM_COVER, STREAM_EMBED, child_seed, generator


@dataclass(frozen=True)
class HopEdgeSet:
    edges: list[tuple[int, int, int]]
    level: int
    scc: int


def path_two_hop_shortcuts(k: int) -> set[tuple[int, int]]:
    """Edges over positions ``0..k-1`` joining every ordered pair in at most two hops.

    Together with the path edges ``(i, i+1)``.  Midpoint recursion: the
    midpoint of a range is linked from everything before it and to
    everything after it.
    """
    if k < 1:
        raise ValueError("path must have at least one node")
    return set(zip(*(x.tolist() for x in _shortcut_arrays(k))))


@lru_cache(maxsize=512)
def _shortcut_arrays(k: int) -> tuple[np.ndarray, np.ndarray]:
    out: list[tuple[int, int]] = []
    stack = [(0, k - 1)]
    while stack:
        a, b = stack.pop()
        if b - a <= 1:
            continue
        m = (a + b) // 2
        out.extend((x, m) for x in range(a, m))
        out.extend((m, y) for y in range(m + 1, b + 1))
        stack.append((a, m))
        stack.append((m, b))
    pairs = sorted(set(out))
    t = np.array([p[0] for p in pairs], dtype=np.int64)
    h = np.array([p[1] for p in pairs], dtype=np.int64)
    t.setflags(write=False)
    h.setflags(write=False)
    return t, h


def hop_weight(d: Fraction) -> int:
    return math.ceil(2 * Fraction(d))


def _hop_arrays(scc: Sequence[int], order: VertexOrder, weight: int):
    verts = np.asarray(scc, dtype=np.int64)
    if verts.size < 2:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    verts = verts[np.argsort(order.pos[verts], kind="stable")]
    k = verts.size
    st, sh = _shortcut_arrays(k)
    t = np.concatenate([verts[:-1], verts[st]])
    h = np.concatenate([verts[1:], verts[sh]])
    return t, h, np.full(t.shape[0], weight, dtype=np.int64)


def scc_hop_edges(scc: Sequence[int], order: VertexOrder, d, level: int = 0, scc_id: int = 0) -> HopEdgeSet:
    """Path over ``scc`` in vertex order plus its two-hop shortcuts, all weighted ceil(2d)."""
    if len(scc) == 0:
        raise ValueError("empty SCC")
    t, h, w = _hop_arrays(scc, order, hop_weight(d))
    edges = sorted(set(zip(t.tolist(), h.tolist(), w.tolist())))
    return HopEdgeSet(edges, level, scc_id)


def hierarchy_hop_edges(h: Hierarchy) -> list[HopEdgeSet]:
    out = []
    for i, blocks in enumerate(h.families):
        for j, b in enumerate(blocks):
            if len(b) > 1:
                out.append(scc_hop_edges(b, h.order, h.d[i], i, j))
    return out


def _all_hop_arrays(h: Hierarchy):
    ts, hs, ws = [], [], []
    for i, blocks in enumerate(h.families):
        weight = hop_weight(h.d[i])
        for b in blocks:
            if len(b) > 1:
                t, hh, w = _hop_arrays(b, h.order, weight)
                ts.append(t)
                hs.append(hh)
                ws.append(w)
    if not ts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(ts), np.concatenate(hs), np.concatenate(ws)


def _representative_arrays(h: Hierarchy):
    """Edges from representatives of the tail's blocks to those of the head's blocks."""
    g, bottom = h.graph, h.bottom
    if bottom.m == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    z = h.z
    level_of = h.reps.edge_level
    eidx = np.array([g.edge_index[(u, v)] for u, v, _ in bottom.edges], dtype=np.int64)
    lev = level_of[eidx]
    c = np.array([hop_weight(x) for x in h.d], dtype=np.int64)
    first, last = h.reps.first, h.reps.last
    ts, hs, ws = [], [], []
    for lvl in np.unique(lev).tolist():
        sel = lev == lvl
        u, v, w = bottom.tails[sel], bottom.heads[sel], bottom.weights[sel]
        rows = np.arange(lvl, z + 1)
        src = np.concatenate([first[rows][:, u], last[rows][:, u]])  # (2L, m)
        dst = np.concatenate([first[rows][:, v], last[rows][:, v]])
        cw = np.concatenate([c[rows], c[rows]])
        two_l, m = src.shape
        ts.append(np.broadcast_to(src[:, None, :], (two_l, two_l, m)).ravel())
        hs.append(np.broadcast_to(dst[None, :, :], (two_l, two_l, m)).ravel())
        ws.append((w[None, None, :] + cw[:, None, None] + cw[None, :, None]).ravel())
    return np.concatenate(ts), np.concatenate(hs), np.concatenate(ws)


def build_d1(h: Hierarchy) -> Dag:
    n = h.graph.n
    parts = [(h.bottom.tails, h.bottom.heads, h.bottom.weights), _representative_arrays(h), _all_hop_arrays(h)]
    t = np.concatenate([p[0] for p in parts])
    hh = np.concatenate([p[1] for p in parts])
    w = np.concatenate([p[2] for p in parts])
    d1 = WeightedDigraph.from_arrays(n, t, hh, w)
    _check_direction(d1, h.order.pos, forward=True, name="D1")
    return Dag(d1, tuple(h.order.perm.tolist()))


def build_d2(h: Hierarchy) -> Dag:
    n = h.graph.n
    t, hh, w = _all_hop_arrays(h)
    d2 = WeightedDigraph.from_arrays(n, hh, t, w)
    _check_direction(d2, h.order.pos, forward=False, name="D2")
    return Dag(d2, tuple(h.order.perm[::-1].tolist()))


def _check_direction(d: WeightedDigraph, pos: np.ndarray, forward: bool, name: str) -> None:
    if d.m == 0:
        return
    a, b = pos[d.tails], pos[d.heads]
    bad = a >= b if forward else a <= b
    if bad.any():
        i = int(np.argmax(bad))
        raise InternalInvariantViolation(
            f"{name} edge ({int(d.tails[i])}, {int(d.heads[i])}) disagrees with the vertex order"
        )


def build_dag_pair(g: WeightedDigraph, h: Hierarchy) -> tuple[Dag, Dag]:
    if h.graph is not g and h.graph != g:
        raise ValueError("hierarchy was built from a different graph")
    return build_d1(h), build_d2(h)


def default_repetitions(n: int) -> int:
    return 10 * max(1, math.ceil(math.log2(max(n, 2))))


def _one_repetition(args) -> tuple[Dag, Dag]:
    g, seed, rep, c0 = args
    h = build_hierarchy(g, child_seed(seed, STREAM_COVER, rep), c0)
    return build_dag_pair(g, h)


def build_ldd_cover(
    g: WeightedDigraph,
    repetitions: int | None = None,
    seed: int = 0,
    workers: int = 1,
    c0: float = DEFAULT_C0,
) -> DagCover:
    reps = default_repetitions(g.n) if repetitions is None else repetitions
    if reps < 1:
        raise ValueError("repetitions must be positive")
    jobs = [(g, seed, r, c0) for r in range(reps)]
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(_one_repetition, jobs))
    else:
        pairs = [_one_repetition(j) for j in jobs]
    dags = [d for pair in pairs for d in pair]
    return DagCover.assemble(g, dags, "ldd", seed)


def sample_embedding_dag(g: WeightedDigraph, seed: int = 0, c0: float = DEFAULT_C0) -> Dag:
    """One DAG drawn from the pair of a fresh hierarchy, each with probability 1/2."""
    coin = int(generator(seed, STREAM_EMBED).integers(2))
    h = build_hierarchy(g, child_seed(seed, STREAM_EMBED, 1), c0)
    # only the chosen DAG is built; the distribution is the same as building both
    return build_d1(h) if coin == 0 else build_d2(h)
