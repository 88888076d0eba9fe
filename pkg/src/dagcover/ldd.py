"""Directed low-diameter decomposition by ball carving.

Given a digraph and a diameter target ``d`` the decomposition returns a
random set of edges whose removal leaves every strongly connected component
with weak diameter at most ``d`` (distances measured in the input graph).
An edge of weight ``w`` is cut with probability roughly proportional to
``w / d`` times a polylogarithmic factor.

Recipe, per nontrivial SCC ``C`` of the current piece:

* if the weak diameter of ``C`` is already at most ``d``, keep it whole;
* call a vertex out-light (in-light) when its out-ball (in-ball) of radius
  ``d/4`` holds at most ``3|C|/4`` vertices of ``C``;
* in increasing id order, each light vertex still unassigned carves a ball
  of geometric radius (capped at ``d/4``) out of the unassigned vertices,
  the ball's boundary edges are cut and the ball is decomposed recursively;
* the vertices nobody carved are heavy in both directions, so any two of
  them are within distance ``d/2`` and they stay together.

All distances come from one exact APSP per SCC of the input graph, which is
exact because a shortest path between two vertices of an SCC never leaves it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .graph import (
    InternalInvariantViolation,
    WeightedDigraph,
    apsp_array,
    scc_partition,
    strongly_connected_components,
)
from .rng import STREAM_LDD, generator

DEFAULT_C0 = 4.0


class InvalidParam(ValueError):
    pass


@dataclass(frozen=True)
class LddParams:
    d: Fraction
    c0: float = DEFAULT_C0
    seed: int = 0

    def __post_init__(self):
        d = self.d if isinstance(self.d, Fraction) else Fraction(self.d)
        if d < 0:
            raise InvalidParam(f"diameter target must be nonnegative, got {d}")
        if not self.c0 > 0:
            raise InvalidParam(f"c0 must be positive, got {self.c0}")
        object.__setattr__(self, "d", d)


@dataclass
class LddResult:
    cut_edges: list[tuple[int, int, int]]
    components: list[list[int]]
    measured_alpha_hat: dict[tuple[int, int], float] | None = None
    early_exit: bool = False


def directed_ldd(g: WeightedDigraph, params: LddParams, rng: np.random.Generator | None = None) -> LddResult:
    """Cut edges of ``g`` so every remaining SCC has weak diameter <= ``params.d`` in ``g``.

    ``rng`` overrides the stream derived from ``params.seed`` (the hierarchy
    passes its per-level stream here).
    """
    d = params.d
    comps, label = scc_partition(g)
    intra = label[g.tails] == label[g.heads]
    if not intra.any():
        return LddResult([], comps, early_exit=True)

    if d < 1:
        # integer weights: no two distinct vertices are within distance < 1
        cut = _as_triples(g, np.flatnonzero(intra))
        return LddResult(cut, [[v] for v in range(g.n)])

    if rng is None:
        rng = generator(params.seed, STREAM_LDD)
    n = max(g.n, 2)
    p = min(1.0, params.c0 * math.log(n) / float(d))
    quarter = math.floor(d / 4)

    cut_idx: list[np.ndarray] = []
    dist_of: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    any_cut = False
    for ci, comp in enumerate(comps):
        if len(comp) < 2:
            continue
        verts = np.asarray(comp, dtype=np.int64)
        sub = g.induced(comp)
        dist = apsp_array(sub)
        dist_of[ci] = (verts, dist)
        if dist.max() <= d:
            continue
        # edge ids of g inside this component, in local coordinates
        eids = np.flatnonzero((label[g.tails] == ci) & (label[g.heads] == ci))
        local = np.full(g.n, -1, dtype=np.int64)
        local[verts] = np.arange(len(comp))
        lt, lh = local[g.tails[eids]], local[g.heads[eids]]
        found = _carve_component(dist, lt, lh, d, quarter, p, rng)
        if found.size:
            any_cut = True
            cut_idx.append(eids[found])

    if not any_cut:
        return LddResult([], comps, early_exit=True)

    cut = np.sort(np.concatenate(cut_idx))
    result = LddResult(_as_triples(g, cut), [])
    result.components = _check_postcondition(g, cut, label, dist_of, d)
    return result


def _carve_component(dist, lt, lh, d, quarter, p, rng) -> np.ndarray:
    """Indices into ``lt``/``lh`` of the edges to cut inside one SCC."""
    k = dist.shape[0]
    near = dist <= quarter
    cut_mask = np.zeros(lt.shape[0], dtype=bool)
    stack = [np.arange(k)]
    while stack:
        piece = stack.pop()
        for comp in _piece_sccs(piece, lt, lh, cut_mask, k):
            if comp.size < 2:
                continue
            if dist[np.ix_(comp, comp)].max() <= d:
                continue
            stack.extend(_carve(comp, dist, near, lt, lh, cut_mask, quarter, p, rng, k))
    return np.flatnonzero(cut_mask)


def _piece_sccs(piece, lt, lh, cut_mask, k):
    inside = np.zeros(k, dtype=bool)
    inside[piece] = True
    keep = inside[lt] & inside[lh] & ~cut_mask
    if not keep.any():
        return [np.array([v]) for v in piece]
    m = csr_matrix((np.ones(int(keep.sum())), (lt[keep], lh[keep])), shape=(k, k))
    _, lab = connected_components(m, directed=True, connection="strong")
    lab = lab[piece]
    out = []
    for x in np.unique(lab):
        out.append(piece[lab == x])
    out.sort(key=lambda a: int(a.min()))
    return out


def _carve(comp, dist, near, lt, lh, cut_mask, quarter, p, rng, k):
    size = comp.size
    sub_near = near[np.ix_(comp, comp)]
    out_light = 4 * sub_near.sum(axis=1) <= 3 * size
    in_light = 4 * sub_near.sum(axis=0) <= 3 * size
    remaining = np.zeros(k, dtype=bool)
    remaining[comp] = True
    balls = []
    for j in range(size):
        v = int(comp[j])
        if not remaining[v] or not (out_light[j] or in_light[j]):
            continue
        radius = min(quarter, int(rng.geometric(p)) - 1)
        if out_light[j]:
            ball = remaining & (dist[v] <= radius)
            rest = remaining & ~ball
            crossing = ball[lt] & rest[lh]
        else:
            ball = remaining & (dist[:, v] <= radius)
            rest = remaining & ~ball
            crossing = rest[lt] & ball[lh]
        cut_mask |= crossing
        remaining = rest
        balls.append(np.flatnonzero(ball))
    # pieces are pushed on a stack; reverse so they are processed in carving order
    balls.reverse()
    return balls


def _as_triples(g: WeightedDigraph, idx) -> list[tuple[int, int, int]]:
    return list(zip(g.tails[idx].tolist(), g.heads[idx].tolist(), g.weights[idx].tolist()))


def _check_postcondition(g, cut, label, dist_of, d) -> list[list[int]]:
    keep = np.ones(g.m, dtype=bool)
    keep[cut] = False
    rest = WeightedDigraph.from_arrays(g.n, g.tails[keep], g.heads[keep], g.weights[keep])
    comps = strongly_connected_components(rest)
    for comp in comps:
        if len(comp) < 2:
            continue
        verts, dist = dist_of[int(label[comp[0]])]
        pos = np.searchsorted(verts, comp)
        diam = dist[np.ix_(pos, pos)].max()
        if diam > d:
            raise InternalInvariantViolation(
                f"SCC {comp} has weak diameter {diam} > {d} after decomposition"
            )
    return comps


# ---- Monte-Carlo harness ------------------------------------------------------


@dataclass
class CutRateTable:
    """Empirical per-edge cut frequencies over many seeds."""

    d: Fraction
    runs: int
    counts: np.ndarray
    edges: list[tuple[int, int, int]] = field(repr=False)

    @property
    def frequency(self) -> np.ndarray:
        return self.counts / self.runs

    def alpha_hat(self) -> dict[tuple[int, int], float]:
        """Per-edge ``frequency * d / w``, the empirical cut-rate coefficient."""
        return {
            (u, v): float(f) * float(self.d) / w
            for (u, v, w), f in zip(self.edges, self.frequency)
        }

    def fitted_constant(self, n: int) -> float:
        """Smallest C with frequency <= C ln^2(n) w / d on every edge."""
        if not self.edges:
            return 0.0
        w = np.array([e[2] for e in self.edges], dtype=float)
        scale = math.log(max(n, 2)) ** 2 * w / float(self.d)
        return float((self.frequency / scale).max())


def cut_rate_experiment(g: WeightedDigraph, d, seeds, c0: float = DEFAULT_C0) -> CutRateTable:
    d = Fraction(d)
    counts = np.zeros(g.m, dtype=np.int64)
    runs = 0
    for s in seeds:
        res = directed_ldd(g, LddParams(d, c0, int(s)))
        runs += 1
        for u, v, _ in res.cut_edges:
            counts[g.edge_index[(u, v)]] += 1
    return CutRateTable(d, runs, counts, g.edges)
