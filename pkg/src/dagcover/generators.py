"""Hard-instance generators.

Families:

* ``cycle``: the unit-weight directed cycle.
* ``diam``: two paths ``s -> t`` and ``t -> s`` closing a cycle, each with
  nested first-to-last shortcut edges over a binary tree of its subpaths.
  Every vertex ``v`` has predecessor ``v - 1 (mod n)``.
* ``base``: columns of grid points; a path leaves each of the first rows of
  column 1 with every integer slope ``x`` and weight ``x^2`` per edge.
* ``product``: the layered product of a base instance with itself.
* ``clique``: every vertex of a product (or base) instance replaced by a
  bidirectional clique, each original edge attached to random clique members.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedDigraph
from .rng import STREAM_CLIQUE, generator


class GeometryOverflow(ValueError):
    pass


@dataclass
class CliqueMap:
    c: int
    clique_of: np.ndarray  # vertex of the clique graph -> vertex of the original
    phi: dict[tuple[int, int], tuple[int, int]]  # original edge -> attached edge

    def members(self, v: int) -> list[int]:
        return [v * self.c + j for j in range(self.c)]


@dataclass
class Instance:
    graph: WeightedDigraph
    family: str
    params: dict = field(default_factory=dict)
    paths: list[list[int]] | None = None
    layers: np.ndarray | None = None  # layer index per vertex, 0-based
    clique_map: CliqueMap | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        meta = {"family": self.family, "params": dict(self.params), "seed": self.seed}
        if self.layers is not None:
            meta["layers"] = self.layers.tolist()
        if self.clique_map is not None:
            cm = self.clique_map
            meta["clique_map"] = {
                "c": cm.c,
                "clique_of": cm.clique_of.tolist(),
                "phi": [[u, v, a, b] for (u, v), (a, b) in sorted(cm.phi.items())],
            }
        meta.update(self.extra)
        return meta


# ---- cycle and the log-diameter family --------------------------------------------


def gen_directed_cycle(n: int) -> Instance:
    if n < 2:
        raise ValueError("cycle needs at least 2 vertices")
    g = WeightedDigraph(n, [(i, (i + 1) % n, 1) for i in range(n)])
    return Instance(g, "cycle", {"n": n})


def predecessor(v: int, n: int) -> int:
    return (v - 1) % n


def tree_shortcuts(path: list[int]) -> list[tuple[int, int]]:
    """First-to-last edges of every node of the binary tree over ``path``'s edges."""
    k = len(path) - 1
    out = []
    span = k
    while span >= 1:
        for start in range(0, k, span):
            out.append((path[start], path[start + span]))
        span //= 2
    return out


def gen_log_diameter(n: int) -> Instance:
    """Vertex ids: s = 0, a_i = i, t = n/2, b_i = n/2 + i."""
    if n < 8 or n & (n - 1):
        raise ValueError("n must be a power of two, at least 8")
    half = n // 2
    path_a = list(range(0, half + 1))
    path_b = list(range(half, n)) + [0]
    edges = set()
    for p in (path_a, path_b):
        edges.update(tree_shortcuts(p))
    g = WeightedDigraph(n, sorted((u, v, 1) for u, v in edges))
    return Instance(g, "diam", {"n": n}, extra={"s": 0, "t": half})


# ---- base graph ---------------------------------------------------------------------


def base_vertex(col: int, row: int, h: int) -> int:
    """Grid point (col, row), both 1-based, to its vertex id."""
    return (col - 1) * h + (row - 1)


def gen_base_graph(layers: int, height: int, sources: int, slopes: int) -> Instance:
    ell, h, sigma, r = layers, height, sources, slopes
    if ell < 2 or sigma < 1 or r < 1 or h < 1:
        raise ValueError("need layers >= 2 and positive height, sources, slopes")
    if sigma + (ell - 1) * r > h:
        raise GeometryOverflow(
            f"paths leave the grid: {sigma} + ({ell} - 1) * {r} > {h}"
        )
    paths, edges = [], []
    for row in range(1, sigma + 1):
        for x in range(1, r + 1):
            nodes = [base_vertex(i, row + (i - 1) * x, h) for i in range(1, ell + 1)]
            paths.append(nodes)
            edges.extend((a, b, x * x) for a, b in zip(nodes, nodes[1:]))
    n = ell * h
    g = WeightedDigraph(n, edges, weight_exponent=None)
    layer = np.repeat(np.arange(ell), h)
    params = {"layers": ell, "height": h, "sources": sigma, "slopes": r}
    return Instance(g, "base", params, paths, layer, extra={"vertex_of": "(col-1)*height + (row-1)"})


def base_parameters(n: int, p: int) -> tuple[int, int, int, int]:
    """(layers, height, sources, slopes) from a target vertex count and path count."""
    ell = max(2, math.ceil(n ** (2 / 3) / (2 * p ** (1 / 3))))
    h = n // ell
    sigma = max(1, math.floor(n ** (1 / 3) / 2))
    r = max(1, n // (2 * ell * ell))
    return ell, h, sigma, r


def gen_base_graph_np(n: int, p: int) -> Instance:
    inst = gen_base_graph(*base_parameters(n, p))
    inst.params.update({"n_target": n, "p_target": p, "paths_realized": len(inst.paths)})
    return inst


# ---- product graph ------------------------------------------------------------------


def gen_product_graph(base: Instance) -> Instance:
    """Layer 2i-1 is L_i x L_i and layer 2i is L_(i+1) x L_i (1-based)."""
    if base.family != "base":
        raise ValueError("product graph needs a base instance")
    ell, h = base.params["layers"], base.params["height"]
    g = base.graph
    size = h * h

    def pv(k: int, u: int, v: int) -> int:
        # k is the 1-based product layer; u, v are base vertex ids
        return (k - 1) * size + (u % h) * h + (v % h)

    paths, edges = [], {}
    for p1 in base.paths:
        for p2 in base.paths:
            nodes = [pv(1, p1[0], p2[0])]
            for i in range(1, ell):
                nodes.append(pv(2 * i, p1[i], p2[i - 1]))
                edges[(nodes[-2], nodes[-1])] = g.weight(p1[i - 1], p1[i])
                nodes.append(pv(2 * i + 1, p1[i], p2[i]))
                edges[(nodes[-2], nodes[-1])] = g.weight(p2[i - 1], p2[i])
            paths.append(nodes)
    n = (2 * ell - 1) * size
    prod = WeightedDigraph(n, [(u, v, w) for (u, v), w in sorted(edges.items())], weight_exponent=None)
    layer = np.repeat(np.arange(2 * ell - 1), size)
    params = {"base": dict(base.params), "layers": 2 * ell - 1, "base_layers": ell}
    return Instance(prod, "product", params, paths, layer)


# ---- clique replacement ---------------------------------------------------------------


def gen_clique_replacement(source: Instance, c: int, seed: int = 0) -> Instance:
    """Blow every vertex up into a bidirectional c-clique with random edge attachment.

    ``source`` is a product instance, or for ``c == 2`` also a base instance.
    Clique edges weigh 1; an attached edge weighs ``10 * ell * w`` where
    ``ell`` is the base layer count.
    """
    if c < 2:
        raise ValueError("clique size must be at least 2")
    if source.family == "product":
        ell = source.params["base_layers"]
    elif source.family == "base" and c == 2:
        ell = source.params["layers"]
    else:
        raise ValueError("clique replacement needs a product instance (or a base instance with c=2)")
    g = source.graph
    rng = generator(seed, STREAM_CLIQUE)
    picks = rng.integers(0, c, size=(g.m, 2))
    phi = {}
    edges = []
    for (u, v, w), (a, b) in zip(g.edges, picks.tolist()):
        us, vs = u * c + a, v * c + b
        phi[(u, v)] = (us, vs)
        edges.append((us, vs, 10 * ell * w))
    for v in range(g.n):
        for a in range(c):
            for b in range(c):
                if a != b:
                    edges.append((v * c + a, v * c + b, 1))
    star = WeightedDigraph(g.n * c, edges, weight_exponent=None)
    paths = [image_path(p, phi) for p in source.paths]
    clique_of = np.repeat(np.arange(g.n), c)
    layers = None if source.layers is None else np.repeat(source.layers, c)
    params = {"source": source.family, "source_params": dict(source.params), "c": c, "weight_scale": 10 * ell}
    return Instance(star, "clique", params, paths, layers, CliqueMap(c, clique_of, phi), seed)


def image_path(path: list[int], phi: dict[tuple[int, int], tuple[int, int]]) -> list[int]:
    out: list[int] = []
    for a, b in zip(path, path[1:]):
        x, y = phi[(a, b)]
        if not out or out[-1] != x:
            out.append(x)
        out.append(y)
    return out
