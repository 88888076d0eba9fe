"""File formats.

Graph text: first non-comment line ``n m``, then ``m`` lines ``u v w``.
Lines starting with ``#`` are comments and may appear anywhere.  Duplicate
``(u, v)`` lines keep the smallest weight.

Cover JSON: ``{"n", "dags": [{"edges": [[u, v, w], ...]}, ...],
"additional_edges": [...], "seed", "method"}``.

Instance bundle: the graph file ``G`` plus ``G.paths.json`` (``{"paths":
[[v, ...], ...]}``) and ``G.meta.json`` (family, parameters, seed, layer map,
clique map).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .graph import Dag, DagCover, WeightedDigraph
from .generators import CliqueMap, Instance
from .hierarchy import Hierarchy, to_dump


class FormatError(ValueError):
    pass


# ---- graphs ---------------------------------------------------------------------


def _data_lines(lines: Iterable[str]):
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_graph(text: str) -> WeightedDigraph:
    it = _data_lines(text.splitlines())
    try:
        lineno, header = next(it)
    except StopIteration:
        raise FormatError("missing 'n m' header") from None
    parts = header.split()
    if len(parts) != 2:
        raise FormatError(f"line {lineno}: expected 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError(f"line {lineno}: header is not two integers") from None
    edges = []
    for lineno, line in it:
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'u v w', got {line!r}")
        try:
            edges.append(tuple(int(x) for x in parts))
        except ValueError:
            raise FormatError(f"line {lineno}: edge fields must be integers") from None
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    try:
        return WeightedDigraph(n, edges, weight_exponent=None)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_graph(g: WeightedDigraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def format_edge_lines(edges: Iterable[tuple[int, int, int]]) -> str:
    return "".join(f"{u} {v} {w}\n" for u, v, w in edges)


def read_graph(path) -> WeightedDigraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: WeightedDigraph, path) -> None:
    Path(path).write_text(format_graph(g))


# ---- covers ---------------------------------------------------------------------------


def cover_to_json(cover: DagCover) -> dict:
    return {
        "n": cover.n,
        "dags": [{"edges": [list(e) for e in d.graph.edges]} for d in cover.dags],
        "additional_edges": [list(e) for e in cover.additional_edges],
        "seed": cover.seed,
        "method": cover.method,
    }


def cover_from_json(obj: dict) -> DagCover:
    try:
        n = int(obj["n"])
        dags = []
        for d in obj["dags"]:
            g = WeightedDigraph(n, [tuple(e) for e in d["edges"]], weight_exponent=None)
            dags.append(Dag(g, None))
        extra = tuple(tuple(int(x) for x in e) for e in obj.get("additional_edges", []))
        return DagCover(n, tuple(dags), extra, obj.get("method", ""), obj.get("seed"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed cover: {exc}") from None


def dump_json(obj, fh: TextIO | None = None) -> str:
    text = json.dumps(obj, separators=(",", ":"), sort_keys=False) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def write_cover(cover: DagCover, path) -> None:
    Path(path).write_text(dump_json(cover_to_json(cover)))


def read_cover(path) -> DagCover:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"cover is not valid JSON: {exc}") from None
    return cover_from_json(obj)


# ---- instance bundles -----------------------------------------------------------------


def bundle_paths(graph_path) -> tuple[Path, Path]:
    p = str(graph_path)
    return Path(p + ".paths.json"), Path(p + ".meta.json")


def write_instance(inst: Instance, graph_path) -> None:
    write_graph(inst.graph, graph_path)
    paths_file, meta_file = bundle_paths(graph_path)
    if inst.paths is not None:
        paths_file.write_text(dump_json({"paths": inst.paths}))
    meta_file.write_text(dump_json(inst.metadata()))


def read_instance(graph_path) -> Instance:
    g = read_graph(graph_path)
    paths_file, meta_file = bundle_paths(graph_path)
    meta = json.loads(meta_file.read_text()) if meta_file.exists() else {"family": "graph"}
    paths = json.loads(paths_file.read_text())["paths"] if paths_file.exists() else None
    layers = np.array(meta["layers"], dtype=np.int64) if "layers" in meta else None
    cm = None
    if "clique_map" in meta:
        raw = meta["clique_map"]
        phi = {(u, v): (a, b) for u, v, a, b in raw["phi"]}
        cm = CliqueMap(raw["c"], np.array(raw["clique_of"], dtype=np.int64), phi)
    known = {"family", "params", "seed", "layers", "clique_map"}
    extra = {k: v for k, v in meta.items() if k not in known}
    return Instance(g, meta.get("family", "graph"), meta.get("params", {}), paths, layers, cm, meta.get("seed"), extra)


# ---- hierarchy dump -----------------------------------------------------------------------


def hierarchy_to_json(h: Hierarchy) -> dict:
    return to_dump(h)
