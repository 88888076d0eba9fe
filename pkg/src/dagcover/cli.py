"""Command line entry point: ``dagcover {gen,build,verify,stats,embed,ldd}``.

Exit codes: 0 success, 1 verification failure, 2 usage error (including a
refused DAG budget).
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import formats
from .baselines import BudgetExceeded, DEFAULT_MAX_DAGS, random_order_exact_cover, reachability_two_cover, shortest_path_dag_cover
from .cover_ldd import build_ldd_cover, sample_embedding_dag
from .generators import (
    GeometryOverflow,
    gen_base_graph,
    gen_base_graph_np,
    gen_clique_replacement,
    gen_directed_cycle,
    gen_log_diameter,
    gen_product_graph,
)
from .graph import apsp_array, min_apsp_over
from .ldd import DEFAULT_C0, InvalidParam, LddParams, directed_ldd
from .rng import STREAM_EMBED, child_seed
from .verify import verify_distance_cover, verify_reachability_cover

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dagcover", description="Build and verify DAG covers of weighted digraphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("--family", required=True, choices=["cycle", "diam", "base", "product", "clique"])
    g.add_argument("--n", type=int, help="vertex count (cycle, diam) or target count for base from (n, p)")
    g.add_argument("--p", type=int, help="target path count for base from (n, p)")
    g.add_argument("--layers", type=int, help="base graph layer count")
    g.add_argument("--height", type=int, help="base graph column height")
    g.add_argument("--sources", type=int, help="base graph source rows")
    g.add_argument("--slopes", type=int, help="base graph slope count")
    g.add_argument("--c", type=int, default=2, help="clique size for --family clique")
    g.add_argument("--over", choices=["product", "base"], default="product",
                   help="instance the cliques replace (base only with c=2)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", help="graph file; paths and metadata go next to it (stdout if omitted)")

    b = sub.add_parser("build", help="build a DAG cover")
    b.add_argument("--method", required=True, choices=["ldd", "reach2", "orders", "sp-dags"])
    b.add_argument("--reps", type=int, help="repetitions for ldd (default 10*ceil(log2 n))")
    b.add_argument("--d", type=int, default=2, help="hop parameter for orders")
    b.add_argument("--max-dags", type=int, default=DEFAULT_MAX_DAGS, help="DAG budget for orders")
    b.add_argument("--c0", type=float, default=DEFAULT_C0, help="LDD radius constant")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-j", "--jobs", type=int, default=1, help="worker processes")
    b.add_argument("-i", "--input", required=True, help="graph file")
    b.add_argument("-o", "--output", help="cover JSON (stdout if omitted)")

    v = sub.add_parser("verify", help="verify a cover against its graph")
    v.add_argument("--mode", required=True, choices=["distance", "reach"])
    v.add_argument("-a", "--alpha", type=_fraction, help="distortion bound; exceeding it fails the run")
    v.add_argument("-g", "--graph", required=True)
    v.add_argument("-c", "--cover", required=True)
    v.add_argument("-o", "--output", help="report JSON (stdout if omitted)")

    s = sub.add_parser("stats", help="distortion histogram of a cover as CSV")
    s.add_argument("-g", "--graph", required=True)
    s.add_argument("-c", "--cover", required=True)
    s.add_argument("--bin", type=_fraction, default=Fraction(1, 2), help="histogram bin width")
    s.add_argument("-o", "--output")

    e = sub.add_parser("embed", help="sample single-DAG embeddings; reach frequency and distortion CSV")
    e.add_argument("-g", "--graph", required=True)
    e.add_argument("--samples", type=int, required=True)
    e.add_argument("--pairs", type=int, help="only report this many reachable pairs (chosen by seed)")
    e.add_argument("--c0", type=float, default=DEFAULT_C0)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("-j", "--jobs", type=int, default=1)
    e.add_argument("-o", "--output")

    ld = sub.add_parser("ldd", help="run one directed LDD and print the cut edges")
    ld.add_argument("-g", "--graph", required=True)
    ld.add_argument("-d", "--d", type=_fraction, required=True, help="diameter target (rational allowed)")
    ld.add_argument("--c0", type=float, default=DEFAULT_C0)
    ld.add_argument("--seed", type=int, default=0)
    ld.add_argument("-o", "--output")
    return ap


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"family {args.family} needs {', '.join(missing)}")


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "cycle":
        _need(args, "n")
        inst = gen_directed_cycle(args.n)
    elif fam == "diam":
        _need(args, "n")
        inst = gen_log_diameter(args.n)
    else:
        if args.layers is not None:
            _need(args, "height", "sources", "slopes")
            base = gen_base_graph(args.layers, args.height, args.sources, args.slopes)
        else:
            _need(args, "n", "p")
            base = gen_base_graph_np(args.n, args.p)
        if fam == "base":
            inst = base
        elif fam == "product":
            inst = gen_product_graph(base)
        else:
            source = base if args.over == "base" else gen_product_graph(base)
            inst = gen_clique_replacement(source, args.c, args.seed)
    if args.output:
        formats.write_instance(inst, args.output)
    else:
        sys.stdout.write(formats.format_graph(inst.graph))
    return EXIT_OK


def cmd_build(args) -> int:
    g = formats.read_graph(args.input)
    if args.method == "ldd":
        cover = build_ldd_cover(g, args.reps, args.seed, args.jobs, args.c0)
    elif args.method == "reach2":
        cover = reachability_two_cover(g)
    elif args.method == "orders":
        cover = random_order_exact_cover(g, args.d, args.seed, args.max_dags, args.jobs)
    else:
        cover = shortest_path_dag_cover(g)
    _emit(formats.dump_json(formats.cover_to_json(cover)), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = formats.read_graph(args.graph)
    cover = formats.read_cover(args.cover)
    if args.mode == "distance":
        report = verify_distance_cover(g, cover, args.alpha)
    else:
        report = verify_reachability_cover(g, cover)
    out = report.to_json()
    out.pop("seconds")
    _emit(formats.dump_json(out), args.output)
    if report.cyclic_dags:
        print(f"cyclic DAGs: {report.cyclic_dags}", file=sys.stderr)
    if not report.ok or report.alpha_ok is False:
        return EXIT_FAIL
    return EXIT_OK


def cmd_stats(args) -> int:
    g = formats.read_graph(args.graph)
    cover = formats.read_cover(args.cover)
    dist = apsp_array(g)
    best = min_apsp_over([d.graph for d in cover.dags], g.n)
    tc = np.isfinite(dist) & ~np.eye(g.n, dtype=bool)
    covered = tc & np.isfinite(best)
    ratios = [Fraction(int(b), int(a)) for b, a in zip(best[covered], dist[covered])]
    width = args.bin
    counts: dict[int, int] = {}
    for r in ratios:
        k = math.floor((r - 1) / width)
        counts[k] = counts.get(k, 0) + 1
    lines = ["bin_low,bin_high,count"]
    for k in sorted(counts):
        lo, hi = 1 + k * width, 1 + (k + 1) * width
        lines.append(f"{float(lo):g},{float(hi):g},{counts[k]}")
    uncovered = int((tc & ~np.isfinite(best)).sum())
    if uncovered:
        lines.append(f"inf,inf,{uncovered}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _embed_sample(args):
    g, seed, c0, rows, cols = args
    dag = sample_embedding_dag(g, seed, c0)
    return apsp_array(dag.graph)[rows, cols]


def cmd_embed(args) -> int:
    g = formats.read_graph(args.graph)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    dist = apsp_array(g)
    tc = np.isfinite(dist) & ~np.eye(g.n, dtype=bool)
    rows, cols = np.nonzero(tc)
    if args.pairs is not None and args.pairs < rows.size:
        pick = np.sort(np.random.default_rng(child_seed(args.seed, STREAM_EMBED, 0)).choice(rows.size, args.pairs, replace=False))
        rows, cols = rows[pick], cols[pick]
    jobs = [(g, child_seed(args.seed, STREAM_EMBED, i + 1), args.c0, rows, cols) for i in range(args.samples)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            samples = list(pool.map(_embed_sample, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        samples = [_embed_sample(j) for j in jobs]
    d = np.stack(samples) if samples else np.zeros((0, rows.size))
    reached = np.isfinite(d)
    lines = ["s,t,dist,samples,reached,reach_freq,mean_distortion_given_reach"]
    for k in range(rows.size):
        s, t, base = int(rows[k]), int(cols[k]), dist[rows[k], cols[k]]
        hit = reached[:, k]
        cnt = int(hit.sum())
        mean = f"{float(np.mean(d[hit, k]) / base):.6f}" if cnt else "nan"
        lines.append(f"{s},{t},{int(base)},{args.samples},{cnt},{cnt / args.samples:.6f},{mean}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_ldd(args) -> int:
    g = formats.read_graph(args.graph)
    res = directed_ldd(g, LddParams(args.d, args.c0, args.seed))
    _emit(formats.format_edge_lines(res.cut_edges), args.output)
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "build": cmd_build,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "embed": cmd_embed,
    "ldd": cmd_ldd,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"BudgetExceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, InvalidParam, GeometryOverflow, formats.FormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
