"""Command-line surface tying the modules into reproducible runs.

Subcommands: gen-graph, enumerate, exact-tree, sample, experiment,
render.  Every stochastic subcommand requires --seed; there is no
wall-clock fallback.  Outputs embed the run configuration and the
artifact version as '#' comment lines, so identical configurations give
byte-identical files.  --threads only schedules independent per-trial
streams and never changes any output byte.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .exact import (
    argmax_single_peak,
    format_fraction,
    fraction_to_decimal,
    sharpened_ratio_bound_check,
    single_peak_count_at,
    single_peak_prob_at,
    twin_factor_products,
)
from .experiments import (
    boundary_roughness,
    gradient_line,
    growth_comparison,
    twin_peaks_tree,
    two_peak_inits,
)
from .fileio import (
    read_config_comments,
    read_trace_csv,
    standard_header,
    write_pgm,
    write_report,
    write_trace_csv,
)
from .graphs import (
    Graph,
    centroids,
    grid_vertex,
    make_barbell_tree,
    make_grid,
    make_path,
    make_regular_tree,
    make_torus,
    read_edge_list,
    torus_vertex,
    tree_from_edges,
    write_edge_list,
)
from .labelings import read_labeling_text, write_labeling_text
from .oracle import (
    conditional_statistic,
    conditional_top_locations,
    enumerate_peak_counts,
)
from .sampling import (
    McmcConfig,
    RngStream,
    canonical_single_peak,
    eden_growth,
    mcmc_conditioned,
    rejection_conditioned,
    sequential_growth_labeling,
    uniform_labeling,
)


class UsageError(ValueError):
    pass


def parse_graph_spec(spec: str) -> Graph:
    """family:params graph descriptions, e.g. path:4, grid:3x5, torus:2x30,
    rtree:3x2, barbell:2x5, star:6, file:edges.txt."""
    family, sep, rest = spec.partition(":")
    if not sep:
        raise UsageError(f"graph spec {spec!r} needs the form family:params")
    try:
        if family == "path":
            return make_path(int(rest))
        if family == "grid":
            m, n = (int(x) for x in rest.split("x"))
            return make_grid(m, n)
        if family == "torus":
            d, side = (int(x) for x in rest.split("x"))
            return make_torus(d, side)
        if family == "rtree":
            d, k = (int(x) for x in rest.split("x"))
            return make_regular_tree(d, k)
        if family == "barbell":
            n, m = (int(x) for x in rest.split("x"))
            return make_barbell_tree(n, m)
        if family == "star":
            n = int(rest)
            return tree_from_edges(n, [(0, i) for i in range(1, n)])
        if family == "file":
            return read_edge_list(rest)
    except (ValueError, OSError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad graph spec {spec!r}: {exc}") from exc
    raise UsageError(f"unknown graph family {family!r}")


def _parse_range(text: str) -> range:
    lo, sep, hi = text.partition(":")
    if not sep:
        value = int(text)
        return range(value, value + 1)
    return range(int(lo), int(hi) + 1)


def _emit(lines: list[str], out: str | None) -> None:
    payload = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _config(args, keys: list[str]) -> dict:
    # --out and --threads are execution details, not run configuration
    out = {"seed": getattr(args, "seed", None)}
    for key in keys:
        out[key] = getattr(args, key.replace("-", "_"), None)
    return {k: v for k, v in out.items() if v is not None}


def _mcmc_config(args, n: int) -> McmcConfig | None:
    if args.mcmc_steps is None:
        if args.burn_in is not None or args.thinning is not None:
            raise UsageError("--burn-in/--thinning need --mcmc-steps")
        return None
    return McmcConfig(
        steps=args.mcmc_steps,
        burn_in=args.burn_in,
        thinning=args.thinning,
        proposal_mix=args.proposal_mix,
    )


def _default_start(g: Graph) -> int:
    if g.family == "torus":
        side = g.meta["side"]
        return torus_vertex(g, *([side // 2] * g.meta["dim"]))
    if g.family == "grid":
        return grid_vertex(g, (g.meta["n"] + 1) // 2, (g.meta["m"] + 1) // 2)
    return 0


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_gen_graph(args) -> int:
    g = parse_graph_spec(args.graph)
    header = standard_header("gen-graph", _config(args, ["graph"]))
    if args.out:
        write_edge_list(g, args.out, header)
    else:
        lines = [f"# {h}" for h in header]
        lines.append(str(g.n_vertices))
        lines.extend(f"{u} {v}" for u, v in g.edges())
        _emit(lines, None)
    return 0


def _cmd_enumerate(args) -> int:
    g = parse_graph_spec(args.graph)
    config = _config(args, ["graph", "k", "statistic"])
    lines = [f"# {h}" for h in standard_header("enumerate", config)]
    if args.k is None:
        table = enumerate_peak_counts(g, workers=args.threads)
        lines.append("k,count")
        for k in sorted(table.counts):
            lines.append(f"{k},{table.counts[k]}")
    elif args.statistic is None:
        dist = conditional_top_locations(g, args.k)
        lines.append("key,count")
        for key in sorted(dist.support):
            # pair keys are serialized "u,v" and quoted as one CSV field
            text = f'"{key[0]},{key[1]}"' if isinstance(key, tuple) else str(key)
            lines.append(f"{text},{dist.support[key]}")
    else:
        dist = conditional_statistic(g, args.k, args.statistic)
        lines.append("key,count")
        for key in sorted(dist.support):
            lines.append(f"{key},{dist.support[key]}")
    _emit(lines, args.out)
    return 0


def _cmd_exact_tree(args) -> int:
    config = _config(args, ["graph", "op", "d", "k", "d_range", "k_range"])
    lines = [f"# {h}" for h in standard_header("exact-tree", config)]
    op = args.op
    if op in ("single-peak", "single-peak-count", "centroids", "argmax"):
        if not args.graph:
            raise UsageError(f"--op {op} needs --graph")
        g = parse_graph_spec(args.graph)
        if op == "single-peak":
            render = fraction_to_decimal if args.decimal else format_fraction
            vals = [render(single_peak_prob_at(g, x)) for x in range(g.n_vertices)]
        elif op == "single-peak-count":
            vals = [str(single_peak_count_at(g, x)) for x in range(g.n_vertices)]
        elif op == "centroids":
            vals = [str(x) for x in centroids(g)]
        else:
            vals = [str(x) for x in argmax_single_peak(g)]
        lines.append(" ".join(vals))
    elif op == "twin-factors":
        if args.d_range is None and args.d is None:
            raise UsageError("--op twin-factors needs --d or --d-range")
        if args.k_range is None and args.k is None:
            raise UsageError("--op twin-factors needs --k or --k-range")
        ds = _parse_range(args.d_range) if args.d_range else _parse_range(str(args.d))
        ks = _parse_range(args.k_range) if args.k_range else _parse_range(str(args.k))
        lines.append("d,k,inequality_holds,polynomial_value,lhs_log10,rhs_log10")
        for d in ds:
            for k in ks:
                r = twin_factor_products(d, k)
                lines.append(
                    f"{d},{k},{1 if r.inequality_holds else 0},"
                    f"{r.polynomial_value},{r.lhs_log10!r},{r.rhs_log10!r}"
                )
    elif op == "sharpened":
        if args.d is None or args.k is None:
            raise UsageError("--op sharpened needs --d and --k")
        ok = sharpened_ratio_bound_check(args.d, args.k)
        lines.append("true" if ok else "false")
    else:
        raise UsageError(f"unknown exact-tree op {op!r}")
    _emit(lines, args.out)
    return 0


def _cmd_sample(args) -> int:
    g = parse_graph_spec(args.graph)
    rng = RngStream(args.seed, 0)
    config = _config(
        args,
        ["graph", "mode", "k", "start", "steps", "mcmc-steps", "burn-in",
         "thinning", "proposal-mix", "max-draws"],
    )
    header = standard_header("sample", config)
    mode = args.mode
    start = args.start if args.start is not None else _default_start(g)
    if mode == "uniform":
        lab = uniform_labeling(g, rng)
    elif mode == "rejection":
        if args.k is None:
            raise UsageError("--mode rejection needs --k")
        lab = rejection_conditioned(g, args.k, rng, args.max_draws)
    elif mode == "mcmc":
        if args.k is None:
            raise UsageError("--mode mcmc needs --k")
        cfg = _mcmc_config(args, g.n_vertices)
        if cfg is None:
            cfg = McmcConfig.one_sample_default(g.n_vertices)
        if args.k == 1:
            init = canonical_single_peak(g, start)
        elif args.k == 2:
            init = two_peak_inits(g)[0]
        else:
            raise UsageError("CLI mcmc sampling supports k = 1 or 2")
        lab = mcmc_conditioned(g, args.k, init, cfg, rng)[-1]
    elif mode == "eden":
        steps = args.steps if args.steps is not None else g.n_vertices - 1
        trace = eden_growth(g, start, steps, rng)
        write_trace_csv(trace, args.out, header)
        return 0
    elif mode == "sequential":
        lab = sequential_growth_labeling(g, start, rng)
    else:
        raise UsageError(f"unknown sample mode {mode!r}")
    write_labeling_text(lab, args.out, header)
    return 0


def _cmd_experiment(args) -> int:
    rng = RngStream(args.seed, 0)
    name = args.name
    if name == "boundary-roughness":
        if args.n is None:
            raise UsageError("boundary-roughness needs --n")
        g_n = make_grid(args.n, args.n).n_vertices
        cfg = _mcmc_config(args, g_n)
        report = boundary_roughness(
            args.n, args.trials, cfg, rng, threads=args.threads,
            pin_center=not args.free_peak,
        )
    elif name == "gradient-line":
        if args.n is None or args.m is None:
            raise UsageError("gradient-line needs --m and --n")
        cfg = _mcmc_config(args, args.m * args.n)
        report = gradient_line(
            args.m, args.n, args.trials, cfg, rng, threads=args.threads
        )
    elif name == "twin-peaks":
        if not args.graph:
            raise UsageError("twin-peaks needs --graph")
        g = parse_graph_spec(args.graph)
        cfg = _mcmc_config(args, g.n_vertices)
        report = twin_peaks_tree(
            g, args.trials, cfg, rng, mode=args.mode, threads=args.threads
        )
    elif name == "growth-comparison":
        if args.n is None:
            raise UsageError("growth-comparison needs --n")
        cfg = _mcmc_config(args, args.n * args.n)
        report = growth_comparison(
            args.n, args.trials, cfg, rng, threads=args.threads
        )
    else:
        raise UsageError(f"unknown experiment {name!r}")
    config = _config(args, ["name", "graph", "mode", "n", "m", "trials"])
    write_report(report, args.out, extra_header=standard_header("experiment", config))
    return 0


def _cmd_render(args) -> int:
    if (args.trace is None) == (args.labeling is None):
        raise UsageError("render needs exactly one of --trace / --labeling")
    source_path = args.trace if args.trace else args.labeling
    graph_spec = args.graph
    if graph_spec is None:
        # traces and labelings written by this CLI embed their graph spec
        graph_spec = read_config_comments(source_path).get("graph")
        if graph_spec is None:
            raise UsageError(
                f"{source_path} carries no embedded graph spec; pass --graph"
            )
    g = parse_graph_spec(graph_spec)
    config = _config(args, ["trace", "labeling"])
    config["graph"] = graph_spec
    header = standard_header("render", config)
    source = read_trace_csv(args.trace) if args.trace else read_labeling_text(args.labeling)
    write_pgm(source, g, args.out, header)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peaklab",
        description="random graph labelings conditioned on peaks",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="write a graph in edge-list format")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen_graph)

    p = sub.add_parser("enumerate", help="exact tables by exhaustive enumeration")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, choices=(1, 2))
    p.add_argument("--statistic")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("exact-tree", help="exact product-formula computations")
    p.add_argument("--graph")
    p.add_argument(
        "--op",
        required=True,
        choices=(
            "single-peak",
            "single-peak-count",
            "centroids",
            "argmax",
            "twin-factors",
            "sharpened",
        ),
    )
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d-range")
    p.add_argument("--k-range")
    p.add_argument("--decimal", action="store_true",
                   help="print probabilities as 12-significant-digit decimals")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_exact_tree)

    p = sub.add_parser("sample", help="draw labelings or growth traces")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--mode",
        required=True,
        choices=("uniform", "rejection", "mcmc", "eden", "sequential"),
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--start", type=int)
    p.add_argument("--steps", type=int, help="eden growth steps")
    p.add_argument("--mcmc-steps", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--thinning", type=int)
    p.add_argument("--proposal-mix", type=float, default=0.8)
    p.add_argument("--max-draws", type=int, default=100_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("experiment", help="run a measurement campaign")
    p.add_argument(
        "--name",
        required=True,
        choices=(
            "boundary-roughness",
            "gradient-line",
            "twin-peaks",
            "growth-comparison",
        ),
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--graph")
    p.add_argument("--mode", choices=("mcmc", "oracle"), default="mcmc")
    p.add_argument("--free-peak", action="store_true")
    p.add_argument("--mcmc-steps", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--thinning", type=int)
    p.add_argument("--proposal-mix", type=float, default=0.8)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("render", help="render a trace or labeling as P5 PGM")
    p.add_argument("--graph", help="optional when the input embeds its graph spec")
    p.add_argument("--trace")
    p.add_argument("--labeling")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args) or 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
