"""Command-line front end.

Machine-readable results go to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 runtime failure, 2 invalid configuration or arguments.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .diffusion import Action, CapacityError, TieRule, estimate_spread, exact_spread
from .fixtures import CHECKS, run_checks
from .graph import load_edge_list
from .harness import (
    bayesian_sweep,
    load_config,
    resolve_mu,
    run_experiment,
    write_traces,
)
from .oracles import (
    greedy_seed_select,
    ofu_auto,
    ofu_bipartite,
    ofu_boundary_enum,
    ofu_general_heuristic,
)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _load_graph(path: str):
    if not os.path.exists(path):
        raise ValueError(f"graph file does not exist: {path}")
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh.read())


def _parse_nodes(g, spec: str) -> frozenset:
    if not spec:
        return frozenset()
    return frozenset(g.node_id(tok.strip()) for tok in spec.split(",") if tok.strip())


def _mu_from_args(g, spec: str, file_probs):
    if spec == "inline":
        if file_probs is None:
            raise ValueError("--mu inline requires probabilities in the graph file")
        return file_probs
    return resolve_mu(g, spec)


def cmd_run(args) -> int:
    config = load_config(args.config, args.set or [])
    out_dir = args.out or config.meta.get("out", "traces")
    jobs = args.jobs or os.cpu_count() or 1
    if config.bayes_instances > 0:
        aggregate, traces = bayesian_sweep(config, config.bayes_instances, jobs=jobs)
    else:
        traces = run_experiment(config, jobs=jobs)
        aggregate = None
    write_traces(traces, out_dir)
    for trace in traces:
        print(f"repetition {trace.repetition}: cum_regret {float(trace.cum_regret[-1])!r}")
    if aggregate is not None:
        print(f"bayes mean: cum_regret {float(aggregate.cum_regret[-1])!r}")
    print(f"traces written to {out_dir}", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    selectors = None if args.all or not args.checks else args.checks
    results = run_checks(selectors)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += 0 if ok else 1
    return 1 if failed else 0


def cmd_spread(args) -> int:
    g, file_probs = _load_graph(args.graph)
    probs = _mu_from_args(g, args.mu, file_probs)
    seeds_a = _parse_nodes(g, args.seeds_a)
    seeds_b = _parse_nodes(g, args.seeds_b)
    rule = TieRule.parse(args.rule)
    k = args.k if args.k is not None else max(len(seeds_a), 1)
    action = Action(seeds_a, seeds_b, k)
    if args.mode == "exact":
        try:
            value = exact_spread(g, probs, action, rule)
        except CapacityError as exc:
            raise ValueError(f"{exc}; use --mode mc:<samples> instead") from exc
        print(f"{float(value)!r}")
    elif args.mode.startswith("mc:"):
        samples = int(args.mode.split(":", 1)[1])
        rng = np.random.default_rng(args.seed)
        mean, stderr = estimate_spread(g, probs, action, rule, samples, rng)
        print(f"{float(mean)!r},{float(stderr)!r}")
    else:
        raise ValueError(f"--mode must be exact or mc:<samples>, got {args.mode!r}")
    return 0


def _parse_intervals(g, spec: str):
    if spec.startswith("const:"):
        lo_s, hi_s = spec.split(":", 1)[1].split(",")
        lo = np.full(g.m, float(lo_s))
        hi = np.full(g.m, float(hi_s))
        return lo, hi
    if spec.startswith("file:"):
        path = spec.split(":", 1)[1]
        data = np.loadtxt(path, ndmin=2)
        if data.shape != (g.m, 2):
            raise ValueError(f"interval file {path} must have {g.m} rows of 'lower upper'")
        return data[:, 0].copy(), data[:, 1].copy()
    raise ValueError(f"--intervals must be const:<lo>,<hi> or file:<path>, got {spec!r}")


def cmd_oracle(args) -> int:
    g, file_probs = _load_graph(args.graph)
    seeds_b = _parse_nodes(g, args.seeds_b)
    rule = TieRule.parse(args.rule)
    rng = np.random.default_rng(args.seed)
    common = dict(mc_samples=args.samples, rng=rng, exact=args.exact)
    if args.oracle == "greedy":
        if not args.mu:
            raise ValueError("--mu is required for the greedy oracle")
        probs = _mu_from_args(g, args.mu, file_probs)
        res = greedy_seed_select(g, probs, seeds_b, args.k, rule, **common)
    else:
        if not args.intervals:
            raise ValueError("--intervals is required for interval oracles")
        lower, upper = _parse_intervals(g, args.intervals)
        fn = {
            "bipartite": ofu_bipartite,
            "boundary": ofu_boundary_enum,
            "heuristic": ofu_general_heuristic,
            "auto": ofu_auto,
        }[args.oracle]
        res = fn(g, lower, upper, seeds_b, args.k, rule, **common)
    labels = ",".join(g.labels[u] for u in sorted(res.seeds_a))
    print(f"{labels} {float(res.value)!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cimbandits",
        description="Competitive cascade simulation and online seed-selection bandits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config value (section.key=value or key=value)")
    p_run.add_argument("--out", help="output directory (overrides run.out)")
    p_run.add_argument("--jobs", type=int, default=0,
                       help="parallel repetitions; 0 means all cores")
    p_run.set_defaults(fn=cmd_run)

    p_verify = sub.add_parser("verify", help="run the built-in fixture checks")
    p_verify.add_argument("checks", nargs="*",
                          help=f"subset of checks: {', '.join(CHECKS)}")
    p_verify.add_argument("--all", action="store_true", help="run every check")
    p_verify.set_defaults(fn=cmd_verify)

    p_spread = sub.add_parser("spread", help="evaluate one action's expected spread")
    p_spread.add_argument("--graph", required=True)
    p_spread.add_argument("--mu", default="inline", help="inline | wc | const:<p> | file:<path>")
    p_spread.add_argument("--seeds-a", default="", help="comma-separated node labels")
    p_spread.add_argument("--seeds-b", default="", help="comma-separated node labels")
    p_spread.add_argument("--rule", default="B>A")
    p_spread.add_argument("--mode", default="exact", help="exact | mc:<samples>")
    p_spread.add_argument("--k", type=int, default=None)
    p_spread.add_argument("--seed", type=int, default=0)
    p_spread.set_defaults(fn=cmd_spread)

    p_oracle = sub.add_parser("oracle", help="run one offline seed selection")
    p_oracle.add_argument("--graph", required=True)
    p_oracle.add_argument("--oracle", default="greedy",
                          choices=["greedy", "bipartite", "boundary", "heuristic", "auto"])
    p_oracle.add_argument("--mu", default="", help="inline | wc | const:<p> | file:<path>")
    p_oracle.add_argument("--intervals", default="", help="const:<lo>,<hi> | file:<path>")
    p_oracle.add_argument("--seeds-b", default="")
    p_oracle.add_argument("--k", type=int, required=True)
    p_oracle.add_argument("--rule", default="B>A")
    p_oracle.add_argument("--samples", type=int, default=1000)
    p_oracle.add_argument("--exact", action="store_true")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the config-error code
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        _err(str(exc))
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        _err(f"runtime failure: {exc}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
