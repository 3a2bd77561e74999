"""Command-line entry point: gen, route, bench, validate.

Exit codes: 0 success, 2 bad input or config, 3 no path, 4 failed report or
validation.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path as FsPath

from . import bench
from .graph import (
    GraphError,
    LoadOptions,
    check_metric,
    largest_navigable_component,
    read_network,
    write_network,
)
from .netgen import GRID, RANDOM_GEOMETRIC, DegenerateOutput, GenSpec, InvalidSpec, generate
from .oracle import OracleNoPath, oracle_shortest
from .search import (
    EUCLIDEAN,
    LOOKAHEAD,
    ZERO,
    HeuristicSpec,
    NoPath,
    astar,
    check_admissibility,
    dijkstra,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_PATH = 3
EXIT_FAILED = 4

log = logging.getLogger("lookahead_astar")


class UsageError(Exception):
    pass


def _write(text: str, out: str | None):
    if out:
        FsPath(out).parent.mkdir(parents=True, exist_ok=True)
        FsPath(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _add_gen_flags(p: argparse.ArgumentParser, required_kind: bool):
    p.add_argument("--kind", choices=[GRID, RANDOM_GEOMETRIC], required=required_kind)
    p.add_argument("--width", type=int, default=10)
    p.add_argument("--height", type=int, default=10)
    p.add_argument("--n", type=int, default=100, help="number of points (random_geometric)")
    p.add_argument("--radius", type=float, default=0.1, help="connection radius (random_geometric)")
    p.add_argument("--cost-factor", type=float, default=1.2)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--oneway-fraction", type=float, default=0.0)


def _gen_spec(args) -> GenSpec:
    return GenSpec(
        kind=args.kind,
        width=args.width,
        height=args.height,
        n=args.n,
        connect_radius=args.radius,
        cost_factor=args.cost_factor,
        jitter=args.jitter,
        seed=args.seed,
        oneway_fraction=args.oneway_fraction,
    ).validate()


def cmd_gen(args) -> int:
    g = generate(_gen_spec(args))
    nodes, edges = write_network(g, args.out)
    log.info("wrote %s and %s (%d nodes, %d arcs)", nodes, edges, len(g), g.n_arcs)
    return EXIT_OK


def _heuristic(args) -> HeuristicSpec:
    kind = args.heuristic
    if kind is None:
        return HeuristicSpec.from_k(args.k)
    if kind == LOOKAHEAD:
        return HeuristicSpec.lookahead(args.k if args.k else 1)
    if args.k:
        raise UsageError(f"--k applies only to the lookahead heuristic, not {kind}")
    return HeuristicSpec(kind)


def cmd_route(args) -> int:
    g = read_network(args.network, LoadOptions(strict=args.strict))
    try:
        s, t = g.index_of(args.source), g.index_of(args.target)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.algo == "dijkstra":
        if args.heuristic or args.k:
            raise UsageError("--k/--heuristic need --algo astar")
        res = dijkstra(g, s, t)
        label = "Dijkstra"
    else:
        h = _heuristic(args)
        res = astar(g, s, t, h, reopen=args.reopen, prune=not args.exhaustive)
        label = h.label
    ext = g.external_ids
    route = [ext[u] for u in res.path.nodes()] or [ext[s]]
    if args.format == "json":
        text = json.dumps({
            "algorithm": label,
            "source": args.source,
            "target": args.target,
            "path": route,
            "cost": res.cost,
            "nodes_expanded": res.nodes_expanded,
            "heuristic_evals": res.heuristic_evals,
            "wall_time_s": res.wall_time,
        }, indent=2) + "\n"
    else:
        text = (
            f"algorithm: {label}\n"
            f"path: {' '.join(map(str, route))}\n"
            f"cost: {res.cost!r}\n"
            f"nodes_expanded: {res.nodes_expanded}\n"
            f"heuristic_evals: {res.heuristic_evals}\n"
            f"wall_time_s: {res.wall_time:.6f}\n"
        )
    _write(text, args.out)
    return EXIT_OK


def _bench_config(args) -> bench.ExperimentConfig:
    data: dict = {}
    if args.config:
        cfg = bench.load_config(args.config)
        data = {
            "network": cfg.network,
            "algorithms": cfg.algorithms,
            "num_pairs": cfg.num_pairs,
            "runs_per_pair": cfg.runs_per_pair,
            "seed": cfg.seed,
            "pair": cfg.pair,
            "strict": cfg.strict,
            "prune": cfg.prune,
            "reopen": cfg.reopen,
        }
    if args.network and args.kind:
        raise UsageError("give either --network or --kind, not both")
    if args.network:
        data["network"] = args.network
    elif args.kind:
        data["network"] = _gen_spec(args)
    if "network" not in data:
        raise UsageError("bench needs --network, --kind or a --config naming a network")
    if args.k_max is not None:
        if args.k_max < 0:
            raise UsageError("--k-max must be >= 0")
        data["algorithms"] = [bench.DIJKSTRA, *range(args.k_max + 1)]
    for flag, key in (("pairs", "num_pairs"), ("runs", "runs_per_pair"), ("seed", "seed")):
        val = getattr(args, flag)
        if val is not None:
            data[key] = val
    if (args.source is None) != (args.target is None):
        raise UsageError("--source and --target go together")
    if args.source is not None:
        data["pair"] = (args.source, args.target)
        data["num_pairs"] = 1
    for key in ("strict", "prune", "reopen"):
        if getattr(args, key):
            data[key] = True
    return bench.ExperimentConfig(**data).validate()


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    report = bench.run_experiment(cfg)
    _write(bench.emit_report(report, args.format).decode("utf-8"), args.out)
    if args.plot_out:
        _write(bench.emit_report(report, "plot").decode("utf-8"), args.plot_out)
    if report.failed:
        for f in report.failures:
            log.error("%s", f)
        return EXIT_FAILED
    return EXIT_OK


def validate_network(g, pairs: int, seed: int, k_max: int, node_sample: int = 200):
    """Oracle-equivalence and admissibility checks; returns ``(name, ok, details)`` triples."""
    results = []
    bad_arcs = check_metric(g)
    ext = g.external_ids
    results.append((
        "metric consistency",
        not bad_arcs,
        [f"arc {ext[u]}->{ext[v]} cost {c!r} < distance {d!r}" for u, v, c, d in bad_arcs],
    ))

    n_pairs = min(pairs, len(g) * (len(g) - 1))
    sampled = bench.sample_pairs(g, n_pairs, seed) if n_pairs else []
    specs = [HeuristicSpec.euclidean()] + [HeuristicSpec.lookahead(k) for k in range(1, k_max + 1)]
    mismatches = []
    for s, t in sampled:
        try:
            want, _ = oracle_shortest(g, s, t)
        except OracleNoPath:
            mismatches.append(f"{ext[s]}->{ext[t]}: oracle finds no path")
            continue
        got = [("Dijkstra", dijkstra(g, s, t).cost)]
        got += [(h.label, astar(g, s, t, h).cost) for h in specs]
        for label, cost in got:
            if abs(cost - want) > 1e-9 * max(1.0, want):
                mismatches.append(f"{ext[s]}->{ext[t]}: {label} cost {cost!r} != oracle {want!r}")
    results.append((f"oracle equivalence ({len(sampled)} pairs)", not mismatches, mismatches))

    rng = random.Random(seed)
    nodes = list(range(len(g)))
    sample = nodes if len(nodes) <= node_sample else sorted(rng.sample(nodes, node_sample))
    targets = sorted({t for _, t in sampled})
    violations = []
    for t in targets:
        for h in specs:
            rep = check_admissibility(g, h, t, sample)
            violations += [
                f"{h.label} target {ext[t]}: h({ext[n]}) = {est!r} > exact {exact!r}"
                for n, est, exact in rep.violations
            ]
    results.append((f"admissibility ({len(targets)} targets)", not violations, violations))
    return results


def cmd_validate(args) -> int:
    g = read_network(args.network, LoadOptions(strict=args.strict))
    g = largest_navigable_component(g)
    results = validate_network(g, args.pairs, args.seed, args.k_max)
    ok = all(r[1] for r in results)
    if args.format == "json":
        text = json.dumps({
            "status": "PASS" if ok else "FAIL",
            "checks": [{"name": n, "status": "PASS" if p else "FAIL", "details": d} for n, p, d in results],
        }, indent=2) + "\n"
    else:
        lines = []
        for name, passed, details in results:
            lines.append(f"{'PASS' if passed else 'FAIL'}  {name}")
            lines += [f"      {d}" for d in details]
        lines.append("PASS" if ok else "FAIL")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lookahead-astar",
        description="Shortest paths with Dijkstra, A* and k-step look-ahead A*.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a synthetic planar network")
    _add_gen_flags(p, required_kind=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory for nodes.csv/edges.csv")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("route", help="solve one source-target query")
    p.add_argument("network", help="directory with nodes.csv and edges.csv")
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--algo", choices=["dijkstra", "astar"], default="astar")
    p.add_argument("--k", type=int, default=0, help="look-ahead depth; 0 is standard A*")
    p.add_argument("--heuristic", choices=[ZERO, EUCLIDEAN, LOOKAHEAD])
    p.add_argument("--reopen", action="store_true", help="re-expand closed nodes when g improves")
    p.add_argument("--exhaustive", action="store_true", help="enumerate look-ahead branches without pruning")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("bench", help="run the benchmark protocol")
    p.add_argument("--config", help="JSON or TOML experiment config")
    p.add_argument("--network", help="directory with nodes.csv and edges.csv")
    _add_gen_flags(p, required_kind=False)
    p.add_argument("--k-max", type=int)
    p.add_argument("--pairs", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--source", type=int)
    p.add_argument("--target", type=int)
    p.add_argument("--prune", action="store_true", help="bounded look-ahead (same results, less work)")
    p.add_argument("--reopen", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--format", choices=list(bench.FORMATS), default="csv")
    p.add_argument("--out")
    p.add_argument("--plot-out", help="also write plot-data csv here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", help="check search results and heuristics against brute force")
    p.add_argument("network", help="directory with nodes.csv and edges.csv")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--k-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (NoPath, OracleNoPath) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except (UsageError, GraphError, InvalidSpec, DegenerateOutput, bench.BenchError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
