"""Benchmark harness: random source-target pairs, repeated timed runs, aggregate tables."""

from __future__ import annotations

import csv
import io
import json
import platform
import random
import statistics
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path as FsPath

from .graph import LoadOptions, RoadGraph, largest_navigable_component, read_network
from .netgen import GenSpec, generate
from .search import HeuristicSpec, astar, dijkstra

DIJKSTRA = "dijkstra"
COST_REL_TOL = 1e-9

CSV_COLUMNS = ["algorithm", "k", "mean_runtime_s", "mean_nodes_expanded"]
PLOT_COLUMNS = ["k", "mean_runtime_s", "mean_nodes_expanded"]

# keys of the json report that vary between otherwise identical runs
TIMING_KEYS = ("mean_runtime_s", "median_runtime_s", "runtimes_s")


class BenchError(ValueError):
    pass


class TooFewNodes(BenchError):
    pass


def algorithm_label(algo: str | int) -> str:
    if algo == DIJKSTRA:
        return "Dijkstra"
    return "Standard A*" if algo == 0 else f"A* (k={algo})"


@dataclass
class ExperimentConfig:
    """One benchmark run.

    ``network`` is a directory holding ``nodes.csv``/``edges.csv`` or a
    GenSpec. ``algorithms`` holds ``"dijkstra"`` and/or integers k, where
    k = 0 means standard A*. ``pair`` is ``None`` for random sampling or an
    ``(s, t)`` tuple of external node ids.
    """

    network: str | GenSpec
    algorithms: list = field(default_factory=lambda: [DIJKSTRA, *range(11)])
    num_pairs: int = 10
    runs_per_pair: int = 1
    seed: int = 0
    pair: tuple[int, int] | None = None
    strict: bool = False
    # exhaustive look-ahead keeps the heuristic's cost profile of a naive enumeration
    prune: bool = False
    reopen: bool = False

    def validate(self) -> "ExperimentConfig":
        if not isinstance(self.num_pairs, int) or self.num_pairs < 1:
            raise BenchError(f"num_pairs must be a positive integer, got {self.num_pairs!r}")
        if not isinstance(self.runs_per_pair, int) or self.runs_per_pair < 1:
            raise BenchError(f"runs_per_pair must be a positive integer, got {self.runs_per_pair!r}")
        for a in self.algorithms:
            if a != DIJKSTRA and not (isinstance(a, int) and not isinstance(a, bool) and a >= 0):
                raise BenchError(f"unknown algorithm {a!r}; use 'dijkstra' or an integer k >= 0")
        if len(set(map(str, self.algorithms))) != len(self.algorithms):
            raise BenchError("duplicate algorithm in config")
        if self.pair is not None:
            if len(self.pair) != 2:
                raise BenchError("pair must be (source, target)")
            if self.num_pairs != 1:
                raise BenchError("a fixed pair requires num_pairs = 1")
        return self

    @property
    def ordered_algorithms(self) -> list:
        ks = sorted(a for a in self.algorithms if a != DIJKSTRA)
        return ([DIJKSTRA] if DIJKSTRA in self.algorithms else []) + ks

    def to_dict(self) -> dict:
        d = asdict(self)
        d["network"] = self.network.to_dict() if isinstance(self.network, GenSpec) else str(self.network)
        d["algorithms"] = self.ordered_algorithms
        d["pair"] = list(self.pair) if self.pair is not None else None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known - {"k_max", "gen"}
        if unknown:
            raise BenchError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        if "gen" in data:
            if "network" in data:
                raise BenchError("give either network or gen, not both")
            try:
                data["network"] = GenSpec(**data.pop("gen"))
            except TypeError as exc:
                raise BenchError(f"bad gen section: {exc}") from None
        elif isinstance(data.get("network"), dict):
            try:
                data["network"] = GenSpec(**data["network"])
            except TypeError as exc:
                raise BenchError(f"bad network section: {exc}") from None
        if "network" not in data:
            raise BenchError("config needs a network directory or a gen section")
        if "k_max" in data:
            k_max = data.pop("k_max")
            if "algorithms" in data:
                raise BenchError("give either algorithms or k_max, not both")
            if not isinstance(k_max, int) or k_max < 0:
                raise BenchError(f"k_max must be a non-negative integer, got {k_max!r}")
            data["algorithms"] = [DIJKSTRA, *range(k_max + 1)]
        if data.get("pair") is not None:
            data["pair"] = tuple(data["pair"])
        return cls(**data).validate()


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a ``.json`` or ``.toml`` file."""
    path = FsPath(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        data = tomllib.loads(text)
    else:
        data = json.loads(text)
    return ExperimentConfig.from_dict(data)


def sample_pairs(g: RoadGraph, n: int, seed: int) -> list[tuple[int, int]]:
    """``n`` distinct ordered pairs ``(s, t)`` with ``s != t``, uniform and seeded."""
    size = len(g)
    if size < 2:
        raise TooFewNodes(f"need at least 2 nodes to sample pairs, graph has {size}")
    total = size * (size - 1)
    if n > total:
        raise BenchError(f"asked for {n} distinct pairs but only {total} exist")
    rng = random.Random(seed)
    pairs = []
    for idx in rng.sample(range(total), n):
        s, r = divmod(idx, size - 1)
        pairs.append((s, r + 1 if r >= s else r))
    return pairs


@dataclass
class PairRow:
    source: int
    target: int
    algorithm: str
    k: int | None
    cost: float
    nodes_expanded: int
    heuristic_evals: int
    heuristic_work: int
    runtimes_s: list[float]


@dataclass
class AlgorithmRow:
    algorithm: str
    k: int | None
    mean_runtime_s: float
    median_runtime_s: float
    mean_nodes_expanded: float
    mean_heuristic_evals: float
    mean_heuristic_work: float
    timing_samples: int
    pairs: int


@dataclass
class ExperimentReport:
    config: dict
    network: dict
    rows: list[AlgorithmRow]
    pair_rows: list[PairRow]
    failures: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return bool(self.failures)

    @property
    def status(self) -> str:
        return "FAILED" if self.failures else "OK"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "config": self.config,
            "network": self.network,
            "rows": [asdict(r) for r in self.rows],
            "pairs": [asdict(p) for p in self.pair_rows],
            "failures": list(self.failures),
            "metadata": self.metadata,
        }


def prepare_network(cfg: ExperimentConfig) -> RoadGraph:
    if isinstance(cfg.network, GenSpec):
        g = generate(cfg.network)
    else:
        g = read_network(cfg.network, LoadOptions(strict=cfg.strict))
    return largest_navigable_component(g)


def _run_one(g, s, t, algo, dist_t, cfg):
    if algo == DIJKSTRA:
        return dijkstra(g, s, t)
    return astar(
        g, s, t, HeuristicSpec.from_k(algo),
        reopen=cfg.reopen, prune=cfg.prune, dist_to_target=dist_t,
    )


def run_experiment(cfg: ExperimentConfig, graph: RoadGraph | None = None) -> ExperimentReport:
    """Run every algorithm ``runs_per_pair`` times on each sampled pair.

    Loading, component extraction, pair sampling and the per-target distance
    table are done before any clock starts. A pair on which the algorithms
    disagree about the cost marks the report FAILED.
    """
    cfg.validate()
    g = graph if graph is not None else prepare_network(cfg)
    if cfg.pair is not None:
        try:
            pairs = [(g.index_of(cfg.pair[0]), g.index_of(cfg.pair[1]))]
        except KeyError as exc:
            raise BenchError(f"fixed pair: {exc.args[0]}") from None
    else:
        pairs = sample_pairs(g, cfg.num_pairs, cfg.seed)
    algos = cfg.ordered_algorithms
    ext = g.external_ids

    per_algo: dict = {a: [] for a in algos}
    pair_rows: list[PairRow] = []
    failures: list[str] = []
    for s, t in pairs:
        dist_t = g.distances_to(t)
        costs = {}
        for algo in algos:
            times = []
            first = None
            for _ in range(cfg.runs_per_pair):
                res = _run_one(g, s, t, algo, dist_t, cfg)
                times.append(res.wall_time)
                if first is None:
                    first = res
                elif res.nodes_expanded != first.nodes_expanded or res.path != first.path:
                    failures.append(f"{algorithm_label(algo)} not deterministic on pair {ext[s]}->{ext[t]}")
            costs[algo] = first.cost
            row = PairRow(
                ext[s], ext[t], algorithm_label(algo), None if algo == DIJKSTRA else algo,
                first.cost, first.nodes_expanded, first.heuristic_evals, first.heuristic_work, times,
            )
            pair_rows.append(row)
            per_algo[algo].append(row)
        ref = min(costs.values(), default=0.0)
        for algo, c in costs.items():
            if abs(c - ref) > COST_REL_TOL * max(1.0, abs(ref)):
                failures.append(
                    f"cost mismatch on pair {ext[s]}->{ext[t]}: {algorithm_label(algo)} {c!r} vs best {ref!r}"
                )

    rows = []
    for algo in algos:
        samples = per_algo[algo]
        times = [x for r in samples for x in r.runtimes_s]
        # pairs are weighted equally: average each pair's runs first
        pair_means = [statistics.fmean(r.runtimes_s) for r in samples]
        rows.append(AlgorithmRow(
            algorithm=algorithm_label(algo),
            k=None if algo == DIJKSTRA else algo,
            mean_runtime_s=statistics.fmean(pair_means),
            median_runtime_s=statistics.median(times),
            mean_nodes_expanded=statistics.fmean(r.nodes_expanded for r in samples),
            mean_heuristic_evals=statistics.fmean(r.heuristic_evals for r in samples),
            mean_heuristic_work=statistics.fmean(r.heuristic_work for r in samples),
            timing_samples=len(times),
            pairs=len(samples),
        ))

    return ExperimentReport(
        config=cfg.to_dict(),
        network={"nodes": len(g), "arcs": g.n_arcs, "metric": g.metric},
        rows=rows,
        pair_rows=pair_rows,
        failures=failures,
        metadata={
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "host": f"{platform.node()} {platform.machine()} {platform.python_implementation()} "
                    f"{platform.python_version()}",
            "clock": "time.perf_counter",
        },
    )


def _num(x) -> str:
    if x is None:
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def report_csv(r: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in r.rows:
        w.writerow([row.algorithm, _num(row.k), _num(row.mean_runtime_s), _num(row.mean_nodes_expanded)])
    return buf.getvalue()


def plot_data_csv(r: ExperimentReport) -> str:
    """Runtime and expansions against k; Dijkstra goes last with k = ``dijkstra``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    rest = []
    for row in r.rows:
        line = [_num(row.k), _num(row.mean_runtime_s), _num(row.mean_nodes_expanded)]
        if row.k is None:
            line[0] = DIJKSTRA
            rest.append(line)
        else:
            w.writerow(line)
    w.writerows(rest)
    return buf.getvalue()


def report_table(r: ExperimentReport) -> str:
    header = ["Algorithm", "Avg Runtime (s)", "Median Runtime (s)", "Avg # of Nodes Expanded", "Avg Cost"]
    cost_by_algo: dict[str, list[float]] = {}
    for p in r.pair_rows:
        cost_by_algo.setdefault(p.algorithm, []).append(p.cost)
    body = []
    for row in r.rows:
        costs = cost_by_algo.get(row.algorithm, [])
        body.append([
            row.algorithm,
            f"{row.mean_runtime_s:.6f}",
            f"{row.median_runtime_s:.6f}",
            f"{row.mean_nodes_expanded:.2f}",
            f"{statistics.fmean(costs):.6f}" if costs else "",
        ])
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for b in body:
        lines.append("  ".join([b[0].ljust(widths[0])] + [x.rjust(w) for x, w in zip(b[1:], widths[1:])]))
    lines.append("")
    lines.append(f"status: {r.status}  nodes: {r.network['nodes']}  arcs: {r.network['arcs']}  "
                 f"pairs: {len({(p.source, p.target) for p in r.pair_rows})}")
    lines.extend(f"failure: {f}" for f in r.failures)
    return "\n".join(lines) + "\n"


FORMATS = ("csv", "json", "table", "plot")


def emit_report(r: ExperimentReport, format: str = "csv") -> bytes:
    """Serialize a report as csv, json, an aligned text table, or plot-data csv."""
    if format == "csv":
        text = report_csv(r)
    elif format == "json":
        text = json.dumps(r.to_dict(), indent=2, allow_nan=False) + "\n"
    elif format == "table":
        text = report_table(r)
    elif format == "plot":
        text = plot_data_csv(r)
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    return text.encode("utf-8")


def strip_timing(report_json: dict) -> dict:
    """Drop wall-clock and metadata fields so two runs can be compared byte for byte."""
    def clean(obj):
        if isinstance(obj, dict):
            return {k: clean(v) for k, v in obj.items() if k not in TIMING_KEYS and k != "metadata"}
        if isinstance(obj, list):
            return [clean(v) for v in obj]
        return obj
    return clean(report_json)
