"""Dijkstra, A* and the heuristic family (zero, straight-line, k-step look-ahead)."""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Collection, Mapping, Sequence

from .graph import Path, RoadGraph

INF = math.inf

ZERO = "zero"
EUCLIDEAN = "euclidean"
LOOKAHEAD = "lookahead"

# slack on the branch-and-bound cut inside the look-ahead; keeps pruning from
# dropping a branch whose value ties the incumbent up to rounding
_PRUNE_REL = 1e-10
_PRUNE_ABS = 1e-12


class SearchError(Exception):
    pass


class NoPath(SearchError):
    pass


class BrokenChain(SearchError):
    pass


@dataclass(frozen=True)
class HeuristicSpec:
    """Which remaining-cost estimator A* uses."""

    kind: str = EUCLIDEAN
    k: int = 0

    def __post_init__(self):
        if self.kind not in (ZERO, EUCLIDEAN, LOOKAHEAD):
            raise ValueError(f"unknown heuristic kind {self.kind!r}")
        if self.kind == LOOKAHEAD:
            if not isinstance(self.k, int) or self.k < 1:
                raise ValueError(f"look-ahead needs k >= 1, got {self.k!r}")
        elif self.k != 0:
            raise ValueError("k is only meaningful for the look-ahead heuristic")

    @classmethod
    def zero(cls) -> "HeuristicSpec":
        return cls(ZERO)

    @classmethod
    def euclidean(cls) -> "HeuristicSpec":
        return cls(EUCLIDEAN)

    @classmethod
    def lookahead(cls, k: int) -> "HeuristicSpec":
        return cls(LOOKAHEAD, k)

    @classmethod
    def from_k(cls, k: int) -> "HeuristicSpec":
        """k = 0 is standard A* (straight-line), k >= 1 the k-step look-ahead."""
        return cls.euclidean() if k == 0 else cls.lookahead(k)

    @property
    def label(self) -> str:
        if self.kind == LOOKAHEAD:
            return f"A* (k={self.k})"
        if self.kind == EUCLIDEAN:
            return "Standard A*"
        return "A* (h=0)"


@dataclass(frozen=True)
class SearchResult:
    path: Path
    cost: float
    nodes_expanded: int
    heuristic_evals: int = 0
    # arcs examined inside the heuristic; a machine-independent measure of its work
    heuristic_work: int = 0
    wall_time: float = 0.0
    settled: tuple[int, ...] = field(default=(), repr=False)


def visited_set(g: RoadGraph, nodes: Collection[int] = ()) -> bytearray:
    """Per-node visited flags with ``nodes`` marked."""
    flags = bytearray(len(g))
    for u in nodes:
        flags[u] = 1
    return flags


def _as_flags(g: RoadGraph, visited) -> bytearray:
    if isinstance(visited, (bytearray, bytes)) and len(visited) == len(g):
        return bytearray(visited)
    return visited_set(g, visited or ())


def euclidean_h(g: RoadGraph, n: int, t: int) -> float:
    """Straight-line (or great-circle) distance from ``n`` to ``t``."""
    if n == t:
        return 0.0
    return g.dist(n, t)


class _WalkBound:
    """Cheapest ``r``-arc walk from a node, cut at the target, plus straight-line rest.

    Dropping the acyclic and not-visited rules can only add candidates, so
    this never exceeds the look-ahead value of any continuation and serves as
    a pruning bound. Tables fill lazily and stay valid for the whole search.
    """

    __slots__ = ("adj", "dist_t", "t", "tables", "work")

    def __init__(self, adj, dist_t, t):
        self.adj = adj
        self.dist_t = dist_t
        self.t = t
        self.tables: list[dict[int, float]] = [{}]
        self.work = 0

    def __call__(self, v: int, r: int) -> float:
        if v == self.t:
            return 0.0
        if r == 0:
            return self.dist_t[v]
        while len(self.tables) <= r:
            self.tables.append({})
        table = self.tables[r]
        val = table.get(v)
        if val is None:
            val = INF
            for w, c in self.adj[v]:
                self.work += 1
                x = c + self(w, r - 1)
                if x < val:
                    val = x
            table[v] = val
        return val


def _lookahead(adj, dist_t, visited, seen, n, t, k, bound=None):
    """Minimum over depth-first look-ahead branches; returns ``(value, arcs_examined)``.

    ``seen`` is scratch space of per-node flags, all clear on entry and exit.
    With a ``bound`` the branches are explored cheapest-bound first and cut
    once they cannot beat the incumbent; the value is the same either way.
    """
    if n == t:
        return 0.0, 0
    best = INF
    work = 0

    def extend(u, cost, depth):
        nonlocal best, work
        for v, c in adj[u]:
            if visited[v] or seen[v]:
                continue
            work += 1
            total = cost + c
            if v == t:
                # branch is cut at the target and scores its own cost
                if total < best:
                    best = total
            elif depth == 1:
                val = total + dist_t[v]
                if val < best:
                    best = val
            else:
                seen[v] = 1
                extend(v, total, depth - 1)
                seen[v] = 0

    def extend_bounded(u, cost, depth):
        nonlocal best, work
        children = []
        for v, c in adj[u]:
            if visited[v] or seen[v]:
                continue
            work += 1
            total = cost + c
            if v == t:
                if total < best:
                    best = total
            elif depth == 1:
                val = total + dist_t[v]
                if val < best:
                    best = val
            else:
                children.append((total + bound(v, depth - 1), total, v))
        children.sort()
        for lower, total, v in children:
            if lower > best * (1.0 + _PRUNE_REL) + _PRUNE_ABS:
                break
            seen[v] = 1
            extend_bounded(v, total, depth - 1)
            seen[v] = 0

    seen[n] = 1
    try:
        (extend if bound is None else extend_bounded)(n, 0.0, k)
    finally:
        seen[n] = 0
    return best, work


def lookahead_h(
    g: RoadGraph,
    visited,
    n: int,
    t: int,
    k: int,
    dist_to_target: Sequence[float] | None = None,
    prune: bool = True,
) -> float:
    """k-step look-ahead estimate of the remaining cost from ``n`` to ``t``.

    Scores every acyclic continuation of ``k`` arcs from ``n`` that avoids
    ``visited`` nodes by its cost plus the straight-line distance from its last
    node to ``t``. A continuation that reaches ``t`` early stops there and
    scores its cost alone. Returns ``inf`` when no continuation exists.

    ``visited`` is either a per-node flag array or a collection of node ids.
    ``prune=False`` enumerates every branch; the result is identical.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    flags = _as_flags(g, visited)
    dist_t = dist_to_target if dist_to_target is not None else g.distances_to(t)
    bound = _WalkBound(g.adj, dist_t, t) if prune else None
    value, _ = _lookahead(g.adj, dist_t, flags, bytearray(len(g)), n, t, k, bound)
    return value


def reconstruct_path(
    previous: Mapping[int, int] | Sequence[int],
    s: int,
    t: int,
    g: RoadGraph | None = None,
) -> Path:
    """Unwind a predecessor map from ``t`` back to ``s``.

    ``previous`` may be a dict or a list using -1 for "no predecessor". The
    path cost is filled in from ``g`` when given, otherwise it is NaN.
    """
    if isinstance(previous, Mapping):
        get = previous.get
    else:
        def get(u):
            p = previous[u]
            return None if p < 0 else p

    nodes = [t]
    u = t
    limit = len(previous) + 1
    while u != s:
        p = get(u)
        if p is None or len(nodes) > limit:
            raise BrokenChain(f"no predecessor chain from {t} back to {s}")
        nodes.append(p)
        u = p
    nodes.reverse()
    edges = tuple(zip(nodes[:-1], nodes[1:]))
    cost = math.nan
    if g is not None:
        cost = 0.0
        for a, b in edges:
            cost += g.cost(a, b)
    return Path(edges, cost)


def _check_nodes(g: RoadGraph, s: int, t: int):
    n = len(g)
    for u in (s, t):
        if not 0 <= u < n:
            raise IndexError(f"node {u} not in graph of {n} nodes")


def dijkstra(g: RoadGraph, s: int, t: int) -> SearchResult:
    """Single-pair Dijkstra with a lazy-deletion binary heap.

    Stops as soon as ``t`` is settled. Ties on distance go to the lower node id.
    """
    _check_nodes(g, s, t)
    adj = g.adj
    started = time.perf_counter()
    d = [INF] * len(g)
    prev = [-1] * len(g)
    visited = bytearray(len(g))
    d[s] = 0.0
    queue = [(0.0, 0.0, s)]
    settled = []
    while queue:
        _, du, u = heapq.heappop(queue)
        if visited[u] or du > d[u]:
            continue
        visited[u] = 1
        settled.append(u)
        if u == t:
            break
        for v, c in adj[u]:
            if visited[v]:
                continue
            nd = du + c
            if nd < d[v]:
                d[v] = nd
                prev[v] = u
                heapq.heappush(queue, (nd, nd, v))
    if not visited[t]:
        raise NoPath(f"node {t} is unreachable from {s}")
    path = reconstruct_path(prev, s, t)
    path = Path(path.edges, d[t])
    elapsed = time.perf_counter() - started
    return SearchResult(path, d[t], len(settled), wall_time=elapsed, settled=tuple(settled))


def astar(
    g: RoadGraph,
    s: int,
    t: int,
    h: HeuristicSpec = HeuristicSpec(),
    *,
    reopen: bool = False,
    prune: bool = True,
    dist_to_target: Sequence[float] | None = None,
) -> SearchResult:
    """A* keyed on f = g + h with a lazy-deletion binary heap.

    h is evaluated whenever a node's g improves, against the visited set at
    that moment; a look-ahead estimate therefore changes as the search
    advances. Settled nodes are closed for good unless ``reopen`` is set.
    Ties on f go to the smaller g, then the lower node id. Nodes whose
    estimate is infinite are still queued, behind every finite key.

    ``prune`` switches the look-ahead between bounded and exhaustive
    enumeration. Both give the same estimates and so the same expansions;
    only the time spent inside the heuristic differs.

    ``dist_to_target`` is the per-node straight-line distance to ``t``; when
    omitted it is computed before the clock starts.
    """
    _check_nodes(g, s, t)
    dist_t = dist_to_target if dist_to_target is not None else g.distances_to(t)
    adj = g.adj
    n = len(g)
    kind, k = h.kind, h.k

    started = time.perf_counter()
    bound = _WalkBound(adj, dist_t, t) if kind == LOOKAHEAD and prune else None
    visited = bytearray(n)
    seen = bytearray(n)
    gs = [INF] * n
    prev = [-1] * n
    evals = 0
    work = 0

    def estimate(u):
        nonlocal evals, work
        evals += 1
        if kind == ZERO:
            return 0.0
        if kind == EUCLIDEAN:
            return dist_t[u]
        val, w = _lookahead(adj, dist_t, visited, seen, u, t, k, bound)
        work += w
        return val

    gs[s] = 0.0
    queue = [(estimate(s), 0.0, s)]
    settled = []
    while queue:
        _, gu, u = heapq.heappop(queue)
        if visited[u] or gu > gs[u]:
            continue
        visited[u] = 1
        settled.append(u)
        if u == t:
            break
        for v, c in adj[u]:
            ng = gu + c
            if visited[v]:
                if not (reopen and ng < gs[v]):
                    continue
                visited[v] = 0
            if ng < gs[v]:
                gs[v] = ng
                prev[v] = u
                heapq.heappush(queue, (ng + estimate(v), ng, v))
    if not visited[t]:
        raise NoPath(f"node {t} is unreachable from {s}")
    path = reconstruct_path(prev, s, t)
    path = Path(path.edges, gs[t])
    elapsed = time.perf_counter() - started
    if bound is not None:
        work += bound.work
    return SearchResult(
        path,
        gs[t],
        len(settled),
        heuristic_evals=evals,
        heuristic_work=work,
        wall_time=elapsed,
        settled=tuple(settled),
    )


def evaluate_heuristic(g: RoadGraph, h: HeuristicSpec, n: int, t: int, visited=(), dist_to_target=None) -> float:
    if h.kind == ZERO:
        return 0.0
    if h.kind == EUCLIDEAN:
        return euclidean_h(g, n, t)
    return lookahead_h(g, visited, n, t, h.k, dist_to_target)


# --- heuristic diagnostics -----------------------------------------------------

@dataclass
class ViolationReport:
    checked: int
    # admissibility: (node, h, exact); consistency: (n, p, h(n), c(n,p), h(p))
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


ADMISSIBILITY_TOL = 1e-6
CONSISTENCY_TOL = 1e-9


def check_admissibility(
    g: RoadGraph,
    h: HeuristicSpec,
    t: int,
    sample: Collection[int] | None = None,
    tol: float = ADMISSIBILITY_TOL,
) -> ViolationReport:
    """Compare h(n) (nothing visited) against the exact cost from n to t."""
    from .oracle import oracle_distances_to

    exact = oracle_distances_to(g, t)
    dist_t = g.distances_to(t)
    nodes = range(len(g)) if sample is None else sample
    report = ViolationReport(0)
    for n in nodes:
        if exact[n] == INF:
            continue
        report.checked += 1
        est = evaluate_heuristic(g, h, n, t, dist_to_target=dist_t)
        if est > exact[n] + tol:
            report.violations.append((n, est, exact[n]))
    return report


def check_consistency(g: RoadGraph, h: HeuristicSpec, t: int, tol: float = CONSISTENCY_TOL) -> ViolationReport:
    """Check h(n) <= c(n, p) + h(p) on every arc and h(t) = 0 (nothing visited)."""
    dist_t = g.distances_to(t)
    hv = [evaluate_heuristic(g, h, n, t, dist_to_target=dist_t) for n in range(len(g))]
    report = ViolationReport(g.n_arcs)
    if hv[t] != 0.0:
        report.violations.append((t, t, hv[t], 0.0, 0.0))
    for n, p, c in g.arcs():
        if hv[n] > c + hv[p] + tol:
            report.violations.append((n, p, hv[n], c, hv[p]))
    return report
