"""Brute-force ground truth: exact distances, literal look-ahead enumeration, fixtures.

Nothing here uses a priority queue or a heuristic, so agreement with the
search module is evidence rather than a tautology. Speed is not a goal.
"""

from __future__ import annotations

import math

from .graph import PLANAR, RoadGraph

INF = math.inf

MAX_ORACLE_NODES = 10_000

# FixtureT1 node ids
A, B, C, T = 0, 1, 2, 3


class OracleNoPath(Exception):
    pass


def fixture_t1() -> RoadGraph:
    """Four-node planar graph: a=(0,0), b=(1,0), c=(1,1), t=(2,0).

    Two-way arcs a-b and b-t cost 1, a-c and c-t cost sqrt(2). The unique
    shortest a->t route is a, b, t with cost 2.
    """
    # coords are (y, x)
    coords = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.0, 2.0)]
    r2 = math.sqrt(2.0)
    arcs = []
    for u, v, c in [(A, B, 1.0), (B, T, 1.0), (A, C, r2), (C, T, r2)]:
        arcs += [(u, v, c), (v, u, c)]
    return RoadGraph(coords, arcs, metric=PLANAR)


def _relax_to_fixpoint(n: int, arcs: list[tuple[int, int, float]], source: int):
    dist = [INF] * n
    pred = [-1] * n
    dist[source] = 0.0
    for _ in range(n):
        changed = False
        for u, v, c in arcs:
            du = dist[u]
            if du == INF:
                continue
            if du + c < dist[v]:
                dist[v] = du + c
                pred[v] = u
                changed = True
        if not changed:
            break
    return dist, pred


def oracle_shortest(g: RoadGraph, s: int, t: int) -> tuple[float, tuple[tuple[int, int], ...]]:
    """Exact minimum cost and one optimal path by Bellman-Ford style relaxation."""
    if len(g) > MAX_ORACLE_NODES:
        raise ValueError(f"oracle limited to {MAX_ORACLE_NODES} nodes")
    dist, pred = _relax_to_fixpoint(len(g), list(g.arcs()), s)
    if dist[t] == INF:
        raise OracleNoPath(f"{t} unreachable from {s}")
    nodes = [t]
    while nodes[-1] != s:
        nodes.append(pred[nodes[-1]])
    nodes.reverse()
    return dist[t], tuple(zip(nodes[:-1], nodes[1:]))


def oracle_distances_to(g: RoadGraph, t: int) -> list[float]:
    """Exact cost from every node to ``t`` (relaxation over reversed arcs)."""
    reverse = [(v, u, c) for u, v, c in g.arcs()]
    dist, _ = _relax_to_fixpoint(len(g), reverse, t)
    return dist


def oracle_distances_from(g: RoadGraph, s: int) -> list[float]:
    dist, _ = _relax_to_fixpoint(len(g), list(g.arcs()), s)
    return dist


def reachable_from(g: RoadGraph, s: int) -> set[int]:
    seen = {s}
    stack = [s]
    while stack:
        u = stack.pop()
        for v, _ in g.adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def lookahead_paths(g: RoadGraph, visited, n: int, t: int, k: int) -> list[tuple[int, ...]]:
    """Every look-ahead candidate from ``n`` as a node tuple.

    Candidates are acyclic, avoid ``visited``, and have exactly ``k`` arcs.
    A walk that reaches ``t`` sooner cannot continue past it and is kept
    as it is.
    """
    if isinstance(visited, (bytes, bytearray)):
        visited = {u for u, flag in enumerate(visited) if flag}
    out = []

    def grow(nodes):
        last = nodes[-1]
        if len(nodes) - 1 == k or (last == t and len(nodes) > 1):
            out.append(tuple(nodes))
            return
        for v, _ in g.adj[last]:
            if v in visited or v in nodes:
                continue
            grow(nodes + [v])

    grow([n])
    return out


def cut(path: tuple[int, ...], t: int) -> tuple[int, ...]:
    """Prefix of ``path`` up to and including its first visit of ``t``."""
    if t in path:
        return path[: path.index(t) + 1]
    return path


def oracle_lookahead(g: RoadGraph, visited, n: int, t: int, k: int) -> float:
    """Literal k-step look-ahead: build the whole candidate set, cut, score, take the min."""
    if n == t:
        return 0.0
    if isinstance(visited, (bytes, bytearray)):
        visited = {u for u, flag in enumerate(visited) if flag}
    visited = set(visited)
    candidates = [cut(p, t) for p in lookahead_paths(g, visited, n, t, k)]
    values = [INF]
    for p in candidates:
        total = 0.0
        for x, y in zip(p[:-1], p[1:]):
            total += g.cost(x, y)
        values.append(total + g.dist(p[-1], t) if p[-1] != t else total)
    return min(values)
