"""Road network model: coordinates, arcs, CSV ingestion/export and preprocessing."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path as FsPath
from typing import Iterable, Iterator, Sequence

log = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_000.0

GREAT_CIRCLE = "great-circle"
PLANAR = "planar"
METRICS = (GREAT_CIRCLE, PLANAR)

NODE_HEADER = ["id", "lat", "lon"]
EDGE_HEADER = ["u", "v", "length", "oneway"]


class GraphError(Exception):
    """Base class for network construction and validation failures."""


class MalformedRow(GraphError):
    pass


class UnknownEndpoint(GraphError):
    pass


class NegativeCost(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class InvalidPath(GraphError):
    pass


class MetricViolation(GraphError):
    """An arc is cheaper than the straight-line distance between its endpoints."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters between two points given in degrees."""
    return _haversine(a.lat, a.lon, b.lat, b.lon)


def _haversine(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    s_phi = math.sin((phi2 - phi1) / 2.0)
    s_lam = math.sin(math.radians(lon2 - lon1) / 2.0)
    a = s_phi * s_phi + math.cos(phi1) * math.cos(phi2) * s_lam * s_lam
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def _planar(y1: float, x1: float, y2: float, x2: float) -> float:
    return math.hypot(x2 - x1, y2 - y1)


def planar_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Straight-line distance between two ``(y, x)`` coordinate pairs."""
    return _planar(p[0], p[1], q[0], q[1])


_DISTANCE = {GREAT_CIRCLE: _haversine, PLANAR: _planar}


@dataclass(frozen=True)
class Path:
    """Ordered sequence of ``(from, to)`` arcs with its total cost."""

    edges: tuple[tuple[int, int], ...]
    total_cost: float

    @classmethod
    def from_nodes(cls, g: "RoadGraph", nodes: Sequence[int]) -> "Path":
        edges = tuple(zip(nodes[:-1], nodes[1:]))
        return cls(edges, path_cost(g, edges))

    def nodes(self) -> list[int]:
        if not self.edges:
            return []
        return [self.edges[0][0]] + [v for _, v in self.edges]

    def is_valid(self) -> bool:
        return all(self.edges[j][1] == self.edges[j + 1][0] for j in range(len(self.edges) - 1))

    def is_acyclic(self) -> bool:
        nodes = self.nodes()
        return len(nodes) == len(set(nodes))

    def __len__(self) -> int:
        return len(self.edges)


class RoadGraph:
    """Immutable directed arc graph with per-node coordinates.

    Coordinates are ``(lat, lon)`` for great-circle graphs and ``(y, x)`` for
    planar ones. Self-loops are dropped and among parallel arcs only the
    cheapest is kept. Adjacency lists are sorted by head node id.
    """

    __slots__ = ("coords", "external_ids", "metric", "adj", "_index", "_n_arcs", "_consistent")

    def __init__(
        self,
        coords: Sequence[Sequence[float]],
        arcs: Iterable[tuple[int, int, float]],
        metric: str = GREAT_CIRCLE,
        external_ids: Sequence[int] | None = None,
    ):
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
        n = len(coords)
        pts = []
        for y, x in coords:
            y, x = float(y), float(x)
            if metric == GREAT_CIRCLE:
                GeoPoint(y, x)
            elif not (math.isfinite(y) and math.isfinite(x)):
                raise ValueError(f"non-finite coordinate ({y}, {x})")
            pts.append((y, x))
        if external_ids is None:
            external_ids = range(n)
        ext = tuple(int(e) for e in external_ids)
        if len(ext) != n:
            raise ValueError("external_ids length does not match coords")
        index = {e: i for i, e in enumerate(ext)}
        if len(index) != n:
            raise ValueError("duplicate external node id")

        best: list[dict[int, float]] = [{} for _ in range(n)]
        for u, v, c in arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise UnknownEndpoint(f"arc ({u}, {v}) references a node outside 0..{n - 1}")
            c = float(c)
            if not math.isfinite(c):
                raise MalformedRow(f"non-finite cost on arc ({u}, {v})")
            if c < 0:
                raise NegativeCost(f"arc ({u}, {v}) has negative cost {c}")
            if u == v:
                continue
            old = best[u].get(v)
            if old is None or c < old:
                best[u][v] = c

        self.coords = tuple(pts)
        self.external_ids = ext
        self.metric = metric
        self.adj = tuple(tuple(sorted(d.items())) for d in best)
        self._index = index
        self._n_arcs = sum(len(a) for a in self.adj)
        self._consistent = None

    def __len__(self) -> int:
        return len(self.coords)

    def __repr__(self) -> str:
        return f"RoadGraph(nodes={len(self)}, arcs={self.n_arcs}, metric={self.metric!r})"

    @property
    def n_nodes(self) -> int:
        return len(self.coords)

    @property
    def n_arcs(self) -> int:
        return self._n_arcs

    def arcs(self) -> Iterator[tuple[int, int, float]]:
        for u, out in enumerate(self.adj):
            for v, c in out:
                yield u, v, c

    def out_arcs(self, u: int) -> tuple[tuple[int, float], ...]:
        return self.adj[u]

    def cost(self, u: int, v: int) -> float:
        for w, c in self.adj[u]:
            if w == v:
                return c
        raise KeyError((u, v))

    def has_arc(self, u: int, v: int) -> bool:
        return any(w == v for w, _ in self.adj[u])

    def index_of(self, external_id: int) -> int:
        try:
            return self._index[int(external_id)]
        except KeyError:
            raise KeyError(f"unknown node id {external_id}") from None

    def point(self, u: int) -> GeoPoint:
        return GeoPoint(*self.coords[u])

    def dist(self, u: int, v: int) -> float:
        """Metric distance between two nodes under the graph's metric."""
        (y1, x1), (y2, x2) = self.coords[u], self.coords[v]
        return _DISTANCE[self.metric](y1, x1, y2, x2)

    def distances_to(self, t: int) -> list[float]:
        """Metric distance from every node to ``t``."""
        fn = _DISTANCE[self.metric]
        ty, tx = self.coords[t]
        return [fn(y, x, ty, tx) for y, x in self.coords]

    def metric_violations(self, rel_tol: float = 0.0) -> list[tuple[int, int, float, float]]:
        """Arcs whose cost is below the endpoint distance, as ``(u, v, cost, dist)``."""
        out = []
        for u, v, c in self.arcs():
            d = self.dist(u, v)
            if c < d * (1.0 - rel_tol):
                out.append((u, v, c, d))
        return out

    @property
    def metric_consistent(self) -> bool:
        """True when every arc costs at least the metric distance of its endpoints (exactly)."""
        if self._consistent is None:
            self._consistent = not self.metric_violations()
        return self._consistent

    def subgraph(self, nodes: Iterable[int]) -> "RoadGraph":
        """Induced subgraph, re-densified in increasing order of the kept ids."""
        keep = sorted(set(nodes))
        remap = {u: i for i, u in enumerate(keep)}
        arcs = [
            (remap[u], remap[v], c)
            for u in keep
            for v, c in self.adj[u]
            if v in remap
        ]
        return RoadGraph(
            [self.coords[u] for u in keep],
            arcs,
            metric=self.metric,
            external_ids=[self.external_ids[u] for u in keep],
        )


def path_cost(g: RoadGraph, p: Path | Sequence[tuple[int, int]]) -> float:
    """Sum of arc costs along a path, summed from its first arc."""
    edges = p.edges if isinstance(p, Path) else tuple(p)
    total = 0.0
    for j, (u, v) in enumerate(edges):
        if j and edges[j - 1][1] != u:
            raise InvalidPath(f"arc {j} ({u}, {v}) does not continue from {edges[j - 1][1]}")
        try:
            total += g.cost(u, v)
        except (KeyError, IndexError):
            raise InvalidPath(f"({u}, {v}) is not an arc of the graph") from None
    return total


# --- preprocessing -----------------------------------------------------------

def strongly_connected_components(g: RoadGraph) -> list[list[int]]:
    """Strongly connected components, each as a sorted list of node ids."""
    import numpy as np
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    n = len(g)
    rows = [u for u, _, _ in g.arcs()]
    cols = [v for _, v, _ in g.arcs()]
    m = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(m, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for u, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(u)
    return list(groups.values())


def largest_navigable_component(g: RoadGraph) -> RoadGraph:
    """Keep only the largest strongly connected component.

    Ties go to the component containing the smallest external id. A graph that
    is already strongly connected is returned as is.
    """
    if len(g) == 0:
        raise EmptyGraph("graph has no nodes")
    comps = strongly_connected_components(g)
    if len(comps) == 1:
        return g
    best = min(comps, key=lambda c: (-len(c), min(g.external_ids[u] for u in c)))
    dropped = len(g) - len(best)
    log.info("dropping %d nodes outside the largest strongly connected component", dropped)
    return g.subgraph(best)


# --- CSV ingestion / export --------------------------------------------------

@dataclass(frozen=True)
class LoadOptions:
    strict: bool = False
    # None: take it from a "# metric=..." comment, else great-circle
    metric: str | None = None


def _read_rows(path, header: list[str]) -> tuple[list[tuple[int, list[str]]], dict[str, str]]:
    meta: dict[str, str] = {}
    rows: list[tuple[int, list[str]]] = []
    seen_header = False
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if row[0].lstrip().startswith("#"):
                text = ",".join(row).lstrip()[1:].strip()
                if "=" in text:
                    key, _, val = text.partition("=")
                    meta[key.strip()] = val.strip()
                continue
            if not seen_header:
                if [c.strip() for c in row] != header:
                    raise MalformedRow(f"{path}:{lineno}: expected header {','.join(header)}")
                seen_header = True
                continue
            if len(row) != len(header):
                raise MalformedRow(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
            rows.append((lineno, [c.strip() for c in row]))
    if not seen_header:
        raise MalformedRow(f"{path}: missing header {','.join(header)}")
    return rows, meta


def _parse_bool(text: str, where: str) -> bool:
    low = text.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise MalformedRow(f"{where}: oneway must be true or false, got {text!r}")


def load_network(node_file, edge_file, options: LoadOptions = LoadOptions()) -> RoadGraph:
    """Read a network from node/edge CSV lists.

    One-way rows give a single arc ``u -> v``; two-way rows give both
    directions with the same cost.
    """
    node_rows, node_meta = _read_rows(node_file, NODE_HEADER)
    edge_rows, edge_meta = _read_rows(edge_file, EDGE_HEADER)
    metric = options.metric or node_meta.get("metric") or edge_meta.get("metric") or GREAT_CIRCLE
    if metric not in METRICS:
        raise MalformedRow(f"unknown metric {metric!r}")

    ext_ids: list[int] = []
    coords: list[tuple[float, float]] = []
    index: dict[int, int] = {}
    for lineno, (sid, slat, slon) in node_rows:
        where = f"{node_file}:{lineno}"
        try:
            eid, lat, lon = int(sid), float(slat), float(slon)
        except ValueError as exc:
            raise MalformedRow(f"{where}: {exc}") from None
        if eid < 0:
            raise MalformedRow(f"{where}: negative node id {eid}")
        if eid in index:
            raise MalformedRow(f"{where}: duplicate node id {eid}")
        if metric == GREAT_CIRCLE and not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise MalformedRow(f"{where}: coordinate ({lat}, {lon}) out of range")
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise MalformedRow(f"{where}: non-finite coordinate")
        index[eid] = len(ext_ids)
        ext_ids.append(eid)
        coords.append((lat, lon))

    arcs: list[tuple[int, int, float]] = []
    for lineno, (su, sv, slen, sone) in edge_rows:
        where = f"{edge_file}:{lineno}"
        try:
            u, v, length = int(su), int(sv), float(slen)
        except ValueError as exc:
            raise MalformedRow(f"{where}: {exc}") from None
        oneway = _parse_bool(sone, where)
        if not math.isfinite(length):
            raise MalformedRow(f"{where}: non-finite length")
        if length < 0:
            raise NegativeCost(f"{where}: negative length {length}")
        for e in (u, v):
            if e not in index:
                raise UnknownEndpoint(f"{where}: node {e} is not in {node_file}")
        arcs.append((index[u], index[v], length))
        if not oneway:
            arcs.append((index[v], index[u], length))

    g = RoadGraph(coords, arcs, metric=metric, external_ids=ext_ids)
    check_metric(g, strict=options.strict)
    return g


# lengths in OSM exports are rounded, so the load-time check allows this much slack
LOAD_REL_TOL = 1e-9


def check_metric(g: RoadGraph, strict: bool = False) -> list[tuple[int, int, float, float]]:
    bad = g.metric_violations(rel_tol=LOAD_REL_TOL)
    if bad:
        u, v, c, d = bad[0]
        msg = (
            f"{len(bad)} arc(s) cost less than the distance between their endpoints, "
            f"e.g. {g.external_ids[u]}->{g.external_ids[v]} cost {c} < {d}"
        )
        if strict:
            raise MetricViolation(msg)
        log.warning("%s; heuristics may overestimate", msg)
    return bad


def _fmt(x: float) -> str:
    return repr(float(x))


def export_csv(g: RoadGraph) -> tuple[str, str]:
    """Render a graph as ``(nodes_csv, edges_csv)`` text.

    Opposing arcs of equal cost collapse into one two-way row; everything else
    is written as one-way rows. Rows are sorted by internal id.
    """
    nodes = io.StringIO(newline="")
    edges = io.StringIO(newline="")
    nw = csv.writer(nodes, lineterminator="\n")
    ew = csv.writer(edges, lineterminator="\n")
    if g.metric != GREAT_CIRCLE:
        nodes.write(f"# metric={g.metric}\n")
        edges.write(f"# metric={g.metric}\n")
    nw.writerow(NODE_HEADER)
    for u, (a, b) in enumerate(g.coords):
        nw.writerow([g.external_ids[u], _fmt(a), _fmt(b)])
    ew.writerow(EDGE_HEADER)
    ext = g.external_ids
    for u, v, c in g.arcs():
        back = dict(g.adj[v]).get(u)
        if back is not None and back == c:
            if u < v:
                ew.writerow([ext[u], ext[v], _fmt(c), "false"])
        else:
            ew.writerow([ext[u], ext[v], _fmt(c), "true"])
    return nodes.getvalue(), edges.getvalue()


NODE_FILE = "nodes.csv"
EDGE_FILE = "edges.csv"


def write_network(g: RoadGraph, directory) -> tuple[FsPath, FsPath]:
    """Write ``nodes.csv`` and ``edges.csv`` into ``directory``."""
    d = FsPath(directory)
    d.mkdir(parents=True, exist_ok=True)
    node_text, edge_text = export_csv(g)
    np_, ep = d / NODE_FILE, d / EDGE_FILE
    np_.write_text(node_text, encoding="utf-8")
    ep.write_text(edge_text, encoding="utf-8")
    return np_, ep


def read_network(directory, options: LoadOptions = LoadOptions()) -> RoadGraph:
    """Load ``nodes.csv``/``edges.csv`` from a network directory."""
    d = FsPath(directory)
    return load_network(d / NODE_FILE, d / EDGE_FILE, options)
