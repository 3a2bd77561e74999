"""Shortest-path search on road networks: Dijkstra, A*, and A* with a k-step look-ahead heuristic."""

from .graph import (
    GeoPoint,
    LoadOptions,
    Path,
    RoadGraph,
    haversine_m,
    largest_navigable_component,
    load_network,
    path_cost,
    read_network,
    write_network,
)
from .search import (
    HeuristicSpec,
    NoPath,
    SearchResult,
    astar,
    check_admissibility,
    check_consistency,
    dijkstra,
    euclidean_h,
    lookahead_h,
    reconstruct_path,
    visited_set,
)

__all__ = [
    "GeoPoint",
    "HeuristicSpec",
    "LoadOptions",
    "NoPath",
    "Path",
    "RoadGraph",
    "SearchResult",
    "astar",
    "check_admissibility",
    "check_consistency",
    "dijkstra",
    "euclidean_h",
    "haversine_m",
    "largest_navigable_component",
    "load_network",
    "lookahead_h",
    "path_cost",
    "read_network",
    "reconstruct_path",
    "visited_set",
    "write_network",
]

__version__ = "0.1.0"
