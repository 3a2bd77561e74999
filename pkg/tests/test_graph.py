import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lookahead_astar.graph import (
    EARTH_RADIUS_M,
    PLANAR,
    EmptyGraph,
    GeoPoint,
    InvalidPath,
    LoadOptions,
    MalformedRow,
    MetricViolation,
    NegativeCost,
    Path,
    RoadGraph,
    UnknownEndpoint,
    export_csv,
    haversine_m,
    largest_navigable_component,
    load_network,
    path_cost,
    read_network,
    strongly_connected_components,
    write_network,
)
from lookahead_astar.oracle import A, B, C, T, reachable_from

from conftest import random_digraph

points = st.builds(
    GeoPoint,
    st.floats(-90, 90, allow_nan=False),
    st.floats(-180, 180, allow_nan=False),
)


# --- haversine ---------------------------------------------------------------

def test_haversine_identical_points():
    assert haversine_m(GeoPoint(0, 0), GeoPoint(0, 0)) == 0.0


def test_haversine_one_degree_of_meridian():
    # arc of one degree on a sphere: 2*pi*r / 360
    assert haversine_m(GeoPoint(0, 0), GeoPoint(1, 0)) == pytest.approx(2 * math.pi * EARTH_RADIUS_M / 360, rel=1e-12)
    assert haversine_m(GeoPoint(0, 0), GeoPoint(1, 0)) == pytest.approx(111_194.93, abs=0.005)


def test_haversine_antipodal():
    assert haversine_m(GeoPoint(0, 0), GeoPoint(0, 180)) == pytest.approx(math.pi * EARTH_RADIUS_M, rel=1e-12)
    assert haversine_m(GeoPoint(0, 0), GeoPoint(0, 180)) == pytest.approx(20_015_086.8, abs=0.05)


@pytest.mark.parametrize("lat,lon", [(91, 0), (-90.5, 0), (0, 181), (0, -180.1), (math.nan, 0), (0, math.inf)])
def test_geopoint_rejects_out_of_range(lat, lon):
    with pytest.raises(ValueError):
        GeoPoint(lat, lon)


@given(points, points)
def test_haversine_symmetric(a, b):
    d1, d2 = haversine_m(a, b), haversine_m(b, a)
    assert d1 >= 0
    assert d1 == pytest.approx(d2, rel=1e-9, abs=1e-9)


@given(points)
def test_haversine_self_distance(a):
    assert haversine_m(a, a) <= 1e-6


@given(points, points, points)
def test_haversine_triangle_inequality(x, y, z):
    assert haversine_m(x, z) <= haversine_m(x, y) + haversine_m(y, z) + 1e-6


# --- construction --------------------------------------------------------------

def test_self_loops_dropped_and_cheapest_parallel_kept():
    g = RoadGraph([(0, 0), (0, 1)], [(0, 0, 1.0), (0, 1, 3.0), (0, 1, 2.0), (1, 0, 5.0)], metric=PLANAR)
    assert list(g.arcs()) == [(0, 1, 2.0), (1, 0, 5.0)]


def test_arc_endpoint_must_exist():
    with pytest.raises(UnknownEndpoint):
        RoadGraph([(0, 0)], [(0, 1, 1.0)], metric=PLANAR)


def test_negative_cost_rejected():
    with pytest.raises(NegativeCost):
        RoadGraph([(0, 0), (1, 1)], [(0, 1, -1.0)], metric=PLANAR)


def test_metric_consistency_flag(t1):
    assert t1.metric_consistent
    g = RoadGraph([(0, 0), (0, 1)], [(0, 1, 0.5)], metric=PLANAR)
    assert not g.metric_consistent


# --- path utilities ------------------------------------------------------------

def test_path_cost_empty(t1):
    assert path_cost(t1, Path((), 0.0)) == 0


def test_path_cost_t1(t1):
    assert path_cost(t1, [(A, B), (B, T)]) == 2.0


def test_path_cost_rejects_broken_chain(t1):
    with pytest.raises(InvalidPath):
        path_cost(t1, [(A, B), (C, T)])


def test_path_cost_rejects_missing_arc(t1):
    with pytest.raises(InvalidPath):
        path_cost(t1, [(A, T)])


def test_path_predicates(t1):
    p = Path.from_nodes(t1, [A, B, T])
    assert p.is_valid() and p.is_acyclic()
    assert p.nodes() == [A, B, T]
    assert Path(((A, B), (B, A), (A, C)), 0).is_valid()
    assert not Path(((A, B), (B, A), (A, C)), 0).is_acyclic()
    assert not Path(((A, B), (C, T)), 0).is_valid()


# --- loading ------------------------------------------------------------------

def _write(tmp_path, nodes: str, edges: str):
    (tmp_path / "n.csv").write_text(nodes)
    (tmp_path / "e.csv").write_text(edges)
    return tmp_path / "n.csv", tmp_path / "e.csv"


NODES_3 = "id,lat,lon\n100,40.0,-73.0\n200,40.001,-73.0\n300,40.001,-73.001\n"


def test_load_oneway_row_gives_one_arc(tmp_path):
    files = _write(tmp_path, NODES_3, "u,v,length,oneway\n100,200,200.0,true\n200,300,100.0,false\n")
    g = load_network(*files)
    assert len(g) == 3 and g.n_arcs == 3
    assert g.external_ids == (100, 200, 300)
    assert g.has_arc(0, 1) and not g.has_arc(1, 0)
    assert g.cost(1, 2) == g.cost(2, 1) == 100.0
    assert g.metric == "great-circle"


def test_load_unknown_endpoint(tmp_path):
    files = _write(tmp_path, NODES_3, "u,v,length,oneway\n100,999,200.0,true\n")
    with pytest.raises(UnknownEndpoint):
        load_network(*files)


@pytest.mark.parametrize("edges", [
    "u,v,length,oneway\n100,200,abc,true\n",
    "u,v,length,oneway\n100,200,1.0\n",
    "u,v,length,oneway\n100,200,1.0,maybe\n",
    "a,b,c,d\n100,200,1.0,true\n",
])
def test_load_malformed_rows(tmp_path, edges):
    files = _write(tmp_path, NODES_3, edges)
    with pytest.raises(MalformedRow):
        load_network(*files)


def test_load_negative_length(tmp_path):
    files = _write(tmp_path, NODES_3, "u,v,length,oneway\n100,200,-5,true\n")
    with pytest.raises(NegativeCost):
        load_network(*files)


def test_load_metric_violation_warns_then_strict_rejects(tmp_path, caplog):
    # ~111 m apart but only 10 m long
    files = _write(tmp_path, NODES_3, "u,v,length,oneway\n100,200,10.0,false\n")
    g = load_network(*files)
    assert g.n_arcs == 2
    assert "cost less than the distance" in caplog.text
    with pytest.raises(MetricViolation):
        load_network(*files, LoadOptions(strict=True))


def test_planar_comment_selects_metric(tmp_path):
    files = _write(
        tmp_path,
        "# metric=planar\nid,lat,lon\n0,0,0\n1,300,400\n",
        "u,v,length,oneway\n0,1,500,false\n",
    )
    g = load_network(*files)
    assert g.metric == PLANAR
    assert g.dist(0, 1) == 500.0


def test_export_round_trip_is_arc_identical(tmp_path):
    rng = random.Random(3)
    g = random_digraph(rng, 30, 0.15)
    write_network(g, tmp_path / "g")
    h = read_network(tmp_path / "g")
    assert h.external_ids == g.external_ids
    assert h.coords == g.coords
    assert sorted(h.arcs()) == sorted(g.arcs())
    assert export_csv(h) == export_csv(g)


def test_export_round_trip_geographic(tmp_path):
    files = _write(tmp_path, NODES_3, "u,v,length,oneway\n100,200,200.0,true\n200,300,100.0,false\n")
    g = load_network(*files)
    write_network(g, tmp_path / "out")
    h = read_network(tmp_path / "out")
    assert list(h.arcs()) == list(g.arcs()) and h.metric == g.metric


def test_export_rows_sorted(t1):
    _, edges = export_csv(t1)
    rows = [line.split(",") for line in edges.splitlines()[2:]]
    assert [(int(r[0]), int(r[1])) for r in rows] == sorted((int(r[0]), int(r[1])) for r in rows)
    assert all(r[3] == "false" for r in rows)


# --- component extraction --------------------------------------------------------

def _cycle(n):
    return RoadGraph([(i, 0) for i in range(n)], [(i, (i + 1) % n, 1.0) for i in range(n)], metric=PLANAR)


def test_component_of_strongly_connected_graph_is_identity():
    g = _cycle(5)
    assert largest_navigable_component(g) is g


def test_component_tie_goes_to_smallest_external_id():
    # triangle on ext ids 10,11,12, triangle on 3,4,5, isolated node 0
    coords = [(i, 0) for i in range(7)]
    ext = [10, 11, 12, 3, 4, 5, 0]
    arcs = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 4, 1), (4, 5, 1), (5, 3, 1)]
    g = RoadGraph(coords, arcs, metric=PLANAR, external_ids=ext)
    comps = sorted(sorted(g.external_ids[u] for u in c) for c in strongly_connected_components(g))
    assert comps == [[0], [3, 4, 5], [10, 11, 12]]
    h = largest_navigable_component(g)
    assert h.external_ids == (3, 4, 5)
    assert h.n_arcs == 3


def test_component_of_directed_chain_is_a_single_node():
    g = RoadGraph([(0, 0), (1, 0), (2, 0)], [(0, 1, 1), (1, 2, 1)], metric=PLANAR, external_ids=[7, 8, 9])
    h = largest_navigable_component(g)
    assert len(h) == 1 and h.external_ids == (7,)


def test_component_of_empty_graph():
    with pytest.raises(EmptyGraph):
        largest_navigable_component(RoadGraph([], [], metric=PLANAR))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 60), st.floats(0.02, 0.2))
def test_component_is_mutually_reachable(seed, n, p):
    g = random_digraph(random.Random(seed), n, p)
    h = largest_navigable_component(g)
    nodes = set(range(len(h)))
    for u in nodes:
        assert reachable_from(h, u) == nodes
    # nothing larger was discarded (components by brute-force mutual reachability)
    reach = [reachable_from(g, u) for u in range(len(g))]
    biggest = max(sum(1 for v in reach[u] if u in reach[v]) for u in range(len(g)))
    assert len(h) == biggest
