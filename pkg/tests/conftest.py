import math
import random

import pytest

from lookahead_astar.graph import PLANAR, RoadGraph, write_network
from lookahead_astar.netgen import GenSpec, generate
from lookahead_astar.oracle import fixture_t1

# acceptance criterion outcomes, keyed by criterion number
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        num, title = marker
        outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        prev = _CRITERIA.get(num)
        if prev is None or prev[1] == "PASS":
            _CRITERIA[num] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, outcome = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {outcome}  {title}")


@pytest.fixture
def t1():
    return fixture_t1()


@pytest.fixture
def t1_dir(tmp_path, t1):
    write_network(t1, tmp_path / "t1")
    return tmp_path / "t1"


def random_digraph(rng: random.Random, n: int, p: float, slack=(1.0, 2.0), metric_consistent=True) -> RoadGraph:
    """Random planar digraph; arc costs are the endpoint distance times a random factor."""
    coords = [(rng.random(), rng.random()) for _ in range(n)]
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p:
                d = math.hypot(coords[u][0] - coords[v][0], coords[u][1] - coords[v][1])
                if metric_consistent:
                    c = d * rng.choice([1.0, rng.uniform(*slack)])
                else:
                    c = d * rng.uniform(0.2, 2.0)
                arcs.append((u, v, c))
    return RoadGraph(coords, arcs, metric=PLANAR)


# road-like suite graphs: bounded degree, mostly two-way, metric-consistent
SUITE_SPECS = {
    "grid20": GenSpec(kind="grid", width=20, height=20, jitter=0.3, seed=1),
    "grid20_oneway": GenSpec(kind="grid", width=20, height=20, jitter=0.3, seed=2, oneway_fraction=0.3),
    "rgg500": GenSpec(kind="random_geometric", n=500, connect_radius=0.08, seed=42),
    "rgg200": GenSpec(kind="random_geometric", n=200, connect_radius=0.12, seed=7, cost_factor=1.0),
}

_SUITE_CACHE: dict = {}


def suite_graph(name: str) -> RoadGraph:
    if name not in _SUITE_CACHE:
        from lookahead_astar.graph import largest_navigable_component
        _SUITE_CACHE[name] = largest_navigable_component(generate(SUITE_SPECS[name]))
    return _SUITE_CACHE[name]


@pytest.fixture(params=sorted(SUITE_SPECS))
def suite(request):
    return suite_graph(request.param)
