import math
import random

import pytest

from lookahead_astar.graph import PLANAR, RoadGraph
from lookahead_astar.oracle import (
    A,
    B,
    C,
    T,
    OracleNoPath,
    cut,
    lookahead_paths,
    oracle_distances_to,
    oracle_lookahead,
    oracle_shortest,
)
from lookahead_astar.search import lookahead_h

from conftest import random_digraph

R2 = math.sqrt(2.0)


def two_step_pseudocode(g, visited, n, t):
    """Line-for-line 2-step look-ahead as written in pseudocode."""
    if n == t:
        return 0.0
    already_seen = [n]
    possible_vals = [math.inf]
    for n1, c1 in g.adj[n]:
        if n1 not in visited:
            if n1 == t:
                possible_vals.append(c1)
                continue
            already_seen.append(n1)
            for n2, c2 in g.adj[n1]:
                if n2 not in visited and n2 not in already_seen:
                    possible_vals.append(c1 + c2 + g.dist(n2, t))
            already_seen.remove(n1)
    return min(possible_vals)


def test_fixture_t1_shape(t1):
    assert len(t1) == 4 and t1.n_arcs == 8
    assert t1.metric_consistent
    for u, v, c in t1.arcs():
        assert c == t1.dist(u, v)


def test_oracle_shortest_t1(t1):
    # the only simple a->t paths are a,b,t (2) and a,c,t (2*sqrt2)
    cost, path = oracle_shortest(t1, A, T)
    assert cost == 2.0
    assert path == ((A, B), (B, T))


def test_oracle_same_node(t1):
    assert oracle_shortest(t1, C, C) == (0.0, ())


def test_oracle_no_path():
    g = RoadGraph([(0, 0), (0, 1)], [(0, 1, 1.0)], metric=PLANAR)
    with pytest.raises(OracleNoPath):
        oracle_shortest(g, 1, 0)


def test_oracle_distances_to(t1):
    assert oracle_distances_to(t1, T) == [2.0, 1.0, R2, 0.0]


def test_cut():
    a, b, t, c, d = 0, 1, 9, 2, 3
    assert cut((a, b, t, c, d), t) == (a, b, t)
    assert cut((a, b, c), t) == (a, b, c)


def test_lookahead_paths_t1(t1):
    assert sorted(lookahead_paths(t1, {A}, A, T, 2)) == [(A, B, T), (A, C, T)]
    assert lookahead_paths(t1, {A, B, C}, A, T, 1) == []


def test_oracle_lookahead_examples(t1):
    assert oracle_lookahead(t1, {A}, A, T, 2) == 2.0
    assert oracle_lookahead(t1, {A}, A, T, 1) == 2.0
    assert oracle_lookahead(t1, {A}, T, T, 3) == 0.0
    assert oracle_lookahead(t1, {A, T}, C, T, 1) == math.inf


def test_two_step_pseudocode_matches_on_t1(t1):
    assert two_step_pseudocode(t1, {A}, A, T) == 2.0


@pytest.mark.parametrize("seed", range(20))
def test_three_way_agreement_at_two_steps(seed):
    rng = random.Random(seed)
    g = random_digraph(rng, rng.randint(2, 30), rng.uniform(0.05, 0.4))
    for _ in range(10):
        n, t = rng.randrange(len(g)), rng.randrange(len(g))
        x = {u for u in range(len(g)) if u != n and rng.random() < 0.3}
        want = two_step_pseudocode(g, x, n, t)
        assert oracle_lookahead(g, x, n, t, 2) == want
        assert lookahead_h(g, x, n, t, 2) == want
