"""Seeded synthetic planar road networks (lattices and random geometric graphs)."""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

from .graph import PLANAR, RoadGraph, largest_navigable_component, planar_distance

GRID = "grid"
RANDOM_GEOMETRIC = "random_geometric"


class InvalidSpec(ValueError):
    pass


class DegenerateOutput(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    kind: str = GRID
    width: int = 10
    height: int = 10
    n: int = 100
    connect_radius: float = 0.1
    cost_factor: float = 1.2
    jitter: float = 0.0
    seed: int = 0
    oneway_fraction: float = 0.0

    def validate(self) -> "GenSpec":
        if self.kind not in (GRID, RANDOM_GEOMETRIC):
            raise InvalidSpec(f"unknown kind {self.kind!r}")
        if self.kind == GRID and (self.width < 2 or self.height < 2):
            raise InvalidSpec(f"grid needs width, height >= 2 (got {self.width}x{self.height})")
        if self.kind == RANDOM_GEOMETRIC:
            if self.n < 2:
                raise InvalidSpec(f"random geometric graph needs n >= 2, got {self.n}")
            if not self.connect_radius >= 0:
                raise InvalidSpec(f"connect_radius must be >= 0, got {self.connect_radius}")
        if not (math.isfinite(self.cost_factor) and self.cost_factor >= 1.0):
            raise InvalidSpec(f"cost_factor must be >= 1, got {self.cost_factor}")
        if not (math.isfinite(self.jitter) and self.jitter >= 0.0):
            raise InvalidSpec(f"jitter must be >= 0, got {self.jitter}")
        if not 0.0 <= self.oneway_fraction <= 1.0:
            raise InvalidSpec(f"oneway_fraction must lie in [0, 1], got {self.oneway_fraction}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)


def _arcs_for(pairs, coords, spec: GenSpec, rng: random.Random):
    arcs = []
    for u, v in pairs:
        c = planar_distance(coords[u], coords[v]) * spec.cost_factor
        if spec.oneway_fraction and rng.random() < spec.oneway_fraction:
            if rng.random() < 0.5:
                u, v = v, u
            arcs.append((u, v, c))
        else:
            arcs += [(u, v, c), (v, u, c)]
    return arcs


def gen_grid(spec: GenSpec) -> RoadGraph:
    """``width x height`` lattice with unit spacing; node id = row * width + col."""
    spec.validate()
    if spec.kind != GRID:
        raise InvalidSpec(f"gen_grid called with kind {spec.kind!r}")
    rng = random.Random(spec.seed)
    w, h = spec.width, spec.height
    coords = []
    for row in range(h):
        for col in range(w):
            y, x = float(row), float(col)
            if spec.jitter:
                r = spec.jitter * math.sqrt(rng.random())
                a = rng.uniform(0.0, 2.0 * math.pi)
                y, x = y + r * math.sin(a), x + r * math.cos(a)
            coords.append((y, x))
    pairs = []
    for row in range(h):
        for col in range(w):
            u = row * w + col
            if col + 1 < w:
                pairs.append((u, u + 1))
            if row + 1 < h:
                pairs.append((u, u + w))
    return RoadGraph(coords, _arcs_for(pairs, coords, spec, rng), metric=PLANAR)


def gen_random_geometric(spec: GenSpec) -> RoadGraph:
    """Uniform points in the unit square, joined when within ``connect_radius``.

    The result is cut down to its largest strongly connected component.
    """
    spec.validate()
    if spec.kind != RANDOM_GEOMETRIC:
        raise InvalidSpec(f"gen_random_geometric called with kind {spec.kind!r}")
    rng = random.Random(spec.seed)
    coords = [(rng.random(), rng.random()) for _ in range(spec.n)]
    radius = spec.connect_radius
    pairs = []
    if radius > 0:
        cell = max(radius, 1e-6)
        buckets: dict[tuple[int, int], list[int]] = {}
        for u, (y, x) in enumerate(coords):
            buckets.setdefault((int(y / cell), int(x / cell)), []).append(u)
        for u, (y, x) in enumerate(coords):
            cy, cx = int(y / cell), int(x / cell)
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    for v in buckets.get((cy + dy, cx + dx), ()):
                        if v > u and planar_distance(coords[u], coords[v]) <= radius:
                            pairs.append((u, v))
        pairs.sort()
    g = RoadGraph(coords, _arcs_for(pairs, coords, spec, rng), metric=PLANAR)
    g = largest_navigable_component(g)
    if len(g) < 2:
        raise DegenerateOutput(f"largest component has {len(g)} node(s); increase connect_radius")
    return g


def generate(spec: GenSpec) -> RoadGraph:
    if spec.kind == GRID:
        return gen_grid(spec)
    if spec.kind == RANDOM_GEOMETRIC:
        return gen_random_geometric(spec)
    raise InvalidSpec(f"unknown kind {spec.kind!r}")
