"""Seeded instance generators for experiments.

All randomness goes through ``numpy.random.Generator(PCG64(seed))``, so a
seed fixes the instance on every platform that ships the same numpy
bit generator.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .geom import (
    ConvexPolygon,
    DegenerateInput,
    HalfPlane,
    contains_polygon,
    halfplane_clip,
    inradius,
    polygon_new,
)

MAX_DRAWS = 100
MIN_AREA_FRACTION = 0.01


class GenerationFailed(RuntimeError):
    pass


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 7
    pairs: int = 50
    vertex_range: tuple[int, int] = (8, 16)
    kmax: int = 10
    h: float = 0.02
    dims: tuple[int, ...] = (2, 3, 4, 5)
    out: str | None = None
    jobs: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.pairs < 1 or self.kmax < 1 or self.jobs < 1:
            raise ValueError("counts must be positive")
        if not self.h > 0:
            raise ValueError("h must be positive")
        lo, hi = self.vertex_range
        if not 3 <= lo <= hi:
            raise ValueError("vertex range must satisfy 3 <= lo <= hi")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vertex_range"] = list(self.vertex_range)
        d["dims"] = list(self.dims)
        return d


def random_disk_points(rng: np.random.Generator, count: int, radius: float = 1.0) -> np.ndarray:
    rho = radius * np.sqrt(rng.random(count))
    theta = 2 * math.pi * rng.random(count)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def random_polygon(rng: np.random.Generator, vertex_range=(8, 16)) -> ConvexPolygon:
    """Hull of a random number of uniform points in the unit disk."""
    for _ in range(MAX_DRAWS):
        m = int(rng.integers(vertex_range[0], vertex_range[1] + 1))
        try:
            return polygon_new(random_disk_points(rng, m))
        except DegenerateInput:
            continue
    raise GenerationFailed("no nondegenerate hull")


def _interior_point(rng: np.random.Generator, P: ConvexPolygon) -> np.ndarray:
    # random convex combination of the vertices, pulled toward the centroid
    w = rng.dirichlet(np.ones(len(P)))
    return 0.5 * (w @ P.vertices) + 0.5 * P.centroid


def generate_nested_pair(seed: int, vertex_range=(8, 16)) -> tuple[ConvexPolygon, ConvexPolygon]:
    """(inner, outer): outer is a random hull, inner is it cut by 1-4 half-planes."""
    rng = rng_for(seed)
    for _ in range(MAX_DRAWS):
        outer = random_polygon(rng, vertex_range)
        inner = outer
        for _ in range(int(rng.integers(1, 5))):
            x = _interior_point(rng, inner)
            theta = 2 * math.pi * rng.random()
            inner = halfplane_clip(inner, HalfPlane.through(x, (math.cos(theta), math.sin(theta))))
        if inner.is_empty or inner.area < MIN_AREA_FRACTION * outer.area:
            continue
        if contains_polygon(outer, inner):
            return inner, outer
    raise GenerationFailed(f"seed {seed}: no acceptable pair in {MAX_DRAWS} draws")


def random_partition_sites(rng: np.random.Generator, P: ConvexPolygon, count: int) -> np.ndarray:
    """``count`` distinct uniform points of P (rejection from the bounding box)."""
    lo, hi = P.bbox()
    pts = np.empty((0, 2))
    while len(pts) < count:
        q = lo + (hi - lo) * rng.random((4 * count, 2))
        q = q[P.signed_distances(q) < -1e-9 * P.scale]
        pts = np.vstack([pts, q])
    return pts[:count]


def random_radius_sweep(P: ConvexPolygon, count: int = 10) -> np.ndarray:
    """``count`` radii spread evenly up to the inradius, the last one equal to it."""
    return inradius(P) * np.arange(1, count + 1) / count
