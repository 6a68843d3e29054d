"""Maximal separated nets, clipped Voronoi partitions, covering multiplicity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .geom import (
    Box,
    ConvexPolygon,
    HalfPlane,
    contains_points,
    halfplane_clip,
)

MAX_GRID_POINTS = 10_000_000
SEPARATION_RTOL = 1e-12


class ProbeTooCoarse(ValueError):
    pass


class DuplicateSites(ValueError):
    pass


@dataclass(frozen=True)
class PointSet:
    points: np.ndarray
    separation: float
    cover_radius: float
    probe_step: float = 0.0

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def min_distance(self) -> float:
        if len(self.points) < 2:
            return math.inf
        d, _ = cKDTree(self.points).query(self.points, k=2)
        return float(d[:, 1].min())

    def to_dict(self) -> dict:
        return {"r": self.separation, "cover_radius": self.cover_radius,
                "probe_step": self.probe_step, "points": self.points.tolist()}


@dataclass(frozen=True)
class Partition:
    cells: list
    sites: PointSet
    multiplicity: int = 1
    domain: ConvexPolygon | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.cells)

    def diameters(self) -> np.ndarray:
        return np.array([c.diameter for c in self.cells])

    def areas(self) -> np.ndarray:
        return np.array([c.area for c in self.cells])


def _next_free(free: np.ndarray, start: int, chunk: int = 4096) -> int:
    n = len(free)
    while start < n:
        hit = np.flatnonzero(free[start:start + chunk])
        if len(hit):
            return start + int(hit[0])
        start += chunk
    return -1


def _greedy(candidates: np.ndarray, r: float) -> np.ndarray:
    """Scan candidates in order; keep one iff it is >= r from all kept."""
    thresh = (r * (1.0 - SEPARATION_RTOL)) ** 2
    free = np.ones(len(candidates), dtype=bool)
    chosen = []
    i = _next_free(free, 0)
    while i >= 0:
        chosen.append(i)
        d2 = ((candidates - candidates[i]) ** 2).sum(1)
        free &= d2 >= thresh
        i = _next_free(free, i + 1)
    return candidates[chosen]


def _polygon_probes(P: ConvexPolygon, step: float) -> np.ndarray:
    lo, hi = P.bbox()
    nx = int(math.floor((hi[0] - lo[0]) / step + 1e-9)) + 1
    ny = int(math.floor((hi[1] - lo[1]) / step + 1e-9)) + 1
    xs = lo[0] + step * np.arange(nx)
    ys = lo[1] + step * np.arange(ny)
    # row-major: y rows, x fastest
    X, Y = np.meshgrid(xs, ys)
    grid = np.column_stack([X.ravel(), Y.ravel()])
    grid = grid[contains_points(P, grid)]
    # boundary samples make the probe set dense near slanted edges
    starts, vecs = P.edges()
    bnd = []
    for s, e, L in zip(starts, vecs, P.edge_lengths()):
        k = max(1, int(math.ceil(L / step)))
        bnd.append(s + np.outer(np.arange(k) / k, e))
    return np.vstack([grid] + bnd)


def _box_greedy(box: Box, r: float, step: float) -> tuple[np.ndarray, float]:
    L = np.asarray(box.lengths)
    counts = np.ceil(L / step - 1e-9).astype(int) + 1
    while np.prod(counts.astype(float)) > MAX_GRID_POINTS:
        step *= 1.05
        counts = np.ceil(L / step - 1e-9).astype(int) + 1
    steps = L / (counts - 1)
    n = len(L)
    # offsets of all grid neighbours strictly closer than r
    reach = np.floor(r / steps).astype(int)
    grids = np.meshgrid(*[np.arange(-k, k + 1) for k in reach], indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    d2 = ((offs * steps) ** 2).sum(1)
    strides = np.array([int(np.prod(counts[i + 1:])) for i in range(n)], dtype=np.int64)
    # earlier grid points are already decided; only forward offsets matter
    offs = offs[(d2 < (r * (1 - SEPARATION_RTOL)) ** 2) & (offs @ strides > 0)]
    free = np.ones(int(np.prod(counts)), dtype=bool)
    chosen = []
    flat = _next_free(free, 0)
    while flat >= 0:
        idx = np.array(np.unravel_index(flat, counts))
        chosen.append(idx)
        nb = idx + offs
        ok = np.all((nb >= 0) & (nb < counts), axis=1)
        free[nb[ok] @ strides] = False
        flat = _next_free(free, flat + 1)
    pts = np.array(chosen, dtype=float).reshape(-1, n) * steps
    return pts, float(steps.max())


def maximal_separated_net(domain: ConvexPolygon | Box, r: float,
                          probe_step: float | None = None) -> PointSet:
    """Greedy r-separated net over a probe grid, maximal relative to the grid.

    The grid is scanned row-major; a probe point joins the net when it is at
    least ``r`` from every point already chosen.  Boxes whose grid would exceed
    ``MAX_GRID_POINTS`` get a coarser step; the reported covering radius always
    uses the step actually scanned.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    if probe_step is None:
        probe_step = r / 10
    if probe_step > r / 10 * (1 + 1e-12):
        raise ProbeTooCoarse(f"probe_step {probe_step} exceeds r/10 = {r / 10}")
    if isinstance(domain, Box):
        pts, step = _box_greedy(domain, r, probe_step)
        n = domain.dim
    else:
        if domain.is_empty:
            raise ValueError("empty domain")
        pts = _greedy(_polygon_probes(domain, probe_step), r)
        step, n = probe_step, 2
    return PointSet(pts, float(r), float(r + step * math.sqrt(n)), float(step))


def voronoi_partition(P: ConvexPolygon, sites: PointSet | np.ndarray) -> Partition:
    """Voronoi cells of ``sites`` clipped to ``P`` by perpendicular bisectors."""
    if not isinstance(sites, PointSet):
        pts = np.asarray(sites, dtype=float).reshape(-1, 2)
        sites = PointSet(pts, 0.0, math.inf)
    pts = sites.points
    if len(pts) == 0:
        raise ValueError("no sites")
    if not np.all(contains_points(P, pts, 1e-9 * max(P.scale, 1.0))):
        raise ValueError("sites must lie in the domain")
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    if len(pts) > 1 and d.min() <= 1e-12 * max(P.scale, 1.0):
        raise DuplicateSites("two sites coincide")
    cells = []
    for i, x in enumerate(pts):
        cell = P
        for j in np.argsort(d[i]):
            if not np.isfinite(d[i, j]):
                break
            if cell.is_empty:
                break
            # a site farther than twice the cell radius cannot cut the cell
            reach = np.sqrt(((cell.vertices - x) ** 2).sum(1)).max()
            if d[i, j] > 2 * reach:
                break
            cell = halfplane_clip(cell, HalfPlane.bisector(x, pts[j]))
        cells.append(cell)
    return Partition(cells, sites, 1, P)


def covering_multiplicity(cells: Sequence[ConvexPolygon], probe_step: float) -> int:
    """Max number of cells whose interior (shrunk by 1e-9) contains a probe point."""
    cells = [c for c in cells if not c.is_empty]
    if not cells:
        raise ValueError("no cells")
    lo = np.min([c.bbox()[0] for c in cells], axis=0)
    hi = np.max([c.bbox()[1] for c in cells], axis=0)
    xs = np.arange(lo[0], hi[0] + probe_step * 0.5, probe_step)
    ys = np.arange(lo[1], hi[1] + probe_step * 0.5, probe_step)
    X, Y = np.meshgrid(xs, ys)
    q = np.column_stack([X.ravel(), Y.ravel()])
    count = np.zeros(len(q), dtype=int)
    for c in cells:
        count += c.signed_distances(q) <= -1e-9
    return max(1, int(count.max()))


def partition_from_cells(P: ConvexPolygon, cells: Sequence[ConvexPolygon],
                         probe_step: float | None = None) -> Partition:
    """Wrap hand-made cells as a Partition, measuring their multiplicity."""
    cells = [c for c in cells if not c.is_empty]
    if probe_step is None:
        probe_step = P.diameter / 200
    centers = np.array([c.centroid for c in cells])
    M = covering_multiplicity(cells, probe_step)
    return Partition(list(cells), PointSet(centers, 0.0, math.inf), M, P)
