"""Exact planar convex geometry and axis-aligned boxes.

Polygons are stored as counterclockwise vertex arrays with collinear and
duplicate vertices merged.  Clipping and erosion may legitimately produce
an empty region; that is represented by a polygon with no vertices
(:data:`EMPTY`) rather than by an exception.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# relative to the bounding-box diagonal
REL_TOL = 1e-12


class DegenerateInput(ValueError):
    """Input points span no area."""


class InvalidExponent(ValueError):
    pass


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points: np.ndarray, tol: float) -> np.ndarray:
    """Monotone-chain hull; drops vertices within ``tol`` of the chord."""
    pts = sorted(set(map(tuple, points.tolist())))
    if len(pts) < 3:
        return np.asarray(pts, dtype=float).reshape(-1, 2)

    def half(seq):
        chain: list = []
        for p in seq:
            while len(chain) >= 2:
                o, a = chain[-2], chain[-1]
                span = math.hypot(p[0] - o[0], p[1] - o[1])
                if _cross(o, a, p) <= tol * span:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return np.asarray(hull, dtype=float).reshape(-1, 2)


class ConvexPolygon:
    """Counterclockwise strictly convex polygon, or the empty polygon.

    Build instances with :func:`polygon_new`; the constructor trusts its
    input.
    """

    __slots__ = ("vertices", "_area", "_diam")

    def __init__(self, vertices: np.ndarray):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        self.vertices = v
        self._area = None
        self._diam = None

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def __len__(self) -> int:
        return len(self.vertices)

    def __bool__(self) -> bool:
        return not self.is_empty

    def __repr__(self) -> str:
        if self.is_empty:
            return "ConvexPolygon(EMPTY)"
        return f"ConvexPolygon({len(self)} vertices, area={self.area:.6g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return self.vertices.shape == other.vertices.shape and bool(
            np.all(self.vertices == other.vertices))

    def __hash__(self) -> int:
        return hash(self.vertices.tobytes())

    @property
    def area(self) -> float:
        if self._area is None:
            if self.is_empty:
                self._area = 0.0
            else:
                x, y = self.vertices[:, 0], self.vertices[:, 1]
                # shoelace about the first vertex to limit cancellation
                x = x - x[0]
                y = y - y[0]
                self._area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
        return self._area

    @property
    def diameter(self) -> float:
        if self._diam is None:
            if self.is_empty:
                self._diam = 0.0
            else:
                d = self.vertices[:, None, :] - self.vertices[None, :, :]
                self._diam = float(np.sqrt((d ** 2).sum(-1)).max())
        return self._diam

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths().sum())

    @property
    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        c = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = c.sum() / 2
        return np.array([((v[:, 0] + w[:, 0]) * c).sum(), ((v[:, 1] + w[:, 1]) * c).sum()]) / (6 * a)

    @property
    def scale(self) -> float:
        """Bounding-box diagonal, the length unit for tolerances."""
        if self.is_empty:
            return 0.0
        lo, hi = self.vertices.min(0), self.vertices.max(0)
        return float(np.hypot(*(hi - lo)))

    @property
    def tol(self) -> float:
        return REL_TOL * self.scale

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(0), self.vertices.max(0)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge start points and edge vectors."""
        return self.vertices, np.roll(self.vertices, -1, axis=0) - self.vertices

    def edge_lengths(self) -> np.ndarray:
        _, e = self.edges()
        return np.hypot(e[:, 0], e[:, 1])

    def outward_normals(self) -> np.ndarray:
        _, e = self.edges()
        n = np.column_stack([e[:, 1], -e[:, 0]])
        return n / np.hypot(n[:, 0], n[:, 1])[:, None]

    def signed_distances(self, q) -> np.ndarray:
        """Max over edges of the outward signed distance; negative inside."""
        q = np.atleast_2d(np.asarray(q, dtype=float))
        n = self.outward_normals()
        off = np.einsum("ij,ij->i", n, self.vertices)
        return (q @ n.T - off).max(axis=1)

    def interior_angles(self) -> np.ndarray:
        v = self.vertices
        a = np.roll(v, 1, axis=0) - v
        b = np.roll(v, -1, axis=0) - v
        cos = np.einsum("ij,ij->i", a, b) / (np.hypot(*a.T) * np.hypot(*b.T))
        return np.arccos(np.clip(cos, -1, 1))

    def translate(self, shift) -> "ConvexPolygon":
        if self.is_empty:
            return self
        return ConvexPolygon(self.vertices + np.asarray(shift, dtype=float))

    def scaled(self, s: float) -> "ConvexPolygon":
        if self.is_empty:
            return self
        return ConvexPolygon(self.vertices * float(s))

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist()}


EMPTY = ConvexPolygon(np.empty((0, 2)))


def polygon_new(points: Iterable[Sequence[float]]) -> ConvexPolygon:
    """Convex hull of ``points`` as a counterclockwise polygon.

    Raises DegenerateInput when the hull has no area.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(pts)}")
    if not np.all(np.isfinite(pts)):
        raise DegenerateInput("non-finite coordinates")
    poly = _normalize(pts)
    if poly.is_empty:
        raise DegenerateInput("points are collinear or coincident")
    return poly


def _normalize(pts: np.ndarray) -> ConvexPolygon:
    if len(pts) < 3:
        return EMPTY
    lo, hi = pts.min(0), pts.max(0)
    diag = float(np.hypot(*(hi - lo)))
    if diag == 0.0:
        return EMPTY
    tol = REL_TOL * diag
    hull = _hull(pts, tol)
    if len(hull) < 3:
        return EMPTY
    poly = ConvexPolygon(hull)
    if poly.area <= tol * diag:
        return EMPTY
    return poly


def rectangle(x0: float, y0: float, x1: float, y1: float) -> ConvexPolygon:
    return polygon_new([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def unit_square() -> ConvexPolygon:
    return rectangle(0.0, 0.0, 1.0, 1.0)


def regular_polygon(m: int, radius: float = 1.0, center=(0.0, 0.0)) -> ConvexPolygon:
    t = 2 * np.pi * np.arange(m) / m
    pts = np.column_stack([np.cos(t), np.sin(t)]) * radius + np.asarray(center, dtype=float)
    return polygon_new(pts)


@dataclass(frozen=True)
class HalfPlane:
    """The closed half-plane {x : normal . x <= offset}."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        nx, ny = map(float, self.normal)
        norm = math.hypot(nx, ny)
        if norm == 0.0:
            raise ValueError("half-plane normal must be nonzero")
        object.__setattr__(self, "normal", (nx / norm, ny / norm))
        object.__setattr__(self, "offset", float(self.offset) / norm)

    @classmethod
    def through(cls, point, normal) -> "HalfPlane":
        """Half-plane bounded by the line through ``point``, ``normal`` pointing out."""
        n = np.asarray(normal, dtype=float)
        return cls(tuple(n), float(n @ np.asarray(point, dtype=float)))

    @classmethod
    def bisector(cls, a, b) -> "HalfPlane":
        """Points at least as close to ``a`` as to ``b``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(tuple(b - a), 0.5 * float(b @ b - a @ a))

    def signed_distance(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return q @ np.asarray(self.normal) - self.offset


def area(P: ConvexPolygon) -> float:
    return P.area


def diameter(P: ConvexPolygon) -> float:
    return P.diameter


def halfplane_clip(P: ConvexPolygon, H: HalfPlane) -> ConvexPolygon:
    """Intersection of ``P`` with ``H`` (may be EMPTY)."""
    if P.is_empty:
        return EMPTY
    tol = P.tol
    s = H.signed_distance(P.vertices)
    if np.all(s <= tol):
        return P
    if np.all(s >= -tol):
        return EMPTY
    v = P.vertices
    out = []
    m = len(v)
    for i in range(m):
        j = (i + 1) % m
        si, sj = s[i], s[j]
        if si <= tol:
            out.append(v[i])
        if (si < -tol and sj > tol) or (si > tol and sj < -tol):
            t = si / (si - sj)
            out.append(v[i] + t * (v[j] - v[i]))
    if len(out) < 3:
        return EMPTY
    return _normalize(np.asarray(out))


def clip_many(P: ConvexPolygon, planes: Iterable[HalfPlane]) -> ConvexPolygon:
    for H in planes:
        P = halfplane_clip(P, H)
        if P.is_empty:
            break
    return P


def intersect(P: ConvexPolygon, Q: ConvexPolygon) -> ConvexPolygon:
    """P intersected with Q, clipping by Q's edge half-planes."""
    if P.is_empty or Q.is_empty:
        return EMPTY
    normals = Q.outward_normals()
    offsets = np.einsum("ij,ij->i", normals, Q.vertices)
    return clip_many(P, (HalfPlane(tuple(n), d) for n, d in zip(normals, offsets)))


def erode(P: ConvexPolygon, r: float) -> ConvexPolygon:
    """Inner parallel body {x in P : dist(x, boundary) >= r}."""
    if r <= 0:
        raise ValueError("erosion radius must be positive")
    if P.is_empty:
        return EMPTY
    normals = P.outward_normals()
    offsets = np.einsum("ij,ij->i", normals, P.vertices) - r
    return clip_many(P, (HalfPlane(tuple(n), d) for n, d in zip(normals, offsets)))


def inradius(P: ConvexPolygon) -> float:
    """Largest r with erode(P, r) nonempty (bisection on erosion)."""
    lo, hi = 0.0, P.diameter
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if erode(P, mid).is_empty:
            hi = mid
        else:
            lo = mid
    return lo


def _segment_disk_area(a: np.ndarray, b: np.ndarray, r: float) -> float:
    """Signed area of triangle (0, a, b) intersected with the disk B(0, r)."""
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return 0.0
    # |a + t d|^2 = r^2
    ad = float(a @ d)
    aa = float(a @ a)
    disc = ad * ad - dd * (aa - r * r)
    cuts = [0.0]
    if disc > 0:
        sq = math.sqrt(disc)
        for t in ((-ad - sq) / dd, (-ad + sq) / dd):
            if 0.0 < t < 1.0:
                cuts.append(t)
    cuts.append(1.0)
    total = 0.0
    for t0, t1 in zip(cuts[:-1], cuts[1:]):
        p = a + t0 * d
        q = a + t1 * d
        mid = a + 0.5 * (t0 + t1) * d
        cr = p[0] * q[1] - p[1] * q[0]
        if mid @ mid <= r * r:
            total += 0.5 * cr
        else:
            total += 0.5 * r * r * math.atan2(cr, float(p @ q))
    return total


def disk_intersection_area(P: ConvexPolygon, c, r: float) -> float:
    """Exact area of P intersected with the closed disk B(c, r)."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if P.is_empty:
        return 0.0
    c = np.asarray(c, dtype=float)
    v = P.vertices - c
    w = np.roll(v, -1, axis=0)
    total = sum(_segment_disk_area(v[i], w[i], r) for i in range(len(v)))
    return max(0.0, min(total, math.pi * r * r))


def _start_lowest(v: np.ndarray) -> np.ndarray:
    i = np.lexsort((v[:, 0], v[:, 1]))[0]
    return np.roll(v, -i, axis=0)


def minkowski_combination(A: ConvexPolygon, B: ConvexPolygon, t: float) -> ConvexPolygon:
    """(1 - t) A + t B by merging the scaled edge sequences."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    if A.is_empty or B.is_empty:
        return EMPTY
    if t == 0.0:
        return A
    if t == 1.0:
        return B
    a = _start_lowest(A.vertices * (1.0 - t))
    b = _start_lowest(B.vertices * t)
    ea = np.roll(a, -1, axis=0) - a
    eb = np.roll(b, -1, axis=0) - b
    i = j = 0
    p = a[0] + b[0]
    pts = [p]
    while i < len(ea) or j < len(eb):
        if j == len(eb):
            step = ea[i]
            i += 1
        elif i == len(ea):
            step = eb[j]
            j += 1
        else:
            cr = ea[i][0] * eb[j][1] - ea[i][1] * eb[j][0]
            if cr > 0:
                step = ea[i]
                i += 1
            elif cr < 0:
                step = eb[j]
                j += 1
            else:
                step = ea[i] + eb[j]
                i += 1
                j += 1
        p = p + step
        pts.append(p)
    return _normalize(np.asarray(pts[:-1]))


def lp_ball_polygon(p: float, r: float, m: int) -> ConvexPolygon:
    """Polygon inscribed in {||x||_p = r} with vertices at equally spaced angles."""
    if not 1.0 <= p <= 2.0:
        raise InvalidExponent(f"p must lie in [1, 2], got {p}")
    if m < 4 or m % 2:
        raise ValueError("vertex count must be even and at least 4")
    t = 2 * np.pi * np.arange(m) / m
    u = np.column_stack([np.cos(t), np.sin(t)])
    # exact zeros keep the axis vertices exactly on the axes
    u[np.abs(u) < 1e-15] = 0.0
    norm = (np.abs(u) ** p).sum(1) ** (1.0 / p)
    return polygon_new(r * u / norm[:, None])


def contains(P: ConvexPolygon, q, tol: float | None = None) -> bool:
    if P.is_empty:
        return False
    if tol is None:
        tol = P.tol
    return bool(P.signed_distances(q)[0] <= tol)


def contains_points(P: ConvexPolygon, q, tol: float | None = None) -> np.ndarray:
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if P.is_empty:
        return np.zeros(len(q), dtype=bool)
    if tol is None:
        tol = P.tol
    return P.signed_distances(q) <= tol


def contains_polygon(P: ConvexPolygon, Q: ConvexPolygon, tol: float | None = None) -> bool:
    """True when every vertex of Q lies in P.  The empty polygon is contained everywhere."""
    if Q.is_empty:
        return True
    if P.is_empty:
        return False
    if tol is None:
        tol = REL_TOL * max(P.scale, Q.scale)
    return bool(np.all(contains_points(P, Q.vertices, tol)))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [0, L_1] x ... x [0, L_n]."""

    lengths: tuple[float, ...]

    def __post_init__(self):
        L = tuple(float(x) for x in np.atleast_1d(self.lengths))
        if len(L) < 1:
            raise ValueError("box needs dimension >= 1")
        if any(not (x > 0) for x in L):
            raise ValueError("box side lengths must be positive")
        object.__setattr__(self, "lengths", L)

    @property
    def dim(self) -> int:
        return len(self.lengths)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def diameter(self) -> float:
        return float(np.sqrt(np.sum(np.square(self.lengths))))

    def contains(self, q, tol: float = 0.0) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(np.all(q >= -tol) and np.all(q <= np.asarray(self.lengths) + tol))

    def as_polygon(self) -> ConvexPolygon:
        if self.dim != 2:
            raise ValueError("only 2D boxes convert to polygons")
        return rectangle(0.0, 0.0, *self.lengths)

    def to_dict(self) -> dict:
        return {"box": list(self.lengths)}
