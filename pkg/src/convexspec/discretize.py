"""Triangulation of convex polygons and P1 finite-element assembly.

Boundary conditions are given by arc length along the polygon boundary,
measured counterclockwise from vertex 0, so a tag survives refinement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.spatial import Delaunay

from .geom import ConvexPolygon

MAX_VERTICES = 2_000_000
# interior lattice spacing relative to the target edge length
LATTICE_RATIO = 3 ** -0.25


class MeshTooLarge(RuntimeError):
    pass


class DegenerateTriangle(ValueError):
    pass


class AllConstrained(ValueError):
    pass


class Tag(enum.IntEnum):
    NEUMANN = 0
    DIRICHLET = 1


@dataclass(frozen=True)
class BoundarySpec:
    """Arc-length intervals [a, b) of the boundary carrying Neumann data.

    The rest of the boundary is Dirichlet.  ``all_neumann`` overrides the
    intervals.
    """

    neumann: tuple[tuple[float, float], ...] = ()
    all_neumann: bool = False

    def __post_init__(self):
        iv = tuple(sorted((float(a), float(b)) for a, b in self.neumann))
        for (a0, b0), (a1, _) in zip(iv[:-1], iv[1:]):
            if a1 < b0:
                raise ValueError("Neumann intervals overlap")
        for a, b in iv:
            if not (0.0 <= a < b):
                raise ValueError(f"bad interval [{a}, {b})")
        object.__setattr__(self, "neumann", iv)

    @classmethod
    def from_edges(cls, P: ConvexPolygon, edges) -> "BoundarySpec":
        """Neumann on whole polygon edges, edge i running from vertex i to i+1."""
        cum = np.concatenate([[0.0], np.cumsum(P.edge_lengths())])
        return cls(tuple((cum[i], cum[i + 1]) for i in sorted(edges)))

    def tag_at(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.all_neumann:
            return np.full(s.shape, Tag.NEUMANN, dtype=np.int8)
        neu = np.zeros(s.shape, dtype=bool)
        for a, b in self.neumann:
            neu |= (s >= a) & (s < b)
        return np.where(neu, Tag.NEUMANN, Tag.DIRICHLET).astype(np.int8)

    @property
    def key(self) -> str:
        if self.all_neumann:
            return "neumann"
        if not self.neumann:
            return "dirichlet"
        return "mixed:" + ",".join(f"{a!r}-{b!r}" for a, b in self.neumann)

    def to_dict(self) -> dict:
        return {"all_neumann": self.all_neumann, "neumann": [list(i) for i in self.neumann]}


ALL_NEUMANN = BoundarySpec(all_neumann=True)
ALL_DIRICHLET = BoundarySpec()


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    # arc-length interval [s0, s1] of each boundary edge
    boundary_arcs: np.ndarray
    boundary_tags: np.ndarray
    domain: ConvexPolygon | None = field(default=None, repr=False)
    h: float = 0.0

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def angles(self) -> np.ndarray:
        """All interior angles (radians), shape (T, 3)."""
        p = self.vertices[self.triangles]
        out = np.empty((len(p), 3))
        for k in range(3):
            a = p[:, (k + 1) % 3] - p[:, k]
            b = p[:, (k + 2) % 3] - p[:, k]
            cos = (a * b).sum(1) / np.sqrt((a * a).sum(1) * (b * b).sum(1))
            out[:, k] = np.arccos(np.clip(cos, -1, 1))
        return out

    def edge_lengths(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return np.sqrt(((p - np.roll(p, -1, axis=1)) ** 2).sum(-1))

    def dirichlet_vertices(self) -> np.ndarray:
        e = self.boundary_edges[self.boundary_tags == Tag.DIRICHLET]
        return np.unique(e.ravel())

    def to_dict(self) -> dict:
        names = {Tag.NEUMANN: "NEUMANN", Tag.DIRICHLET: "DIRICHLET"}
        return {
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "boundary": [{"edge": [int(i), int(j)], "tag": names[Tag(t)]}
                         for (i, j), t in zip(self.boundary_edges, self.boundary_tags)],
        }


def _boundary_points(P: ConvexPolygon, spacing: float):
    starts, vecs = P.edges()
    lengths = P.edge_lengths()
    pts, arcs = [], []
    s0 = 0.0
    for a, e, L in zip(starts, vecs, lengths):
        k = max(1, int(math.ceil(L / spacing - 1e-9)))
        t = np.arange(k) / k
        pts.append(a + np.outer(t, e))
        arcs.append(s0 + t * L)
        s0 += L
    return np.vstack(pts), np.concatenate(arcs), s0


def _lattice(P: ConvexPolygon, a: float, margin: float) -> np.ndarray:
    lo, hi = P.bbox()
    c = P.centroid
    dy = a * math.sqrt(3) / 2
    j = np.arange(math.floor((lo[1] - c[1]) / dy) - 1, math.ceil((hi[1] - c[1]) / dy) + 2)
    i = np.arange(math.floor((lo[0] - c[0]) / a) - 2, math.ceil((hi[0] - c[0]) / a) + 2)
    I, J = np.meshgrid(i, j)
    x = c[0] + (I + 0.5 * (J % 2)) * a
    y = c[1] + J * dy
    q = np.column_stack([x.ravel(), y.ravel()])
    return q[P.signed_distances(q) <= -margin]


def _delaunay(pts: np.ndarray, min_area: float) -> np.ndarray:
    tri = Delaunay(pts).simplices.astype(np.int64)
    p = pts[tri]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    ar = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    tri[ar < 0] = tri[ar < 0][:, [0, 2, 1]]
    return tri[np.abs(ar) > min_area]


def _neighbours(n: int, tri: np.ndarray) -> sp.csr_matrix:
    e = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    A = sp.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()
    A = ((A + A.T) > 0).astype(float)
    return A


def triangulate(P: ConvexPolygon, h: float, max_vertices: int = MAX_VERTICES) -> Mesh:
    """Quality triangulation of ``P`` with edges of length about ``h``.

    Boundary nodes subdivide every polygon edge; interior nodes come from an
    equilateral lattice kept half a spacing away from the boundary.  The
    Delaunay triangulation of the nodes gets one Laplacian smoothing pass of
    the interior nodes and is then re-triangulated; interior edges still
    longer than ``h`` are split at their midpoints.
    """
    if P.is_empty:
        raise ValueError("cannot mesh an empty polygon")
    if not 0 < h <= P.diameter:
        raise ValueError(f"h must lie in (0, diameter]; got {h}")
    a = h * LATTICE_RATIO
    estimate = P.area / (math.sqrt(3) / 2 * a * a) + P.perimeter / a
    if estimate > max_vertices:
        raise MeshTooLarge(f"about {int(estimate)} vertices exceeds cap {max_vertices}")
    bpts, arcs, perim = _boundary_points(P, a)
    inner = _lattice(P, a, 0.3 * a)
    pts = np.vstack([bpts, inner])
    nb = len(bpts)
    min_area = 1e-10 * a * a
    tri = _delaunay(pts, min_area)

    if len(inner):
        A = _neighbours(len(pts), tri)
        deg = np.asarray(A.sum(1)).ravel()
        avg = (A @ pts) / deg[:, None]
        moved = pts.copy()
        moved[nb:] = avg[nb:]
        # smoothing stays inside a convex domain; keep a margin from the boundary anyway
        ok = P.signed_distances(moved[nb:]) <= -0.25 * a
        moved[nb:][~ok] = pts[nb:][~ok]
        pts = moved
        tri = _delaunay(pts, min_area)

    for _ in range(3):
        e = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
        e = np.unique(np.sort(e, axis=1), axis=0)
        long = np.sqrt(((pts[e[:, 0]] - pts[e[:, 1]]) ** 2).sum(1)) > h
        if not long.any():
            break
        pts = np.vstack([pts, 0.5 * (pts[e[long, 0]] + pts[e[long, 1]])])
        tri = _delaunay(pts, min_area)

    # boundary edges are the boundary-node pairs consecutive along the boundary
    i = np.arange(nb)
    bedges = np.column_stack([i, (i + 1) % nb])
    barcs = np.column_stack([arcs, np.append(arcs[1:], perim)])
    mesh = Mesh(pts, tri, bedges, barcs, np.full(nb, Tag.NEUMANN, dtype=np.int8), P, float(h))
    _check_mesh(mesh)
    return mesh


def _check_mesh(mesh: Mesh) -> None:
    areas = mesh.triangle_areas()
    if np.any(areas <= 0):
        raise DegenerateTriangle("inverted or flat triangle")
    total = areas.sum()
    if mesh.domain is not None and abs(total - mesh.domain.area) > 1e-9 * mesh.domain.area:
        raise RuntimeError(f"mesh area {total} != domain area {mesh.domain.area}")


def tag_boundary(M: Mesh, spec: BoundarySpec) -> Mesh:
    """Tag each boundary edge by the arc-length parameter of its midpoint."""
    mid = M.boundary_arcs.mean(axis=1)
    return replace(M, boundary_tags=spec.tag_at(mid))


def assemble(M: Mesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """P1 stiffness and consistent mass matrices."""
    tri = M.triangles
    p = M.vertices[tri]
    areas = M.triangle_areas()
    ref = M.domain.area if M.domain is not None else areas.sum()
    if np.any(areas < 1e-14 * ref):
        raise DegenerateTriangle("triangle area below 1e-14 of the domain area")
    # gradient of hat k is the rotated opposite edge over twice the area
    opp = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    Ke = np.einsum("tid,tjd->tij", opp, opp) / (4 * areas)[:, None, None]
    Me = (areas / 12)[:, None, None] * (np.ones((3, 3)) + np.eye(3))
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    n = M.n_vertices
    K = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    Mass = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K = 0.5 * (K + K.T)
    Mass = 0.5 * (Mass + Mass.T)
    return K.tocsr(), Mass.tocsr()


def reduce_system(K, Mass, M: Mesh):
    """Drop Dirichlet degrees of freedom; returns (K', Mass', dof_map)."""
    fixed = np.zeros(M.n_vertices, dtype=bool)
    fixed[M.dirichlet_vertices()] = True
    dof = np.flatnonzero(~fixed)
    if len(dof) == 0:
        raise AllConstrained("every vertex is constrained")
    if len(dof) == M.n_vertices:
        return K, Mass, dof
    K = K[dof][:, dof].tocsr()
    Mass = Mass[dof][:, dof].tocsr()
    return K, Mass, dof
