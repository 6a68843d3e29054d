"""Numerical checkers for the eigenvalue inequalities.

Every checker returns a :class:`CheckReport` carrying its inputs, the two
sides that were compared, the margin and a pass flag.  Proved inequalities
are hard pass/fail checks.  Statements whose constants are not specified
(the domain-monotonicity constant, the net-size lemma, the Weyl-type upper
bounds) only record empirical constants and pass as long as those are
finite.

FEM quantities carry the uncertainty estimate
``u = |lam(h) - lam(h/2)| / lam(h/2)``; inequality checks against FEM values
are widened by ``3 u``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from . import analytic
from .discretize import (
    ALL_DIRICHLET,
    ALL_NEUMANN,
    BoundarySpec,
    assemble,
    reduce_system,
    tag_boundary,
    triangulate,
)
from .eigsolve import Spectrum, smallest_eigs
from .geom import (
    Box,
    ConvexPolygon,
    contains,
    contains_polygon,
    disk_intersection_area,
    erode,
    intersect,
    lp_ball_polygon,
    minkowski_combination,
    polygon_new,
    rectangle,
    regular_polygon,
)
from .nets import (
    Partition,
    PointSet,
    maximal_separated_net,
    voronoi_partition,
)

MC_SEED = 0xC0FFEE
UNCERTAINTY_FACTOR = 3.0
# floor on the FEM uncertainty, roughly the eigensolver tolerance
MIN_UNCERTAINTY = 1e-9


class NotNested(ValueError):
    pass


class NetTooLarge(RuntimeError):
    def __init__(self, size, k, smallest_c):
        super().__init__(f"net has {size} points, more than k = {k}; "
                         f"smallest sufficient c is about {smallest_c:.4g}")
        self.size = size
        self.k = k
        self.smallest_c = smallest_c


class PointOutside(ValueError):
    pass


def _jsonable(obj):
    if isinstance(obj, ConvexPolygon):
        return obj.to_dict()
    if isinstance(obj, (Box, BoundarySpec, PointSet)):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class CheckReport:
    check: str
    inputs: dict
    lhs: object
    rhs: object
    margin: float
    passed: bool
    tolerance: float = 0.0
    index_base: int | None = None
    provenance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        # field by field, so domain objects keep their own to_dict form
        return {f.name: _jsonable(getattr(self, f.name)) for f in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.check}: margin={self.margin:.6g} (tol {self.tolerance:.3g})"


def _report(check, inputs, lhs, rhs, margin, tolerance, **kw) -> CheckReport:
    margin = float(margin)
    return CheckReport(check, inputs, lhs, rhs, margin, bool(margin >= -tolerance),
                       float(tolerance), **kw)


# -- FEM with a Richardson uncertainty ---------------------------------------

def _as_spec(bc) -> BoundarySpec:
    if isinstance(bc, BoundarySpec):
        return bc
    bc = str(bc).lower()
    if bc == "neumann":
        return ALL_NEUMANN
    if bc == "dirichlet":
        return ALL_DIRICHLET
    raise ValueError(f"unknown boundary condition {bc!r}")


def fem_spectrum(P: ConvexPolygon, bc, h: float, count: int, tol: float = 1e-9) -> Spectrum:
    """Smallest ``count`` P1 eigenvalues of P under boundary condition ``bc``."""
    spec = _as_spec(bc)
    mesh = tag_boundary(triangulate(P, h), spec)
    K, Mass = assemble(mesh)
    K, Mass, _ = reduce_system(K, Mass, mesh)
    mode = "NEUMANN" if spec.all_neumann else ("DIRICHLET" if not spec.neumann else "MIXED")
    spectrum = smallest_eigs(K, Mass, min(count, K.shape[0]), tol, bc_mode=mode,
                             domain=P.to_dict(), h=h)
    spectrum.domain["n_vertices"] = mesh.n_vertices
    return spectrum


@dataclass
class FemEstimate:
    """FEM eigenvalues at mesh size h with per-index uncertainties from h/2."""

    coarse: Spectrum
    fine: Spectrum

    @property
    def index_base(self) -> int:
        return self.coarse.index_base

    @property
    def values(self) -> np.ndarray:
        return self.coarse.eigenvalues

    @property
    def uncertainty(self) -> np.ndarray:
        a = self.coarse.eigenvalues
        b = self.fine.eigenvalues[:len(a)]
        scale = np.where(np.abs(b) > 1e-8 * max(1.0, float(np.abs(b).max())), np.abs(b), np.inf)
        return np.maximum(np.abs(a - b) / scale, MIN_UNCERTAINTY)

    def eig(self, k: int) -> float:
        return self.coarse.eig(k)

    def u(self, k: int) -> float:
        return float(self.uncertainty[k - self.index_base])

    def provenance(self) -> dict:
        return {"h": self.coarse.h, "h_fine": self.fine.h,
                "n_vertices": self.coarse.domain.get("n_vertices"),
                "n_vertices_fine": self.fine.domain.get("n_vertices")}


_FEM_CACHE: dict = {}
FEM_CACHE_LIMIT = 512


def fem_estimate(P: ConvexPolygon, bc, h: float, count: int) -> FemEstimate:
    spec = _as_spec(bc)
    key = (P.vertices.tobytes(), spec.key, float(h))
    hit = _FEM_CACHE.get(key)
    if hit is not None and len(hit.coarse) >= count:
        return FemEstimate(_truncate(hit.coarse, count), _truncate(hit.fine, count))
    est = FemEstimate(fem_spectrum(P, spec, h, count), fem_spectrum(P, spec, h / 2, count))
    if len(_FEM_CACHE) >= FEM_CACHE_LIMIT:
        _FEM_CACHE.pop(next(iter(_FEM_CACHE)))
    _FEM_CACHE[key] = est
    return est


def _truncate(s: Spectrum, count: int) -> Spectrum:
    if len(s) == count:
        return s
    return Spectrum(s.eigenvalues[:count], s.bc_mode, s.index_base,
                    None if s.residuals is None else s.residuals[:count], s.domain, s.h)


def clear_fem_cache() -> None:
    _FEM_CACHE.clear()


# -- certificates ------------------------------------------------------------

@dataclass
class BoundCertificate:
    """Lower bound on lambda^N_{m}(domain) from a covering by m convex cells.

    Each convex cell has Cheeger constant at least 1/diam, so the covering
    bound reads lambda_m >= min_i(1/diam_i)^2 / (4 M^2).
    """

    domain: dict
    cells: list
    diameters: np.ndarray
    multiplicity: int
    cheeger_lower: float
    certified_lambda_lower: float
    target_index: int

    @classmethod
    def from_cells(cls, P: ConvexPolygon, cells: Sequence[ConvexPolygon],
                   multiplicity: int) -> "BoundCertificate":
        cells = [c for c in cells if not c.is_empty]
        if not cells:
            raise ValueError("certificate needs at least one nonempty cell")
        if multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        diam = np.array([c.diameter for c in cells])
        h = float((1.0 / diam).min())
        return cls(P.to_dict(), list(cells), diam, int(multiplicity), h,
                   h * h / (4 * multiplicity ** 2), len(cells))

    def recompute(self) -> float:
        diam = np.array([c.diameter for c in self.cells])
        h = float((1.0 / diam).min())
        return h * h / (4 * self.multiplicity ** 2)

    def to_dict(self) -> dict:
        return _jsonable({
            "domain": self.domain, "cells": [c.to_dict() for c in self.cells],
            "diameters": self.diameters, "multiplicity": self.multiplicity,
            "cheeger_lower": self.cheeger_lower,
            "certified_lambda_lower": self.certified_lambda_lower,
            "target_index": self.target_index,
        })


def certified_neumann_lower_bound(P: ConvexPolygon, partition: Partition | Sequence[ConvexPolygon],
                                  h: float, multiplicity: int | None = None):
    """Certificate from a partition, checked against the FEM Neumann eigenvalue.

    Returns (BoundCertificate, CheckReport).  The check asserts
    certified <= lambda^N_{m}(P) (1 + 3u), m the number of cells.
    """
    if isinstance(partition, Partition):
        cells, M = partition.cells, partition.multiplicity
    else:
        cells, M = list(partition), 1
    if multiplicity is not None:
        M = multiplicity
    cells = [c for c in cells if not c.is_empty]
    covered = sum(c.area for c in cells)
    if M == 1 and covered < P.area * (1 - 1e-9):
        raise ValueError(f"cells cover {covered} of area {P.area}")
    cert = BoundCertificate.from_cells(P, cells, M)
    m = cert.target_index
    est = fem_estimate(P, ALL_NEUMANN, h, m + 1)
    lam, u = est.eig(m), est.u(m)
    tol = UNCERTAINTY_FACTOR * u
    report = _report("certified_neumann_lower_bound", {"P": P, "cells": cells, "multiplicity": M, "h": h},
                     cert.certified_lambda_lower, lam, (lam - cert.certified_lambda_lower) / lam,
                     tol, index_base=0, provenance=est.provenance(),
                     details={"target_index": m, "uncertainty": u,
                              "max_diameter": float(cert.diameters.max())})
    return cert, report


# -- Dirichlet and Neumann comparisons ---------------------------------------

def _require_nested(inner: ConvexPolygon, outer: ConvexPolygon) -> None:
    if not contains_polygon(outer, inner, 1e-9 * outer.scale):
        raise NotNested("inner domain is not contained in the outer domain")


def dirichlet_monotonicity_check(omega: ConvexPolygon, omega_outer: ConvexPolygon,
                                 kmax: int, h: float) -> CheckReport:
    """lambda^D_k(outer) <= lambda^D_k(inner) for k <= kmax, up to 3u."""
    _require_nested(omega, omega_outer)
    a = fem_estimate(omega_outer, ALL_DIRICHLET, h, kmax)
    b = fem_estimate(omega, ALL_DIRICHLET, h, kmax)
    ks = np.arange(1, kmax + 1)
    outer = np.array([a.eig(k) for k in ks])
    inner = np.array([b.eig(k) for k in ks])
    u = np.maximum([a.u(k) for k in ks], [b.u(k) for k in ks])
    slack = (inner - outer) / inner + UNCERTAINTY_FACTOR * u
    worst = int(np.argmin(slack))
    margin = (inner[worst] - outer[worst]) / inner[worst]
    return CheckReport(
        "dirichlet_monotonicity", {"omega": omega, "omega_outer": omega_outer, "kmax": kmax, "h": h},
        outer.tolist(), inner.tolist(), float(margin), bool(np.all(slack >= 0)),
        float(UNCERTAINTY_FACTOR * u[worst]), 1,
        {"outer": a.provenance(), "inner": b.provenance()},
        {"violations": int(np.sum(slack < 0)), "ratios": (inner / outer).tolist(),
         "uncertainty": u.tolist()})


def dm_ratio(omega: ConvexPolygon, omega_outer: ConvexPolygon, kmax: int, h: float) -> CheckReport:
    """Table of lambda^N_k(outer) / lambda^N_k(inner), k = 1..kmax (record only)."""
    _require_nested(omega, omega_outer)
    a = fem_estimate(omega_outer, ALL_NEUMANN, h, kmax + 1)
    b = fem_estimate(omega, ALL_NEUMANN, h, kmax + 1)
    ks = range(1, kmax + 1)
    outer = np.array([a.eig(k) for k in ks])
    inner = np.array([b.eig(k) for k in ks])
    ratios = outer / inner
    finite = bool(np.all(np.isfinite(ratios)) and np.all(inner > 0))
    return CheckReport(
        "dm_ratio", {"omega": omega, "omega_outer": omega_outer, "kmax": kmax, "h": h},
        outer.tolist(), inner.tolist(), float(np.max(ratios)), finite, 0.0, 0,
        {"outer": a.provenance(), "inner": b.provenance()},
        {"ratios": ratios.tolist(), "max_ratio": float(np.max(ratios)),
         "uncertainty_outer": [a.u(k) for k in ks], "uncertainty_inner": [b.u(k) for k in ks]})


def _net_for_c(omega_outer: ConvexPolygon, lam_k: float, c: float, n: int = 2):
    R = c * n / math.sqrt(lam_k)
    # the net always covers; cap the radius at the diameter to bound the work
    r = min(R, omega_outer.diameter * 1.01)
    return R, maximal_separated_net(omega_outer, r, r / 16)


def smallest_sufficient_c(omega_outer: ConvexPolygon, k: int, h: float,
                          rel: float = 1e-3) -> float:
    """Smallest c (to ``rel``) whose net has at most k points, by bisection."""
    lam_k = fem_estimate(omega_outer, ALL_NEUMANN, h, k + 1).eig(k)
    lo, hi = 0.0, 1.0
    while len(_net_for_c(omega_outer, lam_k, hi)[1]) > k:
        lo, hi = hi, 2 * hi
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if len(_net_for_c(omega_outer, lam_k, mid)[1]) <= k:
            hi = mid
        else:
            lo = mid
    return hi


def replay_dm_proof(omega: ConvexPolygon, omega_outer: ConvexPolygon, k: int, c: float,
                    h: float, n: int = 2):
    """Replay the net / Voronoi / covering argument for lambda^N_k.

    With R = c n / sqrt(lambda_k(outer)) a maximal R-net of the outer domain
    is built and its Voronoi cells are clipped to the inner domain.  The
    certificate lambda^N_m(inner) >= min(1/diam)^2 / 4 then holds for the
    m <= k nonempty cells, and diam <= 4R gives the chain bound
    1 / (4 (4R)^2) = lambda_k(outer) / (8 c n)^2.

    Returns (BoundCertificate, CheckReport); raises NetTooLarge when the net
    has more than k points.
    """
    _require_nested(omega, omega_outer)
    if c <= 0 or k < 1:
        raise ValueError("need c > 0 and k >= 1")
    a = fem_estimate(omega_outer, ALL_NEUMANN, h, k + 1)
    lam_outer = a.eig(k)
    R, net = _net_for_c(omega_outer, lam_outer, c, n)
    if len(net) > k:
        raise NetTooLarge(len(net), k, smallest_sufficient_c(omega_outer, k, h))
    cells_outer = voronoi_partition(omega_outer, net).cells
    cells = [intersect(cell, omega) for cell in cells_outer]
    cells = [cell for cell in cells if not cell.is_empty]
    cert = BoundCertificate.from_cells(omega, cells, 1)
    chain = 1.0 / (4 * (4 * R) ** 2)
    identity = lam_outer / (8 * c * n) ** 2
    identity_ok = abs(chain - identity) <= 1e-12 * identity
    max_diam = float(cert.diameters.max())
    b = fem_estimate(omega, ALL_NEUMANN, h, k + 1)
    m = cert.target_index
    lam_m, lam_k = b.eig(m), b.eig(k)
    tol = UNCERTAINTY_FACTOR * max(b.u(m), b.u(k))
    margin = min((lam_m - cert.certified_lambda_lower) / lam_m, (lam_k - chain) / lam_k)
    ok = (len(net) <= k and max_diam <= 4 * R * (1 + 1e-12)
          and cert.certified_lambda_lower >= chain * (1 - 1e-12) and identity_ok
          and margin >= -tol)
    report = CheckReport(
        "replay_dm_proof", {"omega": omega, "omega_outer": omega_outer, "k": k, "c": c, "h": h, "n": n},
        cert.certified_lambda_lower, lam_m, float(margin), bool(ok), float(tol), 0,
        {"outer": a.provenance(), "inner": b.provenance()},
        {"R": R, "net_size": len(net), "l": len(net) - 1, "l_le_k_minus_1": len(net) - 1 <= k - 1,
         "max_cell_diameter": max_diam, "four_R": 4 * R, "chain_bound": chain,
         "chain_identity_rhs": identity, "identity_holds": identity_ok,
         "lambda_k_outer": lam_outer, "lambda_k_inner": lam_k, "target_index": m})
    return cert, report


# -- the net-size lemma ------------------------------------------------------

def keylemma_constant(domain: ConvexPolygon | Box, r: float, probe_step: float | None = None,
                      h: float = 0.02, net: PointSet | np.ndarray | None = None) -> CheckReport:
    """c_emp = r sqrt(lambda^N_l) / n for a maximal r-net of l + 1 points."""
    if net is None:
        net = maximal_separated_net(domain, r, probe_step)
    pts = net.points if isinstance(net, PointSet) else np.asarray(net, dtype=float)
    l = len(pts) - 1
    if isinstance(domain, Box):
        n = domain.dim
        lam = analytic.box_spectrum(domain, "NEUMANN", l + 1).eig(l)
        prov = {"source": "box enumerator", "count": l + 1}
        u = 0.0
    else:
        n = 2
        est = fem_estimate(domain, ALL_NEUMANN, h, l + 1)
        lam, u = est.eig(l), (est.u(l) if l > 0 else 0.0)
        prov = {"source": "fem", **est.provenance()}
    c_emp = r * math.sqrt(max(lam, 0.0)) / n if l > 0 else 0.0
    # explicit ceiling implied by the proof: r sqrt(lam) <= (32/3)(1 + n ln 5)
    ceiling = (32 / 3) * (1 + n * math.log(5)) / n
    return CheckReport(
        "keylemma_constant", {"domain": domain, "r": r, "probe_step": probe_step, "h": h},
        c_emp, ceiling, ceiling - c_emp, bool(math.isfinite(c_emp)), 0.0, 0, prov,
        {"c_emp": c_emp, "l": l, "lambda_l": lam, "n": n, "uncertainty": u,
         "proof_ceiling": ceiling})


# -- concentration inequalities ----------------------------------------------

def _rectangle_bounds(P: ConvexPolygon):
    v = P.vertices
    if len(v) != 4:
        return None
    lo, hi = v.min(0), v.max(0)
    on_box = np.all(np.isclose(v[:, 0], lo[0]) | np.isclose(v[:, 0], hi[0])) and \
        np.all(np.isclose(v[:, 1], lo[1]) | np.isclose(v[:, 1], hi[1]))
    return (lo, hi) if on_box else None


def _dirichlet_lambda1(P: ConvexPolygon, h: float):
    rect = _rectangle_bounds(P)
    if rect is not None:
        w, hgt = rect[1] - rect[0]
        return math.pi ** 2 * (1 / w ** 2 + 1 / hgt ** 2), 0.0, {"source": "closed form"}
    est = fem_estimate(P, ALL_DIRICHLET, h, 1)
    return est.eig(1), est.u(1), {"source": "fem", **est.provenance()}


def boundary_concentration_check(P: ConvexPolygon, r: float, h: float = 0.02,
                                 lambda1: float | None = None) -> CheckReport:
    """area(erode(P, r)) / area(P) <= exp(1 - sqrt(lambda^D_1) r)."""
    if r <= 0:
        raise ValueError("r must be positive")
    lhs = erode(P, r).area / P.area
    if lambda1 is None:
        lam, u, prov = _dirichlet_lambda1(P, h)
    else:
        lam, u, prov = float(lambda1), 0.0, {"source": "supplied"}
    rhs = math.exp(1 - math.sqrt(lam) * r)
    # FEM lambda_1 is an upper bound, so it only tightens the right side
    tol = UNCERTAINTY_FACTOR * u * math.sqrt(lam) * r + 1e-12
    return _report("boundary_concentration", {"P": P, "r": r, "h": h, "lambda1": lambda1},
                   lhs, rhs, (rhs - lhs) / rhs, tol, index_base=1, provenance=prov,
                   details={"lambda1_dirichlet": lam, "uncertainty": u})


def _dirichlet_segments(P: ConvexPolygon, spec: BoundarySpec) -> list:
    """Boundary pieces outside the Neumann intervals, as (start, end) point pairs."""
    starts, vecs = P.edges()
    lengths = P.edge_lengths()
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    cuts = sorted({0.0, float(cum[-1])} | set(cum.tolist())
                  | {min(x, cum[-1]) for iv in spec.neumann for x in iv})
    segs = []
    for s0, s1 in zip(cuts[:-1], cuts[1:]):
        if s1 - s0 <= 0:
            continue
        if spec.tag_at(0.5 * (s0 + s1)) == 0:
            continue
        i = min(int(np.searchsorted(cum, 0.5 * (s0 + s1), side="right")) - 1, len(lengths) - 1)
        t0 = (s0 - cum[i]) / lengths[i]
        t1 = (s1 - cum[i]) / lengths[i]
        segs.append((starts[i] + t0 * vecs[i], starts[i] + t1 * vecs[i]))
    return segs


def sample_uniform(P: ConvexPolygon, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from P by area-weighted fan triangles."""
    v = P.vertices
    a = v[1:-1] - v[0]
    b = v[2:] - v[0]
    w = 0.5 * np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    tri = rng.choice(len(w), size=count, p=w / w.sum())
    s, t = rng.random(count), rng.random(count)
    flip = s + t > 1
    s[flip], t[flip] = 1 - s[flip], 1 - t[flip]
    return v[0] + s[:, None] * a[tri] + t[:, None] * b[tri]


def _segment_distance(q: np.ndarray, p0: np.ndarray, p1: np.ndarray) -> np.ndarray:
    d = p1 - p0
    t = np.clip(((q - p0) @ d) / (d @ d), 0, 1)
    return np.hypot(*(q - p0 - t[:, None] * d).T)


def _mixed_fraction_rectangle(P: ConvexPolygon, segs, r: float):
    rect = _rectangle_bounds(P)
    if rect is None:
        return None
    (x0, y0), (x1, y1) = rect
    # each Dirichlet piece must be a whole side
    sides = {"left": False, "right": False, "bottom": False, "top": False}
    for a, b in segs:
        if np.isclose(a[0], x0) and np.isclose(b[0], x0):
            key = "left"
        elif np.isclose(a[0], x1) and np.isclose(b[0], x1):
            key = "right"
        elif np.isclose(a[1], y0) and np.isclose(b[1], y0):
            key = "bottom"
        elif np.isclose(a[1], y1) and np.isclose(b[1], y1):
            key = "top"
        else:
            return None
        if not np.isclose(np.hypot(*(b - a)), x1 - x0 if key in ("bottom", "top") else y1 - y0):
            return None
        sides[key] = True
    w = max(0.0, (x1 - x0) - r * (sides["left"] + sides["right"]))
    hgt = max(0.0, (y1 - y0) - r * (sides["bottom"] + sides["top"]))
    return w * hgt / ((x1 - x0) * (y1 - y0))


def mixed_concentration_check(P: ConvexPolygon, spec: BoundarySpec, r: float, h: float = 0.02,
                              mc_samples: int = 1_000_000, seed: int = MC_SEED) -> CheckReport:
    """mu{x : dist(x, Dirichlet part) > r} <= exp(1 - sqrt(lambda^U_1) r)."""
    if spec.all_neumann:
        raise ValueError("the Dirichlet part must be nonempty")
    segs = _dirichlet_segments(P, spec)
    se = 0.0
    if not spec.neumann:
        lhs, method = erode(P, r).area / P.area, "erosion"
    else:
        lhs = _mixed_fraction_rectangle(P, segs, r)
        method = "rectangle closed form"
        if lhs is None:
            rng = np.random.default_rng(seed)
            q = sample_uniform(P, mc_samples, rng)
            dist = np.full(len(q), np.inf)
            for p0, p1 in segs:
                dist = np.minimum(dist, _segment_distance(q, p0, p1))
            lhs = float(np.mean(dist > r))
            se = math.sqrt(max(lhs * (1 - lhs), 1.0 / mc_samples) / mc_samples)
            method = "monte carlo"
    est = fem_estimate(P, spec, h, 1)
    lam, u = est.eig(1), est.u(1)
    rhs = math.exp(1 - math.sqrt(lam) * r)
    tol_rel = UNCERTAINTY_FACTOR * u * math.sqrt(lam) * r + 1e-12
    margin = rhs - lhs
    return CheckReport(
        "mixed_concentration", {"P": P, "spec": spec, "r": r, "h": h,
                                "mc_samples": mc_samples, "seed": seed},
        lhs, rhs, float(margin), bool(margin >= -(4 * se + tol_rel * rhs)),
        float(4 * se + tol_rel * rhs), 1, {"lhs_method": method, "standard_error": se,
                                            **est.provenance()},
        {"lambda1_mixed": lam, "uncertainty": u})


# -- volume comparison -------------------------------------------------------

def bishop_gromov_check(P: ConvexPolygon, x, r: float, R: float) -> CheckReport:
    """area(B(x,r) & P) / area(B(x,R) & P) >= (r/R)^2 and area(B(x,R) & P) <= pi R^2."""
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    if not contains(P, x, 1e-12 * P.scale):
        raise PointOutside(f"{x} is not in the polygon")
    small = disk_intersection_area(P, x, r)
    big = disk_intersection_area(P, x, R)
    ratio = small / big
    bound = (r / R) ** 2
    ok = ratio >= bound - 1e-12 and big <= math.pi * R * R + 1e-12
    return CheckReport("bishop_gromov", {"P": P, "x": list(map(float, x)), "r": r, "R": R},
                       bound, ratio, ratio - bound, bool(ok), 1e-12, None, {"areas": "exact"},
                       {"area_r": small, "area_R": big, "ball_area_R": math.pi * R * R})


def brunn_minkowski_check(A: ConvexPolygon, B: ConvexPolygon, t: float) -> CheckReport:
    """area((1-t)A + tB)^(1/2) >= (1-t) area(A)^(1/2) + t area(B)^(1/2)."""
    C = minkowski_combination(A, B, t)
    lhs = math.sqrt(C.area)
    rhs = (1 - t) * math.sqrt(A.area) + t * math.sqrt(B.area)
    return _report("brunn_minkowski", {"A": A, "B": B, "t": t}, lhs, rhs,
                   (lhs - rhs) / rhs, 1e-10, details={"combination_area": C.area})


# -- Weyl-type upper bounds --------------------------------------------------

def polya_check(spectrum: Spectrum, n: int, vol: float, kmax: int,
                uncertainty: Sequence[float] | None = None) -> CheckReport:
    """Kroger's bound as a hard check; the Polya ratio is recorded.

    ``details['polya_violations']`` counts indices with lambda_k above the
    Polya value.
    """
    ks = np.arange(1, kmax + 1)
    lam = np.array([spectrum.eig(int(k)) for k in ks])
    weyl = analytic.weyl_scale(n, ks, vol)
    polya = 4 * math.pi ** 2 * weyl
    kroger = polya * ((n + 2) / n) ** (2 / n)
    u = np.zeros(kmax) if uncertainty is None else np.asarray(uncertainty, dtype=float)[:kmax]
    tol = UNCERTAINTY_FACTOR * u + 1e-12
    slack = (kroger - lam) / kroger
    ratio = lam / polya
    worst = int(np.argmax(ratio))
    return CheckReport(
        "polya", {"spectrum": spectrum.to_dict(), "n": n, "vol": vol, "kmax": kmax,
                  "uncertainty": None if uncertainty is None else u.tolist()},
        float(lam[worst]), float(polya[worst]), float(slack.min()),
        bool(np.all(slack >= -tol)), float(tol.max()), spectrum.index_base, {"count": len(spectrum)},
        {"max_polya_ratio": float(ratio.max()), "argmax_k": int(ks[worst]),
         "polya_violations": int(np.sum(lam > polya * (1 + tol))),
         "kroger_violations": int(np.sum(slack < -tol)),
         "max_kroger_ratio": float((lam / kroger).max())})


def closed_manifold_check(lengths, kmax: int) -> CheckReport:
    """Flat torus: lambda_k <= n(n+4) w^(4/n) ((k+1)/(w vol))^(2/n); records the Weyl constant."""
    L = tuple(float(x) for x in lengths)
    n = len(L)
    if n > 8:
        raise ValueError("dimension must be <= 8")
    vol = float(np.prod(L))
    spec = analytic.torus_spectrum(L, kmax + 1)
    ks = np.arange(1, kmax + 1)
    lam = spec.eigenvalues[1:kmax + 1]
    w = analytic.omega_n(n)
    liyau = n * (n + 4) * w ** (4 / n) * ((ks + 1) / (w * vol)) ** (2 / n)
    weyl = analytic.weyl_scale(n, ks, vol)
    const = lam / weyl
    slack = (liyau - lam) / liyau
    return CheckReport(
        "closed_manifold", {"lengths": list(L), "kmax": kmax}, float(lam[np.argmin(slack)]),
        float(liyau[np.argmin(slack)]), float(slack.min()), bool(np.all(slack >= -1e-12)), 1e-12, 0,
        {"source": "torus enumerator", "count": kmax + 1},
        {"empirical_constant": float(const.max()), "argmax_k": int(ks[np.argmax(const)]),
         "liyau_violations": int(np.sum(slack < -1e-12))})


def cheng_ball_value(n: int, r: float) -> float:
    """lambda^D_1 of the Euclidean ball of radius r/4: (r/4)^-2 j_{n/2-1,1}^2."""
    j = analytic.bessel_first_zero(n / 2 - 1, "J")
    return (r / 4) ** -2 * j * j


def cheng_ball_check(n: int, r: float, h: float | None = None, m: int = 512) -> CheckReport:
    """Closed-form ball eigenvalue; for n = 2 also compared with FEM on an m-gon."""
    if n < 2:
        raise ValueError("n must be >= 2")
    value = cheng_ball_value(n, r)
    if n != 2:
        return CheckReport("cheng_ball", {"n": n, "r": r}, value, value, 0.0, True, 0.0, 1,
                           {"source": "closed form"}, {"closed_form": value})
    if h is None:
        h = 0.02 * r / 4
    disk = regular_polygon(m, r / 4)
    est = fem_estimate(disk, ALL_DIRICHLET, h, 1)
    lam = est.eig(1)
    rel = abs(lam - value) / value
    return CheckReport("cheng_ball", {"n": n, "r": r, "h": h, "m": m}, lam, value, -rel,
                       bool(rel <= 0.01), 0.01, 1, {"source": "fem", **est.provenance()},
                       {"closed_form": value, "relative_error": rel, "uncertainty": est.u(1)})


# -- the l_p-ball example ----------------------------------------------------

def lp_slab_pair(p: float, eps: float, m: int = 256):
    """Unit-area l_p ball polygon and a slab of half-width eps along the x-axis.

    The slab is clipped to the ball, so it joins the origin region to the
    vertex (r, 0) as a thin convex neighbourhood of the diameter segment.
    """
    r = analytic.lp_unit_volume_radius(2, p)
    outer = lp_ball_polygon(p, r, m)
    slab = intersect(rectangle(-r, -eps, r, eps), outer)
    return slab, outer


# -- replay from serialized inputs -------------------------------------------

def _poly(d) -> ConvexPolygon:
    if isinstance(d, ConvexPolygon):
        return d
    return polygon_new(d["vertices"])


def _domain(d):
    if isinstance(d, dict) and "box" in d:
        return Box(tuple(d["box"]))
    return _poly(d)


def rerun(report: dict) -> CheckReport:
    """Re-run a check from a serialized report's inputs."""
    name, a = report["check"], report["inputs"]
    if name == "dirichlet_monotonicity":
        return dirichlet_monotonicity_check(_poly(a["omega"]), _poly(a["omega_outer"]), a["kmax"], a["h"])
    if name == "dm_ratio":
        return dm_ratio(_poly(a["omega"]), _poly(a["omega_outer"]), a["kmax"], a["h"])
    if name == "replay_dm_proof":
        return replay_dm_proof(_poly(a["omega"]), _poly(a["omega_outer"]), a["k"], a["c"], a["h"], a["n"])[1]
    if name == "keylemma_constant":
        return keylemma_constant(_domain(a["domain"]), a["r"], a["probe_step"], a["h"])
    if name == "boundary_concentration":
        return boundary_concentration_check(_poly(a["P"]), a["r"], a["h"], a["lambda1"])
    if name == "mixed_concentration":
        s = a["spec"]
        spec = BoundarySpec(tuple(map(tuple, s["neumann"])), s["all_neumann"])
        return mixed_concentration_check(_poly(a["P"]), spec, a["r"], a["h"], a["mc_samples"], a["seed"])
    if name == "bishop_gromov":
        return bishop_gromov_check(_poly(a["P"]), a["x"], a["r"], a["R"])
    if name == "brunn_minkowski":
        return brunn_minkowski_check(_poly(a["A"]), _poly(a["B"]), a["t"])
    if name == "polya":
        d = a["spectrum"]
        spec = Spectrum(np.array(d["eigenvalues"]), d["bc_mode"], d["index_base"],
                        domain=d.get("domain", {}), h=d.get("h"))
        return polya_check(spec, a["n"], a["vol"], a["kmax"], a.get("uncertainty"))
    if name == "closed_manifold":
        return closed_manifold_check(a["lengths"], a["kmax"])
    if name == "cheng_ball":
        return cheng_ball_check(a["n"], a["r"], a.get("h"), a.get("m", 512))
    if name == "certified_neumann_lower_bound":
        cells = [_poly(c) for c in a["cells"]]
        return certified_neumann_lower_bound(_poly(a["P"]), cells, a["h"], a["multiplicity"])[1]
    raise ValueError(f"cannot rerun check {name!r}")
