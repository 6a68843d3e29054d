"""Smallest eigenpairs of the generalized symmetric problem K u = lambda M u."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

SEED = 0x5EED
# extra eigenpairs requested so clusters are not split at the cut
PAD = 4


class NoConvergence(RuntimeError):
    def __init__(self, iterations, worst_residual):
        super().__init__(f"no convergence after {iterations} iterations "
                         f"(worst residual {worst_residual:.3g})")
        self.iterations = iterations
        self.worst_residual = worst_residual


class FactorizationFailure(RuntimeError):
    pass


BC_MODES = ("NEUMANN", "DIRICHLET", "MIXED", "TORUS", "BOX_NEUMANN", "BOX_DIRICHLET",
            "DISK_NEUMANN", "DISK_DIRICHLET")


@dataclass
class Spectrum:
    """Ascending eigenvalues plus the metadata needed to index them safely.

    ``index_base`` is 0 when the list starts with the trivial eigenvalue
    (Neumann, torus) and 1 otherwise; :meth:`eig` takes the conventional
    index and hides the offset.
    """

    eigenvalues: np.ndarray
    bc_mode: str
    index_base: int
    residuals: np.ndarray | None = None
    domain: dict = field(default_factory=dict)
    h: float | None = None
    vectors: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.bc_mode not in BC_MODES:
            raise ValueError(f"unknown bc_mode {self.bc_mode}")
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def eig(self, k: int) -> float:
        i = k - self.index_base
        if i < 0:
            raise IndexError(f"index {k} below base {self.index_base}")
        return float(self.eigenvalues[i])

    @property
    def max_index(self) -> int:
        return self.index_base + len(self.eigenvalues) - 1

    def to_dict(self) -> dict:
        d = {"domain": self.domain, "bc_mode": self.bc_mode, "index_base": self.index_base,
             "h": self.h, "eigenvalues": self.eigenvalues.tolist()}
        d["residuals"] = None if self.residuals is None else np.asarray(self.residuals).tolist()
        return d


def _norm1(A) -> float:
    return float(abs(A).sum(axis=0).max())


def residuals(K, Mass, lam, vecs) -> np.ndarray:
    """Scaled residuals ||K u - lam M u|| / ((||K||_1 + |lam| ||M||_1) ||u||)."""
    nk, nm = _norm1(K), _norm1(Mass)
    R = K @ vecs - (Mass @ vecs) * lam
    return np.linalg.norm(R, axis=0) / ((nk + np.abs(lam) * nm) * np.linalg.norm(vecs, axis=0))


def smallest_eigs(K, Mass, count: int, tol: float = 1e-9, *, bc_mode: str = "NEUMANN",
                  index_base: int | None = None, domain: dict | None = None,
                  h: float | None = None, keep_vectors: bool = False) -> Spectrum:
    """The ``count`` smallest eigenpairs, by shift-invert Lanczos at a small negative shift."""
    n = K.shape[0]
    if count < 1 or count > n:
        raise ValueError(f"count must lie in [1, {n}]")
    if index_base is None:
        index_base = 0 if bc_mode in ("NEUMANN", "TORUS", "BOX_NEUMANN", "DISK_NEUMANN") else 1
    want = min(count + PAD, n)
    if n <= max(200, want + 1):
        try:
            lam, vec = la.eigh(np.asarray(sp.csr_matrix(K).todense()),
                               np.asarray(sp.csr_matrix(Mass).todense()),
                               subset_by_index=(0, want - 1))
        except la.LinAlgError as exc:
            raise FactorizationFailure(str(exc)) from exc
    else:
        sigma = -1e-8 * _norm1(K) / _norm1(Mass)
        try:
            lu = spla.splu((K - sigma * Mass).tocsc())
        except RuntimeError as exc:
            raise FactorizationFailure(str(exc)) from exc
        OPinv = spla.LinearOperator(K.shape, matvec=lu.solve, dtype=float)
        v0 = np.random.default_rng(SEED).uniform(-1.0, 1.0, n)
        maxiter = 50 * n
        try:
            lam, vec = spla.eigsh(K, k=want, M=Mass, sigma=sigma, which="LM", OPinv=OPinv,
                                  v0=v0, tol=0, maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            lam, vec = exc.eigenvalues, exc.eigenvectors
            worst = residuals(K, Mass, lam, vec).max() if len(lam) else np.inf
            raise NoConvergence(maxiter, worst) from exc
    order = np.argsort(lam)
    lam, vec = lam[order][:count], vec[:, order][:, :count]
    res = residuals(K, Mass, lam, vec)
    if np.any(res > tol):
        raise NoConvergence(0, float(res.max()))
    return Spectrum(lam, bc_mode, index_base, res, domain or {}, h,
                    vec if keep_vectors else None)
