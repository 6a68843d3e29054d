"""Exact spectra of boxes, flat tori and disks, Bessel zeros, reference bounds."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from .eigsolve import Spectrum

PI2 = math.pi ** 2


class NoBracket(RuntimeError):
    pass


# -- lattice spectra ---------------------------------------------------------

def _lattice_value(idx: Sequence[int], inv: Sequence[float], scale: float) -> float:
    return scale * math.fsum((p * w) ** 2 for p, w in zip(idx, inv))


def _best_first(lengths, start: int, scale: float):
    """Yield (value, multi_index) in nondecreasing value order."""
    inv = [1.0 / float(L) for L in lengths]
    n = len(inv)
    first = (start,) * n
    heap = [(_lattice_value(first, inv, scale), first)]
    seen = {first}
    while heap:
        val, idx = heapq.heappop(heap)
        yield val, idx
        for i in range(n):
            nxt = idx[:i] + (idx[i] + 1,) + idx[i + 1:]
            if nxt not in seen:
                seen.add(nxt)
                heapq.heappush(heap, (_lattice_value(nxt, inv, scale), nxt))


def _lengths(lengths) -> tuple[float, ...]:
    if hasattr(lengths, "lengths"):
        lengths = lengths.lengths
    L = tuple(float(x) for x in np.atleast_1d(lengths))
    if not L or any(x <= 0 for x in L):
        raise ValueError("side lengths must be positive")
    return L


def box_spectrum(lengths, bc: str, count: int) -> Spectrum:
    """Smallest ``count`` values of pi^2 sum (p_i / L_i)^2, with multiplicity.

    Neumann uses p_i >= 0 (index base 0, starting at the zero mode); Dirichlet
    uses p_i >= 1 (index base 1).
    """
    L = _lengths(lengths)
    bc = bc.upper()
    if bc not in ("NEUMANN", "DIRICHLET"):
        raise ValueError("bc must be NEUMANN or DIRICHLET")
    if count < 1:
        raise ValueError("count must be positive")
    gen = _best_first(L, 0 if bc == "NEUMANN" else 1, PI2)
    vals = [next(gen)[0] for _ in range(count)]
    return Spectrum(np.array(vals), "BOX_" + bc, 0 if bc == "NEUMANN" else 1,
                    domain={"box": list(L)})


def torus_spectrum(lengths, count: int) -> Spectrum:
    """Smallest ``count`` values of 4 pi^2 sum (m_i / L_i)^2 over signed integers."""
    L = _lengths(lengths)
    if count < 1:
        raise ValueError("count must be positive")
    vals: list[float] = []
    for val, idx in _best_first(L, 0, 4 * PI2):
        # sign choices of the nonzero entries
        vals.extend([val] * (2 ** sum(1 for p in idx if p)))
        if len(vals) >= count:
            break
    return Spectrum(np.array(vals[:count]), "TORUS", 0, domain={"torus": list(L)})


def counting_function(lengths, bc: str, lam: float) -> int:
    """Number of lattice eigenvalues <= lam (bc NEUMANN, DIRICHLET or TORUS)."""
    L = _lengths(lengths)
    bc = bc.upper()
    start, scale = {"NEUMANN": (0, PI2), "DIRICHLET": (1, PI2), "TORUS": (0, 4 * PI2)}[bc]
    total = 0
    for val, idx in _best_first(L, start, scale):
        if val > lam:
            break
        total += 2 ** sum(1 for p in idx if p) if bc == "TORUS" else 1
    return total


# -- Bessel functions --------------------------------------------------------

def bessel_j(nu: float, x) -> np.ndarray:
    """J_nu(x) for x > 0 and nu >= 0."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    if nu < 0:
        raise ValueError("order must be nonnegative")
    return special.jv(nu, x)


def bessel_jp(nu: float, x) -> np.ndarray:
    """Derivative J'_nu(x)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    return special.jvp(nu, x)


def bessel_zeros_between(nu: float, lo: float, hi: float, kind: str = "J",
                         step: float = 0.25) -> np.ndarray:
    """All sign changes of J_nu (or J'_nu) in (lo, hi], refined by bisection."""
    f = bessel_j if kind == "J" else bessel_jp
    xs = np.arange(lo, hi + step, step)
    xs = xs[xs > 0]
    if len(xs) < 2:
        return np.empty(0)
    v = f(nu, xs)
    idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
    exact = xs[np.flatnonzero(v == 0)]
    a, b = xs[idx].copy(), xs[idx + 1].copy()
    fa = v[idx]
    for _ in range(64):
        mid = 0.5 * (a + b)
        fm = f(nu, mid) if len(mid) else mid
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
    z = np.sort(np.concatenate([0.5 * (a + b), exact]))
    return z[z <= hi]


def _first_zero_guess(nu: float, kind: str) -> float:
    # leading terms of the large-order expansion of the first zero
    c = 1.8557571 if kind == "J" else 0.8086165
    return nu + c * nu ** (1 / 3)


def bessel_zeros(nu: float, count: int, kind: str = "J") -> np.ndarray:
    """First ``count`` positive zeros of J_nu (kind "J") or J'_nu (kind "J'")."""
    if kind not in ("J", "J'"):
        raise ValueError("kind must be 'J' or \"J'\"")
    if not 0 <= nu <= 200:
        raise ValueError("order must lie in [0, 200]")
    if kind == "J'" and nu == 0:
        # J_0' = -J_1; the zero at the origin is not counted
        return bessel_zeros(1.0, count, "J")
    f = bessel_j if kind == "J" else bessel_jp
    # f > 0 on (0, first zero); the first zero exceeds nu
    lo = max(nu, 0.5) if kind == "J" else max(nu, 1e-3)
    guess = _first_zero_guess(nu, kind) - 2.0
    if guess > lo and f(nu, guess)[0] > 0:
        lo = guess
    if f(nu, lo)[0] <= 0:
        raise NoBracket(f"no positive start for order {nu}")
    hi = lo + math.pi * (count + 2) + 4
    for _ in range(8):
        z = bessel_zeros_between(nu, lo, hi, kind)
        if len(z) >= count:
            return z[:count]
        hi += math.pi * (count + 2)
    raise NoBracket(f"found {len(z)} of {count} zeros for order {nu}")


def bessel_first_zero(nu: float, kind: str = "J") -> float:
    return float(bessel_zeros(nu, 1, kind)[0])


def disk_spectrum(R: float, bc: str, count: int) -> Spectrum:
    """Disk eigenvalues (j_{m,k}/R)^2 or (j'_{m,k}/R)^2, multiplicity 2 for m >= 1."""
    bc = bc.upper()
    if bc not in ("NEUMANN", "DIRICHLET"):
        raise ValueError("bc must be NEUMANN or DIRICHLET")
    if R <= 0 or count < 1:
        raise ValueError("need R > 0 and count >= 1")
    kind = "J" if bc == "DIRICHLET" else "J'"
    xmax = 2 * math.sqrt(count) + 6
    while True:
        vals = [0.0] if bc == "NEUMANN" else []
        m = 0
        while True:
            if kind == "J'" and m == 0:
                z = bessel_zeros_between(1.0, 0.5, xmax, "J")
            else:
                lo = max(m, 0.5) if kind == "J" else max(m, 1e-3)
                z = bessel_zeros_between(float(m), lo, xmax, kind)
            if len(z) == 0:
                break
            vals.extend(np.repeat(z ** 2, 1 if m == 0 else 2).tolist())
            m += 1
        if len(vals) >= count:
            break
        xmax *= 1.5
    vals = np.sort(vals)[:count] / R ** 2
    return Spectrum(vals, "DISK_" + bc, 0 if bc == "NEUMANN" else 1, domain={"disk": R})


# -- Gamma, ball volumes, reference bounds -----------------------------------

def log_gamma_half_integer(n: int) -> float:
    """log Gamma(n/2 + 1) by the exact recurrence from Gamma(1), Gamma(1/2)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n % 2 == 0:
        return math.fsum(math.log(j) for j in range(1, n // 2 + 1))
    return 0.5 * math.log(math.pi) + math.fsum(math.log(j + 0.5) for j in range(0, n // 2 + 1))


def gamma_half_integer(n: int) -> float:
    """Gamma(n/2 + 1); raises OverflowError past the float range."""
    if n < 0 or n > 400:
        raise ValueError("n must lie in [0, 400]")
    if n % 2 == 0:
        val = float(math.factorial(n // 2))
    else:
        val = math.sqrt(math.pi)
        for j in range(0, n // 2 + 1):
            val *= j + 0.5
    if not math.isfinite(val):
        raise OverflowError("Gamma(n/2 + 1) overflows; use log_gamma_half_integer")
    return val


def log_omega(n: int) -> float:
    return 0.5 * n * math.log(math.pi) - log_gamma_half_integer(n)


def omega_n(n: int) -> float:
    """Volume of the Euclidean unit ball in dimension n."""
    if n <= 30:
        return math.pi ** (n / 2) / gamma_half_integer(n)
    return math.exp(log_omega(n))


def lp_unit_volume_radius(n: int, p: float) -> float:
    """r with vol(r B_p^n) = 1, using vol(B_p^n) = (2 Gamma(1/p + 1))^n / Gamma(n/p + 1)."""
    if not 1 <= p <= 2:
        raise ValueError("p must lie in [1, 2]")
    log_vol = n * math.log(2 * math.gamma(1 / p + 1)) - math.lgamma(n / p + 1)
    return math.exp(-log_vol / n)


@dataclass(frozen=True)
class ReferenceBounds:
    n: int
    k: int
    vol: float
    omega_n: float
    polya: float
    kroger: float
    liyau: float

    def buser(self, a: float, c_n: float) -> float:
        """(n-1)^2 a^2 / 4 + c_n (k / vol)^(2/n); c_n must be supplied."""
        return (self.n - 1) ** 2 * a * a / 4 + c_n * (self.k / self.vol) ** (2 / self.n)


def reference_bounds(n: int, k: int, vol: float) -> ReferenceBounds:
    if n < 1 or k < 1 or vol <= 0:
        raise ValueError("need n >= 1, k >= 1, vol > 0")
    lw = log_omega(n)
    e = 2.0 / n
    if n > 30:
        base = e * (math.log(k) - lw - math.log(vol))
        polya = math.exp(math.log(4 * PI2) + base)
        kroger = math.exp(math.log(4 * PI2) + e * math.log((n + 2) / n) + base)
        liyau = math.exp(math.log(n * (n + 4)) + 2 * e * lw
                         + e * (math.log(k + 1) - lw - math.log(vol)))
        w = math.exp(lw)
    else:
        w = omega_n(n)
        polya = 4 * PI2 * (k / (w * vol)) ** e
        kroger = 4 * PI2 * ((n + 2) / n) ** e * (k / (w * vol)) ** e
        liyau = n * (n + 4) * w ** (2 * e) * ((k + 1) / (w * vol)) ** e
    return ReferenceBounds(n, k, float(vol), w, polya, kroger, liyau)


def weyl_scale(n: int, k, vol: float):
    """(k / (omega_n vol))^(2/n), the common factor of the reference bounds."""
    return (np.asarray(k, dtype=float) / (omega_n(n) * vol)) ** (2.0 / n)
