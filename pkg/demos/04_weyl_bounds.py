"""
Weyl-type upper bounds on lattice spectra
=========================================

Boxes, the disk and flat tori have explicit spectra, so the upper bounds
can be swept to high index without any discretization.
"""

import math

import numpy as np

from convexspec import analytic
from convexspec.verify import closed_manifold_check, polya_check

# %%
# Boxes tile space, so lambda_k stays below the Polya value; the weaker
# Kroger bound is the hard check.
rng = np.random.default_rng(0)
for n in (2, 3, 4, 5):
    L = tuple(rng.uniform(0.5, 2.0, n))
    s = analytic.box_spectrum(L, "NEUMANN", 10_001)
    rep = polya_check(s, n, float(np.prod(L)), 10_000)
    print(f"box n={n}: max lambda/polya {rep.details['max_polya_ratio']:.4f}, "
          f"kroger {'pass' if rep.passed else 'FAIL'}")

s = analytic.disk_spectrum(1.0, "NEUMANN", 101)
rep = polya_check(s, 2, math.pi, 100)
print(f"disk: max lambda/polya {rep.details['max_polya_ratio']:.4f}")

# %%
# Flat tori: the empirical Weyl constant drops as the torus is stretched.
for stretch in (1, 2, 4, 8):
    rep = closed_manifold_check((1.0, float(stretch)), 1000)
    print(f"torus 1 x {stretch}: constant {rep.details['empirical_constant']:.3f}, "
          f"{'pass' if rep.passed else 'FAIL'}")
