"""
Neumann spectrum of the unit square
===================================

Linear finite elements against the closed-form lattice values, and the
second-order convergence that one mesh halving reveals.
"""

import numpy as np

from convexspec.analytic import box_spectrum
from convexspec.geom import unit_square
from convexspec.verify import fem_estimate

# %%
# The exact Neumann eigenvalues are pi^2 (a^2 + b^2) over integer pairs.
exact = box_spectrum((1.0, 1.0), "NEUMANN", 11).eigenvalues
print("exact :", np.round(exact, 4))

# %%
# One FEM solve at h and one at h/2.  The relative gap between them is the
# uncertainty every inequality check carries.
est = fem_estimate(unit_square(), "neumann", 0.04, 11)
print("fem   :", np.round(est.values, 4))
print("rel err:", np.round(np.abs(est.values[1:] - exact[1:]) / exact[1:], 5))
print("u     :", np.round(est.uncertainty[1:], 5))

# %%
# Halving h divides the error by about four.
e_coarse = est.coarse.eig(1) - exact[1]
e_fine = est.fine.eig(1) - exact[1]
print(f"error ratio for lambda_1: {e_coarse / e_fine:.3f}")
