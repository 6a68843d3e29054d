"""
One nested pair, step by step
=============================

A seeded outer polygon, an inner polygon cut from it, and the net and
Voronoi argument that bounds the inner Neumann eigenvalues from below by a
fixed fraction of the outer ones.
"""

import numpy as np

from convexspec.corpus import generate_nested_pair
from convexspec.verify import (
    dirichlet_monotonicity_check,
    dm_ratio,
    replay_dm_proof,
    smallest_sufficient_c,
)

h, kmax = 0.04, 6
inner, outer = generate_nested_pair(7)
print(f"outer: {len(outer)} vertices, area {outer.area:.3f}")
print(f"inner: {len(inner)} vertices, area {inner.area:.3f}")

# %%
# Dirichlet eigenvalues can only go up when the domain shrinks.
rep = dirichlet_monotonicity_check(inner, outer, kmax, h)
print("dirichlet inner/outer:", np.round(rep.details["ratios"], 3), "pass" if rep.passed else "FAIL")

# %%
# Neumann eigenvalues have no such order; the ratio outer/inner is what
# stays bounded.
rep = dm_ratio(inner, outer, kmax, h)
print("neumann outer/inner:  ", np.round(rep.details["ratios"], 3))

# %%
# For each k, the smallest c whose net in the outer domain has at most k
# points.  With that c the replay certifies
# lambda_k(inner) >= lambda_k(outer) / (8 c n)^2.
for k in range(1, kmax + 1):
    c = smallest_sufficient_c(outer, k, h)
    cert, rep = replay_dm_proof(inner, outer, k, c, h)
    d = rep.details
    print(f"k={k}  c={c:.3f}  net={d['net_size']}  certified {cert.certified_lambda_lower:.4f}"
          f" <= fem {d['lambda_k_inner']:.3f}  {'pass' if rep.passed else 'FAIL'}")
