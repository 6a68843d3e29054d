"""
A thin slab inside the l1 ball
==============================

The l1 ball of radius 1 is a square of side sqrt(2) turned by 45 degrees,
so its first nontrivial Neumann eigenvalue is pi^2 / 2.  A slab of
half-width eps along a diagonal is almost a segment of length 2(1 - eps),
with first eigenvalue close to pi^2 / (2 (1 - eps))^2.  The ratio
outer / inner therefore tends to 2 as the slab gets thinner: a subdomain
can have a smaller Neumann eigenvalue than the domain containing it, but
only by a bounded factor.
"""

from convexspec.geom import lp_ball_polygon, rectangle
from convexspec.verify import dm_ratio, lp_slab_pair

outer = lp_ball_polygon(1, 1.0, 4)
print(f"outer area {outer.area:.3f}, diameter {outer.diameter:.3f}")

# %%
# Rectangular slabs that fit inside the ball.
for eps in (0.2, 0.1, 0.05):
    slab = rectangle(-(1 - eps), -eps, 1 - eps, eps)
    rep = dm_ratio(slab, outer, 1, eps / 2)
    print(f"eps={eps:5.2f}  fem ratio {rep.details['ratios'][0]:.4f}  "
          f"segment value {2 * (1 - eps) ** 2:.4f}")

# %%
# The same experiment with a unit-area ball and a slab clipped to it,
# so the slab reaches the two corners.
for eps in (0.1, 0.05, 0.025):
    slab, ball = lp_slab_pair(1, eps)
    rep = dm_ratio(slab, ball, 1, eps / 2)
    print(f"eps={eps:6.3f}  ratio {rep.details['ratios'][0]:.4f}")
