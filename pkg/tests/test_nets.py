import math

import numpy as np
import pytest

from convexspec.corpus import random_partition_sites, random_polygon, rng_for
from convexspec.geom import Box, rectangle, unit_square
from convexspec.nets import (
    DuplicateSites,
    PointSet,
    ProbeTooCoarse,
    covering_multiplicity,
    maximal_separated_net,
    partition_from_cells,
    voronoi_partition,
)


def brute_greedy(candidates, r):
    """Plain O(N^2) greedy, the oracle for the vectorized scan."""
    chosen = []
    for q in candidates:
        if all(np.linalg.norm(q - c) >= r * (1 - 1e-12) for c in chosen):
            chosen.append(q)
    return np.array(chosen)


class TestNet:
    def test_single_point(self):
        assert len(maximal_separated_net(unit_square(), 2.0)) == 1

    def test_square_half(self):
        net = maximal_separated_net(unit_square(), 0.5)
        assert 4 <= len(net) <= 9
        assert net.min_distance() >= 0.5 - 1e-12

    def test_interval(self):
        assert len(maximal_separated_net(Box((10.0,)), 1.0)) in (10, 11)

    def test_probe_too_coarse(self):
        with pytest.raises(ProbeTooCoarse):
            maximal_separated_net(unit_square(), 0.5, 0.06)

    def test_greedy_matches_oracle(self):
        from convexspec.nets import _polygon_probes
        P = random_polygon(rng_for(1))
        probes = _polygon_probes(P, 0.03)
        ours = maximal_separated_net(P, 0.3, 0.03).points
        assert np.array_equal(ours, brute_greedy(probes, 0.3))

    def test_box_greedy_matches_oracle(self):
        L = np.array([1.0, 0.7, 0.5])
        net = maximal_separated_net(Box(tuple(L)), 0.4, 0.04)
        # per-axis point counts round up, so no axis spacing exceeds the step
        counts = np.ceil(L / 0.04 - 1e-9).astype(int) + 1
        grids = np.meshgrid(*[np.linspace(0, l, c) for l, c in zip(L, counts)], indexing="ij")
        probes = np.stack([g.ravel() for g in grids], axis=1)
        assert np.allclose(net.points, brute_greedy(probes, 0.4))

    @pytest.mark.parametrize("seed", range(5))
    def test_separation_and_cover(self, seed):
        rng = rng_for(seed)
        P = random_polygon(rng)
        r = float(rng.uniform(0.1, 0.5))
        net = maximal_separated_net(P, r)
        assert net.min_distance() >= r * (1 - 1e-12)
        # covering radius holds on a finer independent grid
        lo, hi = P.bbox()
        X, Y = np.meshgrid(np.linspace(lo[0], hi[0], 120), np.linspace(lo[1], hi[1], 120))
        q = np.column_stack([X.ravel(), Y.ravel()])
        q = q[P.signed_distances(q) <= 0]
        d = np.min(np.hypot(q[:, None, 0] - net.points[None, :, 0], q[:, None, 1] - net.points[None, :, 1]), axis=1)
        assert d.max() <= net.cover_radius

    def test_halving_r_never_shrinks(self):
        rng = rng_for(2)
        for _ in range(10):
            P = random_polygon(rng)
            r = float(rng.uniform(0.15, 0.6))
            assert len(maximal_separated_net(P, r / 2)) >= len(maximal_separated_net(P, r))

    def test_box_high_dim(self):
        net = maximal_separated_net(Box((1.0,) * 4), 0.5)
        assert net.dim == 4
        assert net.min_distance() >= 0.5 * (1 - 1e-12)

    def test_serialization(self):
        d = maximal_separated_net(unit_square(), 0.5).to_dict()
        assert d["r"] == 0.5 and len(d["points"]) >= 4


class TestVoronoi:
    def test_single_site(self):
        part = voronoi_partition(unit_square(), np.array([[0.3, 0.3]]))
        assert part.cells[0] == unit_square()

    def test_two_sites(self):
        part = voronoi_partition(unit_square(), np.array([[0.25, 0.5], [0.75, 0.5]]))
        assert part.areas() == pytest.approx([0.5, 0.5])
        assert part.cells[0] == rectangle(0, 0, 0.5, 1)

    def test_quadrants(self):
        sites = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]])
        part = voronoi_partition(unit_square(), sites)
        assert np.allclose(part.diameters(), math.sqrt(2) / 2)
        assert covering_multiplicity(part.cells, 0.01) == 1

    def test_duplicate_sites(self):
        with pytest.raises(DuplicateSites):
            voronoi_partition(unit_square(), np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_sites_outside(self):
        with pytest.raises(ValueError):
            voronoi_partition(unit_square(), np.array([[1.5, 0.5]]))

    def test_area_sums(self):
        rng = rng_for(4)
        for i in range(100):
            P = random_polygon(rng)
            sites = random_partition_sites(rng, P, int(rng.integers(1, 15)))
            part = voronoi_partition(P, sites)
            assert part.areas().sum() == pytest.approx(P.area, rel=1e-9)

    def test_cell_is_nearest_site_region(self):
        rng = rng_for(8)
        P = random_polygon(rng)
        sites = random_partition_sites(rng, P, 7)
        part = voronoi_partition(P, sites)
        for i, cell in enumerate(part.cells):
            c = cell.centroid
            assert np.argmin(np.hypot(*(sites - c).T)) == i

    @pytest.mark.parametrize("seed", range(6))
    def test_net_cells_diameter(self, seed):
        rng = rng_for(seed + 100)
        P = random_polygon(rng)
        r = float(rng.uniform(0.15, 0.5))
        step = r / 16
        part = voronoi_partition(P, maximal_separated_net(P, r, step))
        assert part.diameters().max() <= 2 * (r + step * math.sqrt(2))


class TestMultiplicity:
    def test_copies(self):
        assert covering_multiplicity([unit_square(), unit_square()], 0.05) == 2

    def test_strips(self):
        cells = [rectangle(0, 0, 0.6, 1), rectangle(0.4, 0, 1, 1)]
        assert covering_multiplicity(cells, 0.01) == 2

    def test_shared_edges_do_not_count(self):
        cells = [rectangle(0, 0, 0.5, 1), rectangle(0.5, 0, 1, 1)]
        assert covering_multiplicity(cells, 0.01) == 1

    def test_partition_from_cells(self):
        part = partition_from_cells(unit_square(), [rectangle(0, 0, 0.6, 1), rectangle(0.4, 0, 1, 1)])
        assert part.multiplicity == 2
        assert isinstance(part.sites, PointSet)
