import json
import math

import numpy as np
import pytest

from convexspec import analytic
from convexspec.corpus import generate_nested_pair, random_polygon, rng_for
from convexspec.discretize import ALL_DIRICHLET, BoundarySpec
from convexspec.geom import Box, lp_ball_polygon, polygon_new, rectangle, regular_polygon, unit_square
from convexspec.nets import partition_from_cells, voronoi_partition
from convexspec.verify import (
    BoundCertificate,
    CheckReport,
    NetTooLarge,
    NotNested,
    PointOutside,
    bishop_gromov_check,
    boundary_concentration_check,
    brunn_minkowski_check,
    certified_neumann_lower_bound,
    cheng_ball_check,
    cheng_ball_value,
    closed_manifold_check,
    dirichlet_monotonicity_check,
    dm_ratio,
    fem_estimate,
    keylemma_constant,
    lp_slab_pair,
    mixed_concentration_check,
    polya_check,
    replay_dm_proof,
    rerun,
    smallest_sufficient_c,
)

PI2 = math.pi ** 2


def quadrants():
    return [rectangle(x, y, x + 0.5, y + 0.5) for x in (0, 0.5) for y in (0, 0.5)]


def roundtrip(report):
    return rerun(json.loads(report.to_json()))


class TestFemEstimate:
    def test_uncertainty_and_provenance(self):
        est = fem_estimate(unit_square(), "neumann", 0.05, 3)
        assert est.index_base == 0
        assert est.eig(1) == pytest.approx(PI2, rel=0.02)
        assert 0 < est.u(1) < 0.02
        prov = est.provenance()
        assert prov["h"] == 0.05 and prov["h_fine"] == 0.025

    def test_cached(self):
        a = fem_estimate(unit_square(), "dirichlet", 0.1, 2)
        b = fem_estimate(unit_square(), "dirichlet", 0.1, 2)
        assert b.coarse is a.coarse and b.fine is a.fine
        assert np.array_equal(fem_estimate(unit_square(), "dirichlet", 0.1, 1).values, a.values[:1])


class TestCertificate:
    def test_one_cell(self):
        cert, rep = certified_neumann_lower_bound(unit_square(), [unit_square()], 0.05)
        assert cert.certified_lambda_lower == pytest.approx(1 / 8)
        assert cert.target_index == 0 or rep.passed

    def test_quadrants(self):
        cert, rep = certified_neumann_lower_bound(unit_square(), quadrants(), 0.05)
        assert cert.certified_lambda_lower == pytest.approx(0.5)
        assert rep.passed and rep.index_base == 0
        assert rep.rhs == pytest.approx(4 * PI2, rel=0.02)

    def test_long_rectangle(self):
        cells = [rectangle(i, 0, i + 1, 1) for i in range(4)]
        cert, rep = certified_neumann_lower_bound(rectangle(0, 0, 4, 1), cells, 0.05)
        assert cert.certified_lambda_lower == pytest.approx(1 / 8)
        assert rep.rhs == pytest.approx(PI2, rel=0.01)
        assert rep.passed

    def test_multiplicity_divides(self):
        part = partition_from_cells(unit_square(), [rectangle(0, 0, 0.6, 1), rectangle(0.4, 0, 1, 1)])
        cert, rep = certified_neumann_lower_bound(unit_square(), part, 0.05)
        assert part.multiplicity == 2
        d = math.hypot(0.6, 1)
        assert cert.certified_lambda_lower == pytest.approx(1 / (d * d) / 16)
        assert rep.passed

    def test_recompute(self):
        cert = BoundCertificate.from_cells(unit_square(), quadrants(), 1)
        assert cert.recompute() == cert.certified_lambda_lower

    def test_incomplete_cover(self):
        with pytest.raises(ValueError):
            certified_neumann_lower_bound(unit_square(), quadrants()[:3], 0.1)

    def test_soundness_random(self):
        rng = rng_for(21)
        for _ in range(5):
            P = random_polygon(rng)
            sites = P.centroid + 0.2 * rng.uniform(-1, 1, (int(rng.integers(2, 6)), 2))
            sites = sites[P.signed_distances(sites) < 0]
            _, rep = certified_neumann_lower_bound(P, voronoi_partition(P, sites), 0.05)
            assert rep.passed


class TestDirichletMonotonicity:
    def test_square_in_square(self):
        rep = dirichlet_monotonicity_check(rectangle(0.25, 0.25, 0.75, 0.75), unit_square(), 3, 0.05)
        assert rep.passed and rep.index_base == 1
        assert rep.details["ratios"][0] == pytest.approx(4, rel=0.01)

    def test_equal_domains(self):
        rep = dirichlet_monotonicity_check(unit_square(), unit_square(), 4, 0.05)
        assert rep.passed and np.allclose(rep.details["ratios"], 1, atol=1e-9)

    def test_not_nested(self):
        with pytest.raises(NotNested):
            dirichlet_monotonicity_check(rectangle(0.5, 0.5, 1.5, 1.5), unit_square(), 1, 0.1)


class TestDmRatio:
    def test_slab_in_square(self):
        rep = dm_ratio(rectangle(0, 0, 1, 0.05), unit_square(), 1, 0.01)
        assert rep.details["ratios"][0] == pytest.approx(1, rel=0.01)

    def test_l1_ball_slab(self):
        eps = 0.05
        outer = lp_ball_polygon(1, 1.0, 4)
        slab = rectangle(-(1 - eps), -eps, 1 - eps, eps)
        rep = dm_ratio(slab, outer, 1, 0.02)
        exact = 2 * (1 - eps) ** 2
        assert exact == pytest.approx(1.805)
        assert rep.details["ratios"][0] == pytest.approx(exact, rel=0.01)

    def test_l1_slab_tends_to_two(self):
        ratios = [dm_ratio(*lp_slab_pair(1, eps), 1, eps / 2).details["ratios"][0] for eps in (0.1, 0.05)]
        assert ratios[0] < ratios[1] < 2.05

    def test_equal_domains(self):
        rep = dm_ratio(unit_square(), unit_square(), 5, 0.05)
        assert np.allclose(rep.details["ratios"], 1, atol=1e-9)

    def test_scale_invariance(self):
        inner, outer = generate_nested_pair(3)
        a = dm_ratio(inner, outer, 4, 0.05).details["ratios"]
        b = dm_ratio(inner.scaled(3.0), outer.scaled(3.0), 4, 0.15).details["ratios"]
        assert np.allclose(a, b, rtol=1e-6)

    def test_not_nested(self):
        with pytest.raises(NotNested):
            dm_ratio(unit_square(), rectangle(0, 0, 0.5, 0.5), 1, 0.1)


class TestReplay:
    def test_square_c3(self):
        cert, rep = replay_dm_proof(unit_square(), unit_square(), 4, 3.0, 0.05)
        d = rep.details
        assert d["R"] == pytest.approx(6 / math.sqrt(rep.details["lambda_k_outer"]))
        assert d["R"] == pytest.approx(3 / math.pi, rel=0.01)
        assert d["l_le_k_minus_1"] and d["identity_holds"]
        assert d["chain_bound"] == pytest.approx(1 / (64 * d["R"] ** 2))
        assert d["chain_bound"] == pytest.approx(0.0171, rel=0.02)
        assert rep.passed

    def test_single_point(self):
        cert, rep = replay_dm_proof(unit_square(), unit_square(), 1, 100.0, 0.05)
        assert rep.details["net_size"] == 1
        assert cert.cells[0] == unit_square()
        assert rep.passed

    def test_too_small_c(self):
        with pytest.raises(NetTooLarge) as err:
            replay_dm_proof(unit_square(), unit_square(), 2, 0.3, 0.1)
        assert err.value.smallest_c > 0.3
        c = smallest_sufficient_c(unit_square(), 2, 0.1)
        assert err.value.smallest_c == c
        assert replay_dm_proof(unit_square(), unit_square(), 2, c, 0.1)[1].passed

    def test_nested_pair(self):
        inner, outer = generate_nested_pair(5)
        c = smallest_sufficient_c(outer, 3, 0.05)
        _, rep = replay_dm_proof(inner, outer, 3, c, 0.05)
        assert rep.passed and rep.details["identity_holds"]
        assert rep.details["max_cell_diameter"] <= rep.details["four_R"]


class TestKeyLemma:
    def test_grid_net(self):
        g = np.array([[x, y] for x in (0, 0.5, 1) for y in (0, 0.5, 1)])
        rep = keylemma_constant(Box((1.0, 1.0)), 0.5, net=g)
        assert rep.details["l"] == 8
        assert rep.lhs == pytest.approx(0.5 * math.sqrt(8 * PI2) / 2)
        assert rep.lhs == pytest.approx(2.2214, abs=1e-4)

    def test_single_point(self):
        rep = keylemma_constant(unit_square(), 2.0, h=0.1)
        assert rep.details["l"] == 0 and rep.lhs == 0.0 and rep.passed

    def test_cube_4d(self):
        rep = keylemma_constant(Box((1.0,) * 4), 0.5)
        assert math.isfinite(rep.lhs) and rep.details["n"] == 4

    def test_polygon_matches_box(self):
        a = keylemma_constant(unit_square(), 0.5, 0.05, h=0.04).lhs
        b = keylemma_constant(Box((1.0, 1.0)), 0.5, 0.05).lhs
        assert a == pytest.approx(b, rel=0.02)

    def test_scale_invariance(self):
        a = keylemma_constant(Box((1.0, 0.7, 0.5)), 0.3, 0.03).lhs
        b = keylemma_constant(Box((2.0, 1.4, 1.0)), 0.6, 0.06).lhs
        assert a == pytest.approx(b, rel=1e-9)


class TestConcentration:
    def test_square(self):
        rep = boundary_concentration_check(unit_square(), 0.25)
        assert rep.lhs == pytest.approx(0.25)
        assert rep.rhs == pytest.approx(math.exp(1 - math.pi * math.sqrt(2) * 0.25))
        assert rep.rhs == pytest.approx(0.8952, abs=1e-4)
        assert rep.passed

    def test_beyond_inradius(self):
        rep = boundary_concentration_check(regular_polygon(5, 1.0), 2.0, h=0.1)
        assert rep.lhs == 0 and rep.passed

    def test_disk(self):
        rep = boundary_concentration_check(regular_polygon(512, 1.0), 0.3, h=0.04)
        assert rep.lhs == pytest.approx(0.49, rel=1e-3)
        assert rep.details["lambda1_dirichlet"] == pytest.approx(5.7832, rel=0.01)
        assert rep.rhs == pytest.approx(1.321, rel=0.01)
        assert rep.passed

    def test_mixed_left_edge(self):
        spec = BoundarySpec.from_edges(unit_square(), [3])
        rep = mixed_concentration_check(unit_square(), spec, 0.4, h=0.04)
        assert rep.lhs == pytest.approx(0.12, abs=1e-12)
        assert rep.provenance["lhs_method"] == "rectangle closed form"
        assert rep.rhs == pytest.approx(0.667, abs=2e-3)
        assert rep.passed

    def test_mixed_far(self):
        spec = BoundarySpec.from_edges(unit_square(), [3])
        rep = mixed_concentration_check(unit_square(), spec, 1.1, h=0.1)
        assert rep.lhs == 0 and rep.passed

    def test_mixed_all_dirichlet_reduces(self):
        a = mixed_concentration_check(unit_square(), ALL_DIRICHLET, 0.25, h=0.05)
        b = boundary_concentration_check(unit_square(), 0.25, h=0.05)
        assert a.lhs == b.lhs
        assert a.rhs == pytest.approx(b.rhs, rel=0.02)

    def test_mixed_monte_carlo(self):
        # Dirichlet on the left side, the top and the upper half of the right
        # side; the far set is a rectangle minus a strip and a quarter disk
        r = 0.2
        spec = BoundarySpec(((0.0, 1.5),))
        rep = mixed_concentration_check(unit_square(), spec, r, h=0.05, mc_samples=400_000)
        assert rep.provenance["lhs_method"] == "monte carlo"
        exact = (1 - r) ** 2 - r * (0.5 - r) - math.pi * r * r / 4
        assert abs(rep.lhs - exact) <= 4 * rep.provenance["standard_error"]
        assert rep.passed

    def test_mixed_needs_dirichlet(self):
        from convexspec.discretize import ALL_NEUMANN
        with pytest.raises(ValueError):
            mixed_concentration_check(unit_square(), ALL_NEUMANN, 0.1)


class TestVolumeComparison:
    def test_center(self):
        rep = bishop_gromov_check(unit_square(), (0.5, 0.5), 0.1, 0.2)
        assert rep.rhs == pytest.approx(0.25, rel=1e-12) and rep.passed

    def test_corner_equality(self):
        rep = bishop_gromov_check(unit_square(), (0, 0), 0.5, 1.0)
        assert rep.rhs == pytest.approx(0.25, rel=1e-12) and rep.passed

    def test_edge(self):
        rep = bishop_gromov_check(unit_square(), (0.5, 0), 0.25, 0.5)
        assert rep.rhs == pytest.approx(0.25, rel=1e-12) and rep.passed

    def test_outside(self):
        with pytest.raises(PointOutside):
            bishop_gromov_check(unit_square(), (2, 2), 0.1, 0.2)

    def test_brunn_minkowski_examples(self):
        sq = unit_square()
        assert brunn_minkowski_check(sq, sq, 0.3).margin == pytest.approx(0, abs=1e-12)
        rep = brunn_minkowski_check(sq, rectangle(0, 0, 3, 3), 0.5)
        assert rep.lhs == pytest.approx(2) and rep.rhs == pytest.approx(2) and rep.passed
        rep = brunn_minkowski_check(rectangle(0, 0, 1, 0.01), rectangle(0, 0, 0.01, 1), 0.5)
        assert rep.lhs == pytest.approx(0.505, rel=1e-3)
        assert rep.rhs == pytest.approx(0.1) and rep.passed


class TestWeylBounds:
    def test_square_k1(self):
        s = analytic.box_spectrum((1, 1), "NEUMANN", 2)
        rep = polya_check(s, 2, 1.0, 1)
        assert rep.lhs == pytest.approx(PI2) and rep.rhs == pytest.approx(4 * math.pi)
        assert rep.passed

    def test_square_sweep(self):
        s = analytic.box_spectrum((1, 1), "NEUMANN", 10_001)
        rep = polya_check(s, 2, 1.0, 10_000)
        assert rep.passed and rep.details["max_polya_ratio"] <= 1
        assert rep.details["polya_violations"] == 0

    def test_disk_sweep(self):
        s = analytic.disk_spectrum(1.0, "NEUMANN", 101)
        rep = polya_check(s, 2, math.pi, 100)
        assert rep.passed and rep.details["max_polya_ratio"] <= 1

    def test_scale_invariance(self):
        a = polya_check(analytic.box_spectrum((1, 0.6), "NEUMANN", 201), 2, 0.6, 200)
        b = polya_check(analytic.box_spectrum((3, 1.8), "NEUMANN", 201), 2, 5.4, 200)
        assert a.details["max_polya_ratio"] == pytest.approx(b.details["max_polya_ratio"], rel=1e-9)

    def test_torus_square(self):
        rep = closed_manifold_check((1, 1), 1)
        assert rep.lhs == pytest.approx(4 * PI2)
        assert rep.rhs == pytest.approx(24 * math.pi)
        assert rep.passed

    def test_torus_cube(self):
        rep = closed_manifold_check((1, 1, 1), 1)
        w = 4 * math.pi / 3
        assert rep.rhs == pytest.approx(21 * w ** (4 / 3) * (2 / w) ** (2 / 3))
        assert rep.passed

    def test_torus_long(self):
        rep = closed_manifold_check((1, 10), 1)
        assert rep.lhs == pytest.approx(4 * PI2 / 100)
        assert rep.margin > 0.9

    def test_torus_dimension_limit(self):
        with pytest.raises(ValueError):
            closed_manifold_check((1,) * 9, 1)


class TestCheng:
    def test_disk(self):
        rep = cheng_ball_check(2, 4.0)
        assert rep.rhs == pytest.approx(5.7832, rel=1e-4)
        assert rep.passed

    def test_three_dim(self):
        rep = cheng_ball_check(3, 4.0)
        assert rep.rhs == pytest.approx(PI2, rel=1e-12)

    def test_scaling(self):
        for n in (2, 3, 5):
            assert cheng_ball_value(n, 2.0) == pytest.approx(cheng_ball_value(n, 1.0) / 4, rel=1e-12)


class TestReports:
    def test_json_fields(self):
        rep = brunn_minkowski_check(unit_square(), rectangle(0, 0, 2, 2), 0.5)
        d = json.loads(rep.to_json())
        assert set(d) >= {"check", "inputs", "lhs", "rhs", "margin", "passed", "tolerance",
                          "index_base", "provenance", "details"}
        assert isinstance(rep, CheckReport) and "brunn_minkowski" in rep.summary()

    @pytest.mark.parametrize("make", [
        lambda: brunn_minkowski_check(unit_square(), rectangle(0, 0, 1, 3), 0.3),
        lambda: bishop_gromov_check(unit_square(), (0.2, 0.7), 0.3, 0.9),
        lambda: boundary_concentration_check(regular_polygon(7, 1.0), 0.2, h=0.1),
        lambda: mixed_concentration_check(unit_square(), BoundarySpec(((0.0, 1.5),)), 0.2, 0.1, 20_000),
        lambda: polya_check(analytic.box_spectrum((1, 2), "NEUMANN", 51), 2, 2.0, 50),
        lambda: closed_manifold_check((1, 2, 3), 30),
        lambda: cheng_ball_check(3, 1.0),
        lambda: dm_ratio(rectangle(0.1, 0.1, 0.8, 0.6), unit_square(), 3, 0.1),
        lambda: dirichlet_monotonicity_check(rectangle(0.1, 0.1, 0.8, 0.6), unit_square(), 3, 0.1),
        lambda: replay_dm_proof(rectangle(0.1, 0.1, 0.8, 0.6), unit_square(), 3, 3.0, 0.1)[1],
        lambda: keylemma_constant(Box((1.0, 2.0, 1.0)), 0.7),
        lambda: certified_neumann_lower_bound(unit_square(), quadrants(), 0.1)[1],
    ])
    def test_rerun_reproduces(self, make):
        rep = make()
        again = roundtrip(rep)
        assert again.check == rep.check and again.passed == rep.passed
        assert np.allclose(np.atleast_1d(again.lhs), np.atleast_1d(rep.lhs), rtol=1e-12, atol=0)
        assert np.allclose(np.atleast_1d(again.rhs), np.atleast_1d(rep.rhs), rtol=1e-12, atol=0)

    def test_rerun_unknown(self):
        with pytest.raises(ValueError):
            rerun({"check": "nope", "inputs": {}})


def test_lp_slab_pair_geometry():
    slab, outer = lp_slab_pair(1, 0.05)
    assert outer.area == pytest.approx(1.0, rel=1e-12)
    assert np.all(np.abs(slab.vertices[:, 1]) <= 0.05 + 1e-12)
    assert slab.diameter == pytest.approx(outer.diameter, rel=1e-9)
    assert polygon_new(slab.vertices) == slab
