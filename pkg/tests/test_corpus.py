import numpy as np
import pytest

from convexspec.corpus import (
    ExperimentConfig,
    generate_nested_pair,
    random_partition_sites,
    random_polygon,
    random_radius_sweep,
    rng_for,
)
from convexspec.experiment import run_corpus, run_pair
from convexspec.geom import contains_polygon, inradius


def test_same_seed_same_polygon():
    assert random_polygon(rng_for(3)) == random_polygon(rng_for(3))
    assert random_polygon(rng_for(3)) != random_polygon(rng_for(4))


def test_vertex_range():
    rng = rng_for(0)
    for _ in range(50):
        P = random_polygon(rng, (8, 16))
        assert 3 <= len(P) <= 16
        assert np.all(np.hypot(*P.vertices.T) <= 1 + 1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_nested_pairs(seed):
    inner, outer = generate_nested_pair(seed)
    assert contains_polygon(outer, inner)
    assert inner.area >= 0.01 * outer.area
    again = generate_nested_pair(seed)
    assert again[0] == inner and again[1] == outer


def test_partition_sites_are_interior():
    rng = rng_for(5)
    P = random_polygon(rng)
    sites = random_partition_sites(rng, P, 30)
    assert sites.shape == (30, 2)
    assert np.all(P.signed_distances(sites) < 0)


def test_radius_sweep():
    P = random_polygon(rng_for(6))
    r = random_radius_sweep(P, 5)
    assert len(r) == 5 and r[-1] == pytest.approx(inradius(P))
    assert np.all(np.diff(r) > 0)


@pytest.mark.parametrize("kw", [dict(pairs=0), dict(h=0.0), dict(vertex_range=(2, 5)),
                                dict(vertex_range=(9, 8)), dict(jobs=0), dict(seed=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_config_dict():
    d = ExperimentConfig().to_dict()
    assert d["seed"] == 7 and d["pairs"] == 50 and d["vertex_range"] == [8, 16]


def test_small_corpus_deterministic():
    cfg = ExperimentConfig(seed=11, pairs=2, kmax=3, h=0.1)
    a, b = run_corpus(cfg), run_corpus(cfg)
    assert a.summary() == b.summary()
    assert list(a.ratio_rows()) == list(b.ratio_rows())
    assert a.dirichlet_violations == 0
    assert a.replays_pass and a.identity_holds
    assert a.common_c >= max(max(p.smallest_c) for p in a.pairs)


def test_pair_seed():
    cfg = ExperimentConfig(seed=11, pairs=2, kmax=2, h=0.1)
    p = run_pair(cfg, 1)
    assert p.seed == 12 and p.index == 1
    assert len(p.smallest_c) == 2
