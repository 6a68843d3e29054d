import math

import numpy as np
import pytest
import scipy.sparse as sp

from convexspec.analytic import box_spectrum
from convexspec.discretize import ALL_DIRICHLET, ALL_NEUMANN, BoundarySpec, assemble, reduce_system, tag_boundary, triangulate
from convexspec.eigsolve import NoConvergence, Spectrum, residuals, smallest_eigs
from convexspec.geom import unit_square

PI2 = math.pi ** 2


def system(spec, h, P=None):
    P = P or unit_square()
    mesh = tag_boundary(triangulate(P, h), spec)
    K, M = assemble(mesh)
    return reduce_system(K, M, mesh)[:2]


@pytest.fixture(scope="module")
def neumann_002():
    return system(ALL_NEUMANN, 0.02)


def test_square_neumann(neumann_002):
    K, M = neumann_002
    s = smallest_eigs(K, M, 6, keep_vectors=True)
    expected = np.array([0, PI2, PI2, 2 * PI2, 4 * PI2, 4 * PI2])
    assert abs(s.eigenvalues[0]) <= 1e-8
    assert np.allclose(s.eigenvalues[1:], expected[1:], rtol=0.01)
    assert s.eigenvalues[0] <= 1e-8 * s.eigenvalues[1]
    assert s.index_base == 0 and s.eig(1) == s.eigenvalues[1]


def test_square_neumann_ten(neumann_002):
    K, M = neumann_002
    s = smallest_eigs(K, M, 11)
    exact = box_spectrum((1, 1), "NEUMANN", 11).eigenvalues
    assert np.allclose(s.eigenvalues[1:], exact[1:], rtol=0.01)


def test_square_dirichlet():
    s = smallest_eigs(*system(ALL_DIRICHLET, 0.02), 1, bc_mode="DIRICHLET")
    assert s.index_base == 1
    assert s.eig(1) == pytest.approx(2 * PI2, rel=0.01)


def test_square_mixed():
    spec = BoundarySpec.from_edges(unit_square(), [3])
    s = smallest_eigs(*system(spec, 0.02), 1, bc_mode="MIXED")
    assert s.eig(1) == pytest.approx(5 * PI2 / 4, rel=0.01)


def test_count_stability(neumann_002):
    K, M = neumann_002
    a = smallest_eigs(K, M, 8).eigenvalues
    b = smallest_eigs(K, M, 10).eigenvalues[:8]
    assert np.allclose(a[1:], b[1:], rtol=1e-10)
    assert abs(a[0] - b[0]) <= 1e-9


def test_orthogonality_and_residuals(neumann_002):
    K, M = neumann_002
    s = smallest_eigs(K, M, 6, keep_vectors=True)
    G = s.vectors.T @ (M @ s.vectors)
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() <= 1e-8 * np.abs(np.diag(G)).max()
    assert np.all(residuals(K, M, s.eigenvalues, s.vectors) <= 1e-9)
    assert np.all(s.residuals <= 1e-9)


def test_multiplicity(neumann_002):
    s = smallest_eigs(*neumann_002, 3)
    assert abs(s.eigenvalues[1] - s.eigenvalues[2]) <= 1e-3 * s.eigenvalues[2]


def test_convergence_order():
    errs = []
    for h in (0.04, 0.02):
        errs.append(smallest_eigs(*system(ALL_NEUMANN, h), 2).eig(1) - PI2)
    assert errs[0] > 0 and errs[1] > 0
    assert errs[0] / errs[1] >= 3.5


@pytest.mark.parametrize("h", [0.1, 0.05, 0.025])
def test_galerkin_upper_bound(h):
    s = smallest_eigs(*system(ALL_DIRICHLET, h), 4, bc_mode="DIRICHLET")
    exact = box_spectrum((1, 1), "DIRICHLET", 4).eigenvalues
    assert np.all(s.eigenvalues >= exact * (1 - 1e-12))


def test_dense_path_matches_sparse():
    K, M = system(ALL_NEUMANN, 0.1)
    dense = smallest_eigs(K, M, 5)
    assert K.shape[0] > 200
    K2 = sp.csr_matrix(K.toarray()[:150, :150])
    M2 = sp.csr_matrix(M.toarray()[:150, :150])
    small = smallest_eigs(K2, M2, 5)
    assert len(small) == 5 and len(dense) == 5


def test_deterministic(neumann_002):
    a = smallest_eigs(*neumann_002, 6).eigenvalues
    b = smallest_eigs(*neumann_002, 6).eigenvalues
    assert np.array_equal(a, b)


def test_bad_count(neumann_002):
    with pytest.raises(ValueError):
        smallest_eigs(*neumann_002, 0)


def test_no_convergence_carries_fields():
    err = NoConvergence(10, 1e-3)
    assert err.iterations == 10 and err.worst_residual == 1e-3


def test_spectrum_metadata():
    s = Spectrum(np.array([1.0, 2.0]), "DIRICHLET", 1)
    assert s.max_index == 2
    with pytest.raises(IndexError):
        s.eig(0)
    with pytest.raises(ValueError):
        Spectrum(np.array([1.0]), "BOGUS", 0)
    assert s.to_dict()["eigenvalues"] == [1.0, 2.0]
