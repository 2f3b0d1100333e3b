import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hessquot.errors import InvalidInputError, NumericalError
from hessquot import spectral
from hessquot.spectral import eigen_sym


def test_identity():
    d = eigen_sym(np.eye(3))
    np.testing.assert_array_equal(d.eigenvalues, [1, 1, 1])
    assert d.sweeps == 0


def test_two_by_two():
    # characteristic polynomial (2-t)^2 - 1 has roots 3 and 1
    d = eigen_sym([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(d.eigenvalues, [3.0, 1.0], rtol=1e-14)
    np.testing.assert_allclose(np.abs(d.eigenvectors), np.full((2, 2), 2**-0.5), rtol=1e-14)


def test_diagonal_gives_permutation():
    d = eigen_sym(np.diag([-2.0, 5.0]))
    np.testing.assert_array_equal(d.eigenvalues, [5.0, -2.0])
    np.testing.assert_array_equal(np.abs(d.eigenvectors), [[0, 1], [1, 0]])


def test_zero_and_one_by_one():
    np.testing.assert_array_equal(eigen_sym(np.zeros((3, 3))).eigenvalues, [0, 0, 0])
    np.testing.assert_array_equal(eigen_sym([[4.0]]).eigenvalues, [4.0])


def test_bad_input():
    with pytest.raises(InvalidInputError):
        eigen_sym(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        eigen_sym(np.eye(2), tol=0)


def test_sweep_cap_reports_residual(monkeypatch):
    monkeypatch.setattr(spectral, "MAX_SWEEPS", 1)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((6, 6))
    with pytest.raises(NumericalError, match="residual"):
        eigen_sym(a + a.T)


def test_deterministic():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((7, 7))
    d1, d2 = eigen_sym(a + a.T), eigen_sym(a + a.T)
    np.testing.assert_array_equal(d1.eigenvectors, d2.eigenvectors)


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31 - 1), st.sampled_from([1e-3, 1.0, 1e3]))
def test_decomposition_invariants(dim, seed, scale):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) * scale
    M = a + a.T
    d = eigen_sym(M)
    lam, Q = d.eigenvalues, d.eigenvectors
    norm = np.abs(M).sum(axis=1).max()
    assert np.all(np.diff(lam) <= 0)
    assert np.abs(Q.T @ np.diag(lam) @ Q - M).max() <= 1e-10 * norm
    assert np.abs(Q @ Q.T - np.eye(dim)).max() <= 1e-10
    # independent LAPACK oracle, trace and determinant
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(M)[::-1], atol=1e-10 * norm)
    assert lam.sum() == pytest.approx(np.trace(M), rel=1e-9, abs=1e-9 * norm)
    assert np.prod(lam) == pytest.approx(np.linalg.det(M), rel=1e-9, abs=1e-9 * norm**dim)


def test_clustered_spectrum():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((6, 6)))
    lam = np.array([1.0, 1.0, 1.0 + 1e-9, 2.0, 2.0, -3.0])
    M = q @ np.diag(lam) @ q.T
    np.testing.assert_allclose(eigen_sym(M).eigenvalues, np.sort(lam)[::-1], atol=1e-12)
