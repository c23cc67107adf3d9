"""
Tests for the complex linear algebra helpers.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from apps.sim.core.numerics import (
    as_cmatrix,
    fro_norm_sq,
    hermitian_inv_sqrt,
    singular_values,
    svd,
)
from apps.sim.errors import InvalidInput, NearSingular


class TestSvd:
    def test_diagonal_matrix(self):
        f = svd(np.diag([3.0, 1.0]).astype(complex))
        assert_allclose(f.sigmas, [3.0, 1.0])
        assert_allclose(np.abs(f.U), np.eye(2), atol=1e-12)

    def test_reconstruction_and_order(self, cmatrix):
        a = cmatrix(5, 3)
        f = svd(a)
        assert np.all(np.diff(f.sigmas) <= 0)
        assert_allclose(f.reconstruct(), a, atol=1e-10)

    def test_factors_are_orthonormal(self, cmatrix):
        f = svd(cmatrix(5, 3))
        assert_allclose(f.U.conj().T @ f.U, np.eye(f.U.shape[1]), atol=1e-12)
        assert_allclose(f.V.conj().T @ f.V, np.eye(f.V.shape[1]), atol=1e-12)

    def test_squared_sigmas_are_gram_eigenvalues(self, cmatrix):
        a = cmatrix(3, 2)
        eigvals = np.linalg.eigvalsh(a.conj().T @ a)[::-1]
        assert_allclose(svd(a).sigmas**2, eigvals, rtol=1e-10)

    def test_rank_deficient(self, cmatrix):
        a = cmatrix(3, 2) @ cmatrix(2, 3)
        f = svd(a)
        assert f.sigmas[-1] < 1e-12 * f.sigmas[0]
        assert_allclose(f.reconstruct(), a, atol=1e-10)

    def test_phase_convention(self, cmatrix):
        f = svd(cmatrix(4, 4))
        for col in f.U.T:
            lead = col[np.argmax(np.abs(col))]
            assert abs(lead.imag) < 1e-12
            assert lead.real >= 0

    def test_same_input_same_factors(self, cmatrix):
        a = cmatrix(3, 3)
        first, second = svd(a), svd(a.copy())
        assert np.array_equal(first.U, second.U)
        assert np.array_equal(first.V, second.V)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInput):
            svd([[1.0, np.nan], [0.0, 1.0]])

    def test_rejects_vectors(self):
        with pytest.raises(InvalidInput):
            as_cmatrix(np.ones(3))


class TestHermitianInvSqrt:
    def test_diagonal(self):
        assert_allclose(hermitian_inv_sqrt(np.diag([4.0, 1.0])), np.diag([0.5, 1.0]))

    def test_inverse_square(self, cmatrix):
        a = cmatrix(6, 3)
        gram = a.conj().T @ a
        b = hermitian_inv_sqrt(gram)
        assert_allclose(b @ gram @ b, np.eye(3), atol=1e-10)
        assert_allclose(b, b.conj().T, atol=1e-14)

    def test_squares_to_inverse(self, cmatrix):
        a = cmatrix(5, 4)
        gram = a.conj().T @ a
        b = hermitian_inv_sqrt(gram)
        assert_allclose(b @ b, np.linalg.inv(gram), atol=1e-8)

    def test_matches_eigendecomposition(self, cmatrix):
        a = cmatrix(4, 3)
        gram = a.conj().T @ a
        w, v = np.linalg.eigh(gram)
        expected = v @ np.diag(w**-0.5) @ v.conj().T
        assert_allclose(hermitian_inv_sqrt(gram), expected, atol=1e-10)

    def test_collinear_columns(self):
        v = np.ones((4, 1)) / 2.0
        gram = np.hstack([v, v]).conj().T @ np.hstack([v, v])
        with pytest.raises(NearSingular):
            hermitian_inv_sqrt(gram)

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInput):
            hermitian_inv_sqrt([[1.0, 2.0], [0.0, 1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInput):
            hermitian_inv_sqrt(np.ones((2, 3)))

    def test_explicit_tolerance(self):
        with pytest.raises(NearSingular):
            hermitian_inv_sqrt(np.diag([1.0, 1e-3]), tol=1e-2)


def test_fro_norm_sq():
    assert fro_norm_sq(np.eye(2)) == pytest.approx(2.0)
    assert fro_norm_sq([[1j, 2.0]]) == pytest.approx(5.0)


def test_singular_values_stack(cmatrix):
    stack = np.stack([cmatrix(3, 2) for _ in range(4)])
    got = singular_values(stack)
    assert got.shape == (4, 2)
    for a, s in zip(stack, got):
        assert_allclose(s, np.linalg.svd(a, compute_uv=False))
