"""
Complex dense linear algebra used by the beamforming stages.

Matrices are plain ``numpy`` arrays of dtype complex128. The helpers here
pin down the conventions the rest of the package relies on: descending
singular values, a fixed singular-vector phase, and whitening factors
(F^H F)^{-1/2} that refuse nearly collinear beam sets.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import InvalidInput, NearSingular

HERMITIAN_ATOL = 1e-10
RELATIVE_EIG_TOL = 1e-10


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``A = U diag(sigmas) V^H`` with descending ``sigmas``."""

    U: np.ndarray
    sigmas: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigmas) @ self.V.conj().T


def as_cmatrix(a: np.ndarray | list, name: str = "matrix") -> np.ndarray:
    """Validate and convert ``a`` to a finite 2-D complex array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInput(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains NaN or Inf entries")
    return arr


def svd(a: np.ndarray | list) -> SvdFactors:
    """
    Thin singular value decomposition with a deterministic phase.

    The phase of each singular pair is rotated so that the largest-magnitude
    entry of the left singular vector is real and non-negative. The same
    rotation is applied to the right vector, so the product is unchanged.
    """
    arr = as_cmatrix(a)
    u, s, vh = linalg.svd(arr, full_matrices=False, lapack_driver="gesdd")
    v = vh.conj().T

    pivots = np.argmax(np.abs(u), axis=0)
    lead = u[pivots, np.arange(u.shape[1])]
    magnitude = np.abs(lead)
    rotation = np.ones_like(lead)
    nonzero = magnitude > 0
    rotation[nonzero] = lead[nonzero].conj() / magnitude[nonzero]

    return SvdFactors(U=u * rotation, sigmas=s, V=v * rotation)


def hermitian_inv_sqrt(a: np.ndarray | list, tol: float | None = None) -> np.ndarray:
    """
    Inverse principal square root of a Hermitian positive-definite matrix.

    Args:
        a: square Hermitian matrix, typically a Gram matrix F^H F of beams
        tol: smallest admissible eigenvalue; defaults to 1e-10 times the
            largest eigenvalue

    Raises:
        InvalidInput: if ``a`` is not square or not Hermitian
        NearSingular: if an eigenvalue falls below ``tol``
    """
    arr = as_cmatrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"matrix must be square, got shape {arr.shape}")
    if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_ATOL:
        raise InvalidInput("matrix is not Hermitian")

    eigvals, eigvecs = linalg.eigh(arr)
    largest = float(eigvals[-1])
    threshold = RELATIVE_EIG_TOL * largest if tol is None else tol
    if largest <= 0 or float(eigvals[0]) < threshold:
        raise NearSingular(
            f"smallest eigenvalue {eigvals[0]:.3e} below tolerance {threshold:.3e}"
        )

    b = (eigvecs * eigvals**-0.5) @ eigvecs.conj().T
    return 0.5 * (b + b.conj().T)


def fro_norm_sq(a: np.ndarray | list) -> float:
    """Squared Frobenius norm, the sum of |a_ij|^2."""
    arr = as_cmatrix(a)
    return float(np.sum(arr.real**2 + arr.imag**2))


def singular_values(stack: np.ndarray) -> np.ndarray:
    """Descending singular values of every matrix in a ``(..., m, n)`` stack."""
    return np.linalg.svd(stack, compute_uv=False)
