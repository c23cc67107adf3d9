"""
Beam sounding: the implicit-CSI observation tensor.

Every codebook pair (w, f) is trained with a unit-modulus pilot. After
correlating with the pilot the receiver holds

    y[n_w][n_f][k] = sqrt(rho) * w^H H[k] f + z,    z ~ CN(0, noise_var)

The noise of each pair comes from its own stream seeded by
(seed, n_w, n_f), so the tensor does not depend on the order in which pairs
are evaluated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput
from .array_geometry import Codebook
from .channel import ChannelRealization

PILOT_MODULUS_ATOL = 1e-9


@dataclass(frozen=True)
class ObservationTensor:
    """Coupling coefficients indexed ``y[n_w, n_f, k]``."""

    y: np.ndarray
    rho: float
    noise_var: float

    @property
    def n_w(self) -> int:
        return self.y.shape[0]

    @property
    def n_f(self) -> int:
        return self.y.shape[1]

    @property
    def n_subcarriers(self) -> int:
        return self.y.shape[2]

    def scaled(self, factor: float) -> "ObservationTensor":
        return ObservationTensor(y=self.y * factor, rho=self.rho, noise_var=self.noise_var)


def coupling_tensor(
    ch: ChannelRealization, f_cb: Codebook, w_cb: Codebook
) -> np.ndarray:
    """Noiseless couplings w^H H[k] f for every beam pair, shape (N_W, N_F, K)."""
    if f_cb.n_antennas != ch.n_tx:
        raise InvalidInput(
            f"transmit codebook has {f_cb.n_antennas} antennas, channel has {ch.n_tx}"
        )
    if w_cb.n_antennas != ch.n_rx:
        raise InvalidInput(
            f"receive codebook has {w_cb.n_antennas} antennas, channel has {ch.n_rx}"
        )
    h = ch.materialize_all()
    coupled = w_cb.matrix.conj().T[None, :, :] @ h @ f_cb.matrix[None, :, :]
    return np.ascontiguousarray(np.moveaxis(coupled, 0, -1))


def _pair_noise(seed: int, n_w: int, n_f: int, n_subcarriers: int, noise_var: float):
    rng = np.random.default_rng([seed, n_w, n_f])
    scale = np.sqrt(noise_var / 2.0)
    return scale * (
        rng.standard_normal(n_subcarriers) + 1j * rng.standard_normal(n_subcarriers)
    )


def observe(
    coupling: np.ndarray,
    rho: float,
    noise_var: float = 0.0,
    seed: int = 0,
    pilot: np.ndarray | None = None,
) -> ObservationTensor:
    """
    Sound precomputed couplings at received power ``rho``.

    The received symbol is sqrt(rho) c s[k] + z; it is correlated with s[k],
    so y = sqrt(rho) c + z conj(s[k]) for unit-modulus pilots.
    """
    if not rho > 0:
        raise InvalidInput(f"rho must be > 0, got {rho}")
    if not noise_var >= 0:
        raise InvalidInput(f"noise_var must be >= 0, got {noise_var}")
    if seed < 0:
        raise InvalidInput(f"seed must be non-negative, got {seed}")

    n_w, n_f, n_subcarriers = coupling.shape
    s = np.ones(n_subcarriers, dtype=np.complex128) if pilot is None else np.asarray(
        pilot, dtype=np.complex128
    )
    if s.shape != (n_subcarriers,):
        raise InvalidInput(f"pilot must have {n_subcarriers} symbols, got {s.shape}")
    if np.max(np.abs(np.abs(s) - 1.0)) > PILOT_MODULUS_ATOL:
        raise InvalidInput("pilot symbols must have unit modulus")

    received = np.sqrt(rho) * coupling
    if pilot is not None:
        received = received * s
    if noise_var > 0:
        noise = np.empty_like(received)
        for i in range(n_w):
            for j in range(n_f):
                noise[i, j] = _pair_noise(seed, i, j, n_subcarriers, noise_var)
        received = received + noise

    y = received if pilot is None else received * s.conj()
    return ObservationTensor(y=y, rho=float(rho), noise_var=float(noise_var))


def sound_all_pairs(
    ch: ChannelRealization,
    f_cb: Codebook,
    w_cb: Codebook,
    rho: float,
    noise_var: float = 0.0,
    seed: int = 0,
    pilot: np.ndarray | None = None,
) -> ObservationTensor:
    """Exhaustive sweep of all N_W x N_F beam pairs over K subcarriers."""
    return observe(coupling_tensor(ch, f_cb, w_cb), rho, noise_var, seed, pilot)


def pair_powers(t: ObservationTensor) -> np.ndarray:
    """Received power summed over subcarriers for every pair, shape (N_W, N_F)."""
    return np.sum(t.y.real**2 + t.y.imag**2, axis=-1)


def pair_power(t: ObservationTensor, n_w: int, n_f: int) -> float:
    if not (0 <= n_w < t.n_w and 0 <= n_f < t.n_f):
        raise InvalidInput(f"beam pair ({n_w}, {n_f}) outside the observed codebooks")
    row = t.y[n_w, n_f]
    return float(np.sum(row.real**2 + row.imag**2))
