"""
Digital beamforming, throughput evaluation, power allocation and baselines.

Given analog matrices F_P, W_P, the digital stage whitens them and steers
along the singular vectors of the effective channel

    H_E[k] = (W_P^H W_P)^{-1/2} W_P^H H[k] F_P (F_P^H F_P)^{-1/2}

Throughput is always scored against the true channel with the log-det rate
of the received streams.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from ..errors import InvalidInput, TooLarge
from .array_geometry import Codebook
from .channel import ChannelRealization
from .numerics import hermitian_inv_sqrt, singular_values, svd
from .sounding import coupling_tensor

logger = logging.getLogger(__name__)

ORACLE_MAX_COMBINATIONS = 10**6
WATER_LEVEL_ATOL = 1e-10


class Allocation(str, Enum):
    EQUAL = "equal"
    WATERFILL = "waterfill"


@dataclass(frozen=True)
class EffectiveChannelEstimate:
    """Whitened effective channel of one candidate pair, ``matrices[k]`` is N_RF x N_RF."""

    matrices: np.ndarray
    index: int
    f_combo: tuple[int, ...]
    w_combo: tuple[int, ...]


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    water_level: float


@dataclass(frozen=True)
class BeamformerSet:
    """
    Hybrid precoder and combiner.

    ``f_b`` and ``w_b`` have shape (K, N_RF, N_S); ``stream_powers`` holds the
    diagonal of R_s per subcarrier and sums to one on every subcarrier.
    """

    f_p: np.ndarray
    w_p: np.ndarray
    f_b: np.ndarray
    w_b: np.ndarray
    f_beams: tuple[int, ...]
    w_beams: tuple[int, ...]
    mode: str
    effective_channel: np.ndarray
    stream_powers: np.ndarray

    @property
    def n_streams(self) -> int:
        return self.f_b.shape[2]

    @property
    def n_subcarriers(self) -> int:
        return self.f_b.shape[0]

    def precoders(self) -> np.ndarray:
        """F_P F_B[k] for every k, shape (K, N_T, N_S)."""
        return self.f_p[None, :, :] @ self.f_b

    def combiners(self) -> np.ndarray:
        """W_P W_B[k] for every k, shape (K, N_R, N_S)."""
        return self.w_p[None, :, :] @ self.w_b

    def constraint_residuals(self) -> tuple[float, float]:
        """
        Largest violation over k of the transmit-power and combined-noise
        constraints: |tr(F R_s F^H) - tr(R_s)| and ||W^H W - I||_max.
        """
        f = self.precoders()
        w = self.combiners()
        r_s = self.stream_powers
        tx_power = np.einsum("kts,ks,kts->k", f, r_s, f.conj()).real
        tx_res = np.max(np.abs(tx_power - r_s.sum(axis=1)))
        gram = np.conj(np.swapaxes(w, 1, 2)) @ w
        rx_res = np.max(np.abs(gram - np.eye(self.n_streams)[None, :, :]))
        return float(tx_res), float(rx_res)

    def with_stream_powers(self, powers: np.ndarray) -> "BeamformerSet":
        return dataclasses.replace(self, stream_powers=np.asarray(powers, dtype=float))


def combined_index(i_f: int, i_w: int, n_w_combos: int) -> int:
    """1-based combined index of a cross pair from 0-based (i_f, i_w)."""
    return i_f * n_w_combos + i_w + 1


def combos_of(beams: Sequence[int], n_rf: int) -> list[tuple[int, ...]]:
    """All N_RF-subsets of ``beams`` in lexicographic order of sorted indices."""
    return list(combinations(sorted(beams), n_rf))


def whitening(analog: np.ndarray) -> np.ndarray:
    return hermitian_inv_sqrt(analog.conj().T @ analog)


def whitened_effective_channels(
    coupling: np.ndarray,
    f_cb: Codebook,
    w_cb: Codebook,
    f_combos: Sequence[tuple[int, ...]],
    w_combos: Sequence[tuple[int, ...]],
) -> np.ndarray:
    """
    Effective channels for every candidate pair.

    Args:
        coupling: w^H H[k] f for all codebook pairs, shape (N_W, N_F, K)
        f_combos, w_combos: candidate beam subsets of equal size N_RF

    Returns:
        array of shape (I_F, I_W, K, N_RF, N_RF)
    """
    a = np.stack([whitening(f_cb.columns(c)) for c in f_combos])
    b = np.stack([whitening(w_cb.columns(c)) for c in w_combos])
    fc = np.asarray(f_combos)
    wc = np.asarray(w_combos)
    block = coupling[wc[:, None, :, None], fc[None, :, None, :], :]
    y = np.transpose(block, (1, 0, 4, 2, 3))
    return np.einsum("wab,fwkbc,fcd->fwkad", b, y, a, optimize=True)


def stream_rates(sigmas: np.ndarray, gamma: float, n_streams: int) -> np.ndarray:
    """Equal-power rate summed over the N_S strongest streams (last axis)."""
    top = sigmas[..., :n_streams]
    return np.sum(np.log2(1.0 + gamma * top**2), axis=-1)


def equal_power_throughput(sigmas: Sequence[float], gamma: float, n_streams: int) -> float:
    s = np.asarray(sigmas, dtype=float)
    if np.any(np.diff(s) > 0):
        raise InvalidInput("singular values must be sorted in descending order")
    return float(stream_rates(s, gamma, n_streams))


def water_filling(gains: Sequence[float], budget: float = 1.0) -> PowerAllocation:
    """
    Maximize sum log2(1 + g_i p_i) subject to sum p_i = budget, p_i >= 0.

    The water level is bracketed by bisection and then solved exactly on
    the active set.
    """
    g = np.asarray(gains, dtype=float)
    if np.any(g < 0):
        raise InvalidInput("water-filling gains must be non-negative")
    if not np.any(g > 0):
        raise InvalidInput("water-filling needs at least one positive gain")
    if not budget > 0:
        raise InvalidInput(f"power budget must be > 0, got {budget}")

    active = g > 0
    floor = np.full_like(g, np.inf)
    floor[active] = 1.0 / g[active]

    lo, hi = 0.0, budget + float(np.min(floor))
    while hi - lo > WATER_LEVEL_ATOL:
        mu = 0.5 * (lo + hi)
        if np.sum(np.maximum(0.0, mu - floor[active])) > budget:
            hi = mu
        else:
            lo = mu

    filled = floor < 0.5 * (lo + hi)
    mu = (budget + np.sum(floor[filled])) / np.count_nonzero(filled)
    powers = np.where(filled, np.maximum(0.0, mu - floor), 0.0)
    return PowerAllocation(powers=powers, water_level=float(mu))


def water_filled_rate(sigmas: np.ndarray, gamma: float, n_streams: int) -> float:
    """Rate of the N_S strongest streams with water-filled power fractions."""
    gains = gamma * n_streams * np.asarray(sigmas[:n_streams], dtype=float) ** 2
    if not np.any(gains > 0):
        return 0.0
    alloc = water_filling(gains, 1.0)
    return float(np.sum(np.log2(1.0 + gains * alloc.powers)))


def fully_digital_throughput(
    h_k: np.ndarray,
    gamma: float,
    n_streams: int,
    allocation: Allocation = Allocation.EQUAL,
) -> float:
    """Unconstrained SVD transmission over the N_S strongest modes of H[k]."""
    if n_streams > min(h_k.shape):
        raise InvalidInput(f"{n_streams} streams exceed the rank bound of a {h_k.shape} channel")
    sigmas = singular_values(h_k)
    if Allocation(allocation) is Allocation.WATERFILL:
        return water_filled_rate(sigmas, gamma, n_streams)
    return float(stream_rates(sigmas, gamma, n_streams))


def fully_digital_mean_throughput(
    h_stack: np.ndarray,
    gamma: float,
    n_streams: int,
    allocation: Allocation = Allocation.EQUAL,
) -> float:
    sigmas = singular_values(h_stack)
    if Allocation(allocation) is Allocation.WATERFILL:
        rates = [water_filled_rate(s, gamma, n_streams) for s in sigmas]
        return float(np.mean(rates))
    return float(np.mean(stream_rates(sigmas, gamma, n_streams)))


def digital_beamformers(
    estimate: EffectiveChannelEstimate,
    f_p: np.ndarray,
    w_p: np.ndarray,
    n_streams: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Optimal digital stages for fixed analog matrices.

    F_B[k] = (F_P^H F_P)^{-1/2} V[:, :N_S] and W_B[k] = (W_P^H W_P)^{-1/2}
    U[:, :N_S] from the SVD of the estimated effective channel.
    """
    n_rf = f_p.shape[1]
    if n_streams > n_rf:
        raise InvalidInput(f"n_streams={n_streams} exceeds n_rf={n_rf}")
    a = whitening(f_p)
    b = whitening(w_p)

    n_sub = estimate.matrices.shape[0]
    f_b = np.empty((n_sub, n_rf, n_streams), dtype=np.complex128)
    w_b = np.empty((n_sub, w_p.shape[1], n_streams), dtype=np.complex128)
    for k, h_e in enumerate(estimate.matrices):
        factors = svd(h_e)
        f_b[k] = a @ factors.V[:, :n_streams]
        w_b[k] = b @ factors.U[:, :n_streams]
    return f_b, w_b


def assemble_beamformers(
    estimate: EffectiveChannelEstimate,
    f_cb: Codebook,
    w_cb: Codebook,
    n_streams: int,
    mode: str,
) -> BeamformerSet:
    f_p = f_cb.columns(estimate.f_combo)
    w_p = w_cb.columns(estimate.w_combo)
    f_b, w_b = digital_beamformers(estimate, f_p, w_p, n_streams)
    n_sub = estimate.matrices.shape[0]
    return BeamformerSet(
        f_p=f_p,
        w_p=w_p,
        f_b=f_b,
        w_b=w_b,
        f_beams=tuple(estimate.f_combo),
        w_beams=tuple(estimate.w_combo),
        mode=mode,
        effective_channel=estimate.matrices,
        stream_powers=np.full((n_sub, n_streams), 1.0 / n_streams),
    )


def subcarrier_throughputs(
    h_stack: np.ndarray, bf: BeamformerSet, rho: float, noise_var: float
) -> np.ndarray:
    """Log-det rate of every subcarrier, R_z = noise_var W_B^H W_P^H W_P W_B."""
    if not noise_var > 0:
        raise InvalidInput(f"noise_var must be > 0 to score throughput, got {noise_var}")
    if h_stack.shape[0] != bf.n_subcarriers:
        raise InvalidInput(
            f"channel has {h_stack.shape[0]} subcarriers, beamformers {bf.n_subcarriers}"
        )
    f = bf.precoders()
    w = bf.combiners()
    w_h = np.conj(np.swapaxes(w, 1, 2))
    g = w_h @ h_stack @ f
    r_z = noise_var * (w_h @ w)
    g_rs = g * bf.stream_powers[:, None, :]
    signal = g_rs @ np.conj(np.swapaxes(g, 1, 2))
    eye = np.eye(bf.n_streams)[None, :, :]
    _, logdet = np.linalg.slogdet(eye + rho * np.linalg.solve(r_z, signal))
    return logdet / np.log(2.0)


def throughput(
    h_k: np.ndarray,
    bf: BeamformerSet,
    k: int,
    rho: float,
    noise_var: float,
    r_s: np.ndarray | None = None,
) -> float:
    """Rate of subcarrier ``k`` in bit/s/Hz; ``r_s`` overrides the stored stream powers."""
    powers = bf.stream_powers[k] if r_s is None else np.diag(np.asarray(r_s)).real
    single = dataclasses.replace(
        bf,
        f_b=bf.f_b[k : k + 1],
        w_b=bf.w_b[k : k + 1],
        stream_powers=np.asarray(powers, dtype=float)[None, :],
    )
    return float(subcarrier_throughputs(h_k[None, :, :], single, rho, noise_var)[0])


def mean_throughput(
    h_stack: np.ndarray, bf: BeamformerSet, rho: float, noise_var: float
) -> float:
    """Subcarrier-averaged rate, summed in fixed k order."""
    return float(np.mean(subcarrier_throughputs(h_stack, bf, rho, noise_var)))


def apply_water_filling(bf: BeamformerSet, gamma: float) -> BeamformerSet:
    """Re-allocate stream powers per subcarrier from the effective-channel gains."""
    n_s = bf.n_streams
    sigmas = singular_values(bf.effective_channel)[:, :n_s]
    powers = np.full_like(sigmas, 1.0 / n_s)
    for k, s in enumerate(sigmas):
        gains = gamma * n_s * s**2
        if np.any(gains > 0):
            powers[k] = water_filling(gains, 1.0).powers
    return bf.with_stream_powers(powers)


class ExhaustiveSearch:
    """
    Global search over all codebook-constrained analog matrices.

    Singular values of every candidate effective channel are computed once,
    so the argmax can be re-evaluated cheaply for several SNR values.
    """

    def __init__(
        self,
        ch: ChannelRealization,
        f_cb: Codebook,
        w_cb: Codebook,
        n_rf: int,
        max_combinations: int = ORACLE_MAX_COMBINATIONS,
    ):
        total = comb(f_cb.size, n_rf) * comb(w_cb.size, n_rf)
        if total > max_combinations:
            raise TooLarge(
                f"exhaustive search needs {total} combinations, guard is {max_combinations}"
            )
        self.f_cb = f_cb
        self.w_cb = w_cb
        self.n_rf = n_rf
        self.f_combos = combos_of(range(f_cb.size), n_rf)
        self.w_combos = combos_of(range(w_cb.size), n_rf)
        self._coupling = coupling_tensor(ch, f_cb, w_cb)

        chunks = [
            singular_values(
                whitened_effective_channels(self._coupling, f_cb, w_cb, [fc], self.w_combos)
            )
            for fc in self.f_combos
        ]
        self._sigmas = np.concatenate(chunks, axis=0)
        logger.debug(f"Exhaustive search prepared {total} analog combinations")

    @property
    def evaluations(self) -> int:
        return len(self.f_combos) * len(self.w_combos)

    def scores(self, gamma: float, n_streams: int) -> np.ndarray:
        """Sum over k of the equal-power rate, shape (I_F, I_W)."""
        return np.sum(stream_rates(self._sigmas, gamma, n_streams), axis=-1)

    def best(self, gamma: float, n_streams: int) -> BeamformerSet:
        table = self.scores(gamma, n_streams)
        flat = int(np.argmax(table))
        i_f, i_w = divmod(flat, table.shape[1])
        f_combo, w_combo = self.f_combos[i_f], self.w_combos[i_w]
        matrices = whitened_effective_channels(
            self._coupling, self.f_cb, self.w_cb, [f_combo], [w_combo]
        )[0, 0]
        estimate = EffectiveChannelEstimate(
            matrices=matrices,
            index=combined_index(i_f, i_w, len(self.w_combos)),
            f_combo=f_combo,
            w_combo=w_combo,
        )
        return assemble_beamformers(estimate, self.f_cb, self.w_cb, n_streams, "oracle")


def exhaustive_oracle(
    ch: ChannelRealization,
    f_cb: Codebook,
    w_cb: Codebook,
    n_rf: int,
    n_streams: int,
    gamma: float,
    max_combinations: int = ORACLE_MAX_COMBINATIONS,
) -> BeamformerSet:
    """Best codebook-constrained hybrid beamformer for the true channel."""
    search = ExhaustiveSearch(ch, f_cb, w_cb, n_rf, max_combinations)
    return search.best(gamma, n_streams)
