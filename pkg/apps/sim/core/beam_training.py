"""
Beam training from implicit CSI.

The receiver only sees the coupling coefficients of the swept beam pairs.
Training picks the M strongest pairs greedily, forms every N_RF-subset of
their beams on each side, estimates the effective channel of every cross
pair straight from the observations and keeps the pair with the best
selection criterion.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np

from ..errors import InvalidInput
from .array_geometry import Codebook
from .numerics import singular_values
from .precoding import (
    Allocation,
    BeamformerSet,
    EffectiveChannelEstimate,
    apply_water_filling,
    assemble_beamformers,
    combined_index,
    combos_of,
    stream_rates,
    whitened_effective_channels,
)
from .sounding import ObservationTensor, pair_powers

__all__ = [
    "BeamPair",
    "CandidateSets",
    "Criterion",
    "EffectiveChannelEstimate",
    "PairSelection",
    "build_candidate_sets",
    "criterion_value",
    "effective_channel_estimate",
    "run_algorithm1",
    "select_best_pair",
    "select_initial_pairs",
]

logger = logging.getLogger(__name__)


class Criterion(str, Enum):
    """Analog selection criterion: equal-power rate or its low-SNR Frobenius surrogate."""

    EIGEN = "eigen"
    FROBENIUS = "fro"


@dataclass(frozen=True, order=True)
class BeamPair:
    n_w: int
    n_f: int


@dataclass(frozen=True)
class CandidateSets:
    selected_pairs: tuple[BeamPair, ...]
    f_combos: tuple[tuple[int, ...], ...]
    w_combos: tuple[tuple[int, ...], ...]

    @property
    def i_f(self) -> int:
        return len(self.f_combos)

    @property
    def i_w(self) -> int:
        return len(self.w_combos)

    def combined_index(self, i_f: int, i_w: int) -> int:
        return combined_index(i_f, i_w, self.i_w)


class PairSelection(NamedTuple):
    i_f: int
    i_w: int
    estimate: EffectiveChannelEstimate
    scores: np.ndarray


def select_initial_pairs(t: ObservationTensor, m: int) -> list[BeamPair]:
    """
    Greedily pick ``m`` beam pairs by received power.

    Once a pair is chosen its transmit beam and its receive beam are both
    excluded from later picks. Ties go to the smallest (n_w, n_f).
    """
    if not 1 <= m <= min(t.n_w, t.n_f):
        raise InvalidInput(
            f"M={m} must lie in [1, {min(t.n_w, t.n_f)}] for a {t.n_w}x{t.n_f} sweep"
        )
    powers = pair_powers(t).astype(float)
    pairs: list[BeamPair] = []
    for _ in range(m):
        n_w, n_f = np.unravel_index(int(np.argmax(powers)), powers.shape)
        pairs.append(BeamPair(n_w=int(n_w), n_f=int(n_f)))
        powers[n_w, :] = -np.inf
        powers[:, n_f] = -np.inf
    return pairs


def build_candidate_sets(pairs: list[BeamPair], n_rf: int) -> CandidateSets:
    """All N_RF-subsets of the selected beams per side, in lexicographic order."""
    if not 1 <= n_rf <= len(pairs):
        raise InvalidInput(f"n_rf={n_rf} must lie in [1, M={len(pairs)}]")
    return CandidateSets(
        selected_pairs=tuple(pairs),
        f_combos=tuple(combos_of([p.n_f for p in pairs], n_rf)),
        w_combos=tuple(combos_of([p.n_w for p in pairs], n_rf)),
    )


def _normalized(t: ObservationTensor) -> np.ndarray:
    return t.y / np.sqrt(t.rho)


def effective_channel_estimate(
    t: ObservationTensor,
    f_cb: Codebook,
    w_cb: Codebook,
    f_combo: tuple[int, ...],
    w_combo: tuple[int, ...],
    index: int = 1,
) -> EffectiveChannelEstimate:
    """
    Whitened effective channel of one analog pair, collected from the sweep.

    Y[k] holds y[w_combo[r], f_combo[c], k] / sqrt(rho), and the estimate is
    (W^H W)^{-1/2} Y[k] (F^H F)^{-1/2}.
    """
    if len(f_combo) != len(w_combo):
        raise InvalidInput("transmit and receive combos must have the same size")
    for combo, size, side in ((f_combo, t.n_f, "transmit"), (w_combo, t.n_w, "receive")):
        if any(not 0 <= b < size for b in combo):
            raise InvalidInput(f"{side} combo {combo} outside the observed codebook")
    matrices = whitened_effective_channels(
        _normalized(t), f_cb, w_cb, [tuple(f_combo)], [tuple(w_combo)]
    )[0, 0]
    return EffectiveChannelEstimate(
        matrices=matrices,
        index=index,
        f_combo=tuple(f_combo),
        w_combo=tuple(w_combo),
    )


def criterion_scores(
    matrices: np.ndarray, mode: Criterion, gamma: float, n_streams: int
) -> np.ndarray:
    """Criterion of a stack (..., K, r, c) of effective channels, summed over K."""
    mode = Criterion(mode)
    if mode is Criterion.FROBENIUS:
        return np.sum(np.abs(matrices) ** 2, axis=(-3, -2, -1))
    if not gamma > 0:
        raise InvalidInput(f"gamma must be > 0 for the eigen criterion, got {gamma}")
    return np.sum(stream_rates(singular_values(matrices), gamma, n_streams), axis=-1)


def criterion_value(
    est: EffectiveChannelEstimate,
    mode: Criterion,
    gamma: float,
    n_streams: int | None = None,
) -> float:
    """Eigen: sum over k and streams of log2(1 + gamma sigma^2). Fro: sum of ||H_E[k]||_F^2."""
    n_s = est.matrices.shape[-1] if n_streams is None else n_streams
    return float(criterion_scores(est.matrices, mode, gamma, n_s))


def select_best_pair(
    cs: CandidateSets,
    t: ObservationTensor,
    f_cb: Codebook,
    w_cb: Codebook,
    mode: Criterion,
    gamma: float,
    n_streams: int,
) -> PairSelection:
    """Score every cross pair of candidates; ties go to the smallest combined index."""
    if cs.i_f == 0 or cs.i_w == 0:
        raise InvalidInput("candidate sets are empty")
    channels = whitened_effective_channels(
        _normalized(t), f_cb, w_cb, cs.f_combos, cs.w_combos
    )
    scores = criterion_scores(channels, mode, gamma, n_streams)
    i_f, i_w = divmod(int(np.argmax(scores)), cs.i_w)
    estimate = EffectiveChannelEstimate(
        matrices=channels[i_f, i_w],
        index=cs.combined_index(i_f, i_w),
        f_combo=cs.f_combos[i_f],
        w_combo=cs.w_combos[i_w],
    )
    return PairSelection(i_f=i_f, i_w=i_w, estimate=estimate, scores=scores)


def run_algorithm1(
    t: ObservationTensor,
    f_cb: Codebook,
    w_cb: Codebook,
    m: int,
    n_rf: int,
    n_streams: int,
    mode: Criterion = Criterion.EIGEN,
    gamma: float = 1.0,
    allocation: Allocation = Allocation.EQUAL,
) -> BeamformerSet:
    """
    Hybrid beamforming from implicit CSI.

    Greedy pair selection, candidate sets, criterion argmax, then the
    digital stages from the SVD of the selected effective channel.
    """
    if not 1 <= n_streams <= n_rf <= m:
        raise InvalidInput(
            f"need 1 <= n_streams <= n_rf <= M, got {n_streams}, {n_rf}, {m}"
        )
    pairs = select_initial_pairs(t, m)
    cs = build_candidate_sets(pairs, n_rf)
    selection = select_best_pair(cs, t, f_cb, w_cb, mode, gamma, n_streams)
    logger.debug(
        f"M={m} {Criterion(mode).value}: {cs.i_f * cs.i_w} candidates, "
        f"picked i={selection.estimate.index} "
        f"f={selection.estimate.f_combo} w={selection.estimate.w_combo}"
    )
    bf = assemble_beamformers(
        selection.estimate, f_cb, w_cb, n_streams, Criterion(mode).value
    )
    if Allocation(allocation) is Allocation.WATERFILL:
        bf = apply_water_filling(bf, gamma)
    return bf
