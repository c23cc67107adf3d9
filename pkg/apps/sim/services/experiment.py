"""
Monte-Carlo experiment service.

Runs seeded trials of the hybrid beamforming pipeline and aggregates the
subcarrier-averaged throughput per SNR point. Every trial draws its channel
and its sounding noise from streams derived from (master_seed, trial), and
the same channel and noise samples are reused at every SNR point.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.array_geometry import orthogonal_codebook
from ..core.beam_training import Criterion, run_algorithm1
from ..core.channel import (
    ChannelRealization,
    ClusterProfile,
    generate_cluster_channel,
    two_path_scenario,
)
from ..core.precoding import (
    Allocation,
    BeamformerSet,
    ExhaustiveSearch,
    apply_water_filling,
    fully_digital_mean_throughput,
    mean_throughput,
)
from ..core.sounding import ObservationTensor, coupling_tensor, observe, sound_all_pairs
from ..schemas.config import NOISE_VAR, ExperimentConfig
from ..schemas.report import OracleCheckSummary, SchematicResult, SweepReport, SweepRow

logger = logging.getLogger(__name__)

CHANNEL_STREAM = 0
NOISE_STREAM = 1
LADDER_SLACK = 1e-9
SCHEMATIC_SNR_DB = 5.0

# (snr index, method, M, mode)
CurveKey = Tuple[int, str, Optional[int], str]


@dataclass(frozen=True)
class TrialResult:
    trial: int
    rates: Dict[CurveKey, float]


def trial_seed(master_seed: int, trial: int, stream: int) -> int:
    """Independent 32-bit seed for one random stream of one trial."""
    state = np.random.SeedSequence([master_seed, trial, stream]).generate_state(1)
    return int(state[0])


def oracle_enabled(cfg: ExperimentConfig) -> bool:
    if not cfg.include_oracle:
        return False
    total = comb(cfg.n_f, cfg.n_rf) * comb(cfg.n_w, cfg.n_rf)
    if total > cfg.oracle_max_combinations:
        logger.warning(
            f"Skipping exhaustive oracle: {total} combinations exceed "
            f"oracle_max_combinations={cfg.oracle_max_combinations}"
        )
        return False
    return True


def curve_keys(cfg: ExperimentConfig, with_oracle: bool) -> List[CurveKey]:
    """All curves of a sweep in report order."""
    keys: List[CurveKey] = []
    for s in range(len(cfg.snr_db_list)):
        keys.append((s, "fully_digital", None, ""))
        if with_oracle:
            keys.append((s, "oracle", None, ""))
        keys.append((s, "power_only", cfg.n_rf, ""))
        for m in cfg.m_list:
            for mode in cfg.modes:
                keys.append((s, "algorithm1", m, Criterion(mode).value))
    return keys


def draw_channel(cfg: ExperimentConfig, trial: int) -> ChannelRealization:
    return generate_cluster_channel(
        cfg.cluster_profile(),
        cfg.dims,
        trial_seed(cfg.master_seed, trial, CHANNEL_STREAM),
        cfg.spacing_ratio,
    )


def sound_trial(cfg: ExperimentConfig, trial: int, snr_db: float) -> ObservationTensor:
    """Observation tensor a trial of the sweep sees at ``snr_db``."""
    f_cb, w_cb = cfg.codebooks()
    ch = draw_channel(cfg, trial)
    noise_var = 0.0 if cfg.noiseless_observations else NOISE_VAR
    return observe(
        coupling_tensor(ch, f_cb, w_cb),
        cfg.rho(snr_db),
        noise_var,
        trial_seed(cfg.master_seed, trial, NOISE_STREAM),
    )


def _score(
    h: np.ndarray, bf: BeamformerSet, cfg: ExperimentConfig, gamma: float, rho: float
) -> float:
    if Allocation(cfg.allocation) is Allocation.WATERFILL:
        bf = apply_water_filling(bf, gamma)
    return mean_throughput(h, bf, rho, NOISE_VAR)


def run_trial(cfg: ExperimentConfig, trial: int, with_oracle: bool) -> TrialResult:
    """Score every curve of the sweep on one channel realization."""
    f_cb, w_cb = cfg.codebooks()
    ch = draw_channel(cfg, trial)
    h = ch.materialize_all()
    coupling = coupling_tensor(ch, f_cb, w_cb)
    noise_var = 0.0 if cfg.noiseless_observations else NOISE_VAR
    noise_seed = trial_seed(cfg.master_seed, trial, NOISE_STREAM)
    search = ExhaustiveSearch(ch, f_cb, w_cb, cfg.n_rf) if with_oracle else None

    rates: Dict[CurveKey, float] = {}
    for s, snr_db in enumerate(cfg.snr_db_list):
        gamma, rho = cfg.gamma(snr_db), cfg.rho(snr_db)
        t = observe(coupling, rho, noise_var, noise_seed)

        rates[(s, "fully_digital", None, "")] = fully_digital_mean_throughput(
            h, gamma, cfg.n_streams, cfg.normalizer_allocation
        )
        if search is not None:
            oracle = search.best(gamma, cfg.n_streams)
            rates[(s, "oracle", None, "")] = _score(h, oracle, cfg, gamma, rho)

        power_only = run_algorithm1(
            t, f_cb, w_cb, cfg.n_rf, cfg.n_rf, cfg.n_streams, Criterion.EIGEN, gamma
        )
        rates[(s, "power_only", cfg.n_rf, "")] = _score(h, power_only, cfg, gamma, rho)

        for m in cfg.m_list:
            for mode in cfg.modes:
                bf = run_algorithm1(
                    t, f_cb, w_cb, m, cfg.n_rf, cfg.n_streams, mode, gamma
                )
                key = (s, "algorithm1", m, Criterion(mode).value)
                rates[key] = _score(h, bf, cfg, gamma, rho)

    logger.debug(f"Trial {trial} done")
    return TrialResult(trial=trial, rates=rates)


def run_trials(
    cfg: ExperimentConfig, with_oracle: bool, workers: int = 1
) -> List[TrialResult]:
    """Run all trials, in worker processes when ``workers`` > 1, sorted by trial."""
    task = partial(run_trial, cfg, with_oracle=with_oracle)
    trials = range(cfg.n_trials)
    if workers <= 1:
        results = [task(trial) for trial in trials]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, trials))
    return sorted(results, key=lambda r: r.trial)


def aggregate(
    cfg: ExperimentConfig, results: List[TrialResult], keys: List[CurveKey]
) -> List[SweepRow]:
    """Mean, standard error and fully digital normalization per curve point."""
    ordered = sorted(results, key=lambda r: r.trial)
    n = len(ordered)
    means: Dict[CurveKey, float] = {}
    rows: List[SweepRow] = []
    for key in keys:
        values = np.array([r.rates[key] for r in ordered])
        means[key] = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / np.sqrt(n)) if n > 1 else 0.0

        s, method, m, mode = key
        reference = means[(s, "fully_digital", None, "")]
        normalized = means[key] / reference if reference > 0 else 0.0
        rows.append(
            SweepRow(
                snr_db=cfg.snr_db_list[s],
                method=method,
                M=m,
                mode=mode,
                mean_rate_bps_hz=means[key],
                normalized_rate=normalized,
                n_trials=n,
                stderr=stderr,
            )
        )
    return rows


def run_sweep(cfg: ExperimentConfig, workers: int = 1) -> SweepReport:
    """Monte-Carlo sweep over the configured SNR points, M values and criteria."""
    with_oracle = oracle_enabled(cfg)
    logger.info(
        f"Starting sweep: {cfg.n_trials} trials, {len(cfg.snr_db_list)} SNR points, "
        f"{workers} worker(s), oracle {'on' if with_oracle else 'off'}"
    )
    start = time.perf_counter()
    results = run_trials(cfg, with_oracle, workers)
    rows = aggregate(cfg, results, curve_keys(cfg, with_oracle))
    logger.info(f"Sweep finished in {time.perf_counter() - start:.2f}s, {len(rows)} rows")
    return SweepReport(rows=rows, config=cfg, master_seed=cfg.master_seed)


def run_schematic_example() -> SchematicResult:
    """
    Two-path example with 8-beam codebooks at 5 dB.

    Compares the two strongest beam pairs (one per path) against the pick of
    the selection criterion among the four strongest pairs.
    """
    ch = two_path_scenario()
    f_cb = w_cb = orthogonal_codebook(8)
    n_streams = 2
    gamma = 10.0 ** (SCHEMATIC_SNR_DB / 10.0)
    rho = gamma * n_streams * NOISE_VAR

    t = sound_all_pairs(ch, f_cb, w_cb, rho)
    h = ch.materialize_all()
    mux = run_algorithm1(t, f_cb, w_cb, 2, 2, n_streams, Criterion.EIGEN, gamma)
    dom = run_algorithm1(t, f_cb, w_cb, 4, 2, n_streams, Criterion.EIGEN, gamma)
    return SchematicResult(
        snr_db=SCHEMATIC_SNR_DB,
        rate_multiplexing=mean_throughput(h, mux, rho, NOISE_VAR),
        rate_dominant=mean_throughput(h, dom, rho, NOISE_VAR),
        multiplexing_beams=(mux.f_beams, mux.w_beams),
        dominant_beams=(dom.f_beams, dom.w_beams),
    )


def run_oracle_check(
    n_trials: int = 100,
    seed: int = 0,
    snr_db: float = 10.0,
    n_antennas: int = 8,
    n_subcarriers: int = 16,
) -> OracleCheckSummary:
    """
    Audit on small noiseless instances with N_RF = N_S = 2.

    With every beam retained the algorithm must reproduce the exhaustive
    oracle, and fully digital >= oracle >= M=3 >= M=2 must hold per trial.
    """
    f_cb = w_cb = orthogonal_codebook(n_antennas)
    profile = ClusterProfile()
    n_rf = n_streams = 2
    gamma = 10.0 ** (snr_db / 10.0)
    rho = gamma * n_streams * NOISE_VAR

    matching, violations, max_gap = 0, 0, 0.0
    for trial in range(n_trials):
        ch = generate_cluster_channel(
            profile,
            (n_antennas, n_antennas, n_subcarriers),
            trial_seed(seed, trial, CHANNEL_STREAM),
        )
        h = ch.materialize_all()
        t = observe(coupling_tensor(ch, f_cb, w_cb), rho)

        oracle = ExhaustiveSearch(ch, f_cb, w_cb, n_rf).best(gamma, n_streams)
        rates = {"oracle": mean_throughput(h, oracle, rho, NOISE_VAR)}
        for m in (n_antennas, 3, 2):
            bf = run_algorithm1(t, f_cb, w_cb, m, n_rf, n_streams, Criterion.EIGEN, gamma)
            rates[m] = mean_throughput(h, bf, rho, NOISE_VAR)
            if m == n_antennas and (bf.f_beams, bf.w_beams) == (
                oracle.f_beams,
                oracle.w_beams,
            ):
                matching += 1
        digital = fully_digital_mean_throughput(h, gamma, n_streams)

        max_gap = max(max_gap, abs(rates["oracle"] - rates[n_antennas]))
        ladder = (digital, rates["oracle"], rates[3], rates[2])
        if any(hi + LADDER_SLACK < lo for hi, lo in zip(ladder, ladder[1:])):
            violations += 1
            logger.debug(f"Trial {trial} breaks the dominance ladder: {ladder}")

    summary = OracleCheckSummary(
        n_trials=n_trials,
        matching_selections=matching,
        max_rate_gap=max_gap,
        ladder_violations=violations,
    )
    logger.info(
        f"Oracle check: {matching}/{n_trials} matching, max gap {max_gap:.3e}, "
        f"{violations} ladder violations"
    )
    return summary
