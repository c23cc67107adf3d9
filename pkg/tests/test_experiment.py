"""
Tests for the Monte-Carlo experiment service.
"""
import numpy as np
import pytest

from apps.sim.core.beam_training import Criterion, run_algorithm1
from apps.sim.core.precoding import (
    Allocation,
    fully_digital_mean_throughput,
    mean_throughput,
)
from apps.sim.schemas.config import NOISE_VAR
from apps.sim.services.experiment import (
    curve_keys,
    draw_channel,
    oracle_enabled,
    run_oracle_check,
    run_schematic_example,
    run_sweep,
    run_trial,
    sound_trial,
    trial_seed,
)
from apps.sim.utils.config_loader import build_config, load_config


@pytest.fixture
def noiseless_config(small_config):
    return small_config.model_copy(update={"noiseless_observations": True})


def test_trial_seeds_are_distinct():
    seeds = {trial_seed(42, trial, stream) for trial in range(50) for stream in (0, 1)}
    assert len(seeds) == 100
    assert trial_seed(42, 3, 0) == trial_seed(42, 3, 0)


class TestSchematic:
    def test_rates(self):
        result = run_schematic_example()
        assert 1.5 < result.rate_multiplexing < 1.7
        assert 1.6 < result.rate_dominant < 1.7
        assert result.rate_dominant > result.rate_multiplexing

    def test_beams(self):
        result = run_schematic_example()
        assert result.multiplexing_beams == ((4, 6), (3, 4))
        assert result.dominant_beams == ((4, 5), (4, 5))

    def test_fully_digital_bound(self, two_path):
        result = run_schematic_example()
        gamma = 10.0 ** (result.snr_db / 10.0)
        bound = fully_digital_mean_throughput(two_path.materialize_all(), gamma, 2)
        assert 2.2 < bound < 2.4
        assert result.rate_dominant <= bound + 1e-9


class TestSweep:
    def test_row_layout(self, small_config):
        report = run_sweep(small_config)
        keys = curve_keys(small_config, oracle_enabled(small_config))
        assert len(report.rows) == len(keys)
        assert [r.method for r in report.rows[:4]] == [
            "fully_digital",
            "oracle",
            "power_only",
            "algorithm1",
        ]
        assert all(r.n_trials == 3 for r in report.rows)
        assert report.master_seed == 11

    def test_deterministic(self, small_config):
        assert run_sweep(small_config).rows == run_sweep(small_config).rows

    def test_parallel_trials_match_serial(self, small_config):
        serial = run_sweep(small_config, workers=1)
        parallel = run_sweep(small_config, workers=2)
        assert serial.rows == parallel.rows

    def test_seed_changes_results(self, small_config):
        other = small_config.model_copy(update={"master_seed": 12})
        assert run_sweep(small_config).rows != run_sweep(other).rows

    def test_normalized_rates(self, small_config):
        for row in run_sweep(small_config).rows:
            if row.method == "fully_digital":
                assert row.normalized_rate == pytest.approx(1.0)
            else:
                assert 0.0 < row.normalized_rate <= 1.0 + 1e-9

    def test_rates_grow_with_snr(self, noiseless_config):
        report = run_sweep(noiseless_config)
        for method, m, mode in [
            ("fully_digital", None, ""),
            ("oracle", None, ""),
            ("power_only", 2, ""),
            ("algorithm1", 2, "eigen"),
            ("algorithm1", 3, "eigen"),
        ]:
            rates = [r.mean_rate_bps_hz for r in report.select(method, m, mode)]
            assert len(rates) == 2
            assert rates[1] >= rates[0]

    def test_oracle_skipped_over_budget(self, small_config, caplog):
        cfg = small_config.model_copy(update={"oracle_max_combinations": 10})
        assert not oracle_enabled(cfg)
        assert "Skipping exhaustive oracle" in caplog.text
        assert not run_sweep(cfg).select("oracle")

    def test_water_filling_rows(self, noiseless_config):
        equal = run_sweep(noiseless_config)
        filled = run_sweep(noiseless_config.model_copy(update={"allocation": Allocation.WATERFILL}))
        for a, b in zip(equal.select("oracle"), filled.select("oracle")):
            assert b.mean_rate_bps_hz >= a.mean_rate_bps_hz - 1e-9


def test_dominance_ladder_per_trial(noiseless_config):
    for trial in range(3):
        rates = run_trial(noiseless_config, trial, with_oracle=True).rates
        for s in range(len(noiseless_config.snr_db_list)):
            ladder = [
                rates[(s, "fully_digital", None, "")],
                rates[(s, "oracle", None, "")],
                rates[(s, "algorithm1", 3, "eigen")],
                rates[(s, "algorithm1", 2, "eigen")],
            ]
            assert all(hi >= lo - 1e-9 for hi, lo in zip(ladder, ladder[1:]))


def test_sound_trial_scales_with_snr(small_config):
    low = sound_trial(small_config, 0, -5.0)
    high = sound_trial(small_config, 0, 5.0)
    assert low.y.shape == (8, 8, 8)
    assert high.rho == pytest.approx(10 * low.rho)
    assert not np.allclose(low.y, high.y)


def test_oracle_check_small():
    summary = run_oracle_check(n_trials=10, seed=3)
    assert summary.passed


@pytest.mark.slow
def test_oracle_check_full():
    summary = run_oracle_check(n_trials=100, seed=0)
    assert summary.matching_selections == 100
    assert summary.max_rate_gap < 1e-9
    assert summary.ladder_violations == 0


@pytest.mark.slow
def test_desk_dominance_ladder():
    cfg = load_config(
        preset="desk",
        overrides={"n_trials": 100, "noiseless_observations": True, "snr_db_list": [0.0]},
    )
    for trial in range(cfg.n_trials):
        rates = run_trial(cfg, trial, with_oracle=True).rates
        ladder = [
            rates[(0, "fully_digital", None, "")],
            rates[(0, "oracle", None, "")],
            rates[(0, "algorithm1", 3, "eigen")],
            rates[(0, "algorithm1", 2, "eigen")],
        ]
        assert all(hi >= lo - 1e-9 for hi, lo in zip(ladder, ladder[1:]))


@pytest.mark.slow
def test_criteria_agree_at_low_snr():
    cfg = load_config(preset="desk", overrides={"n_trials": 100})
    f_cb, w_cb = cfg.codebooks()
    gamma, rho = cfg.gamma(0.0), cfg.rho(0.0)
    same, eigen_rates, fro_rates = 0, [], []
    for trial in range(cfg.n_trials):
        h = draw_channel(cfg, trial).materialize_all()
        t = sound_trial(cfg, trial, 0.0)
        eigen = run_algorithm1(t, f_cb, w_cb, 3, 2, 2, Criterion.EIGEN, gamma)
        fro = run_algorithm1(t, f_cb, w_cb, 3, 2, 2, Criterion.FROBENIUS, gamma)
        same += (eigen.f_beams, eigen.w_beams) == (fro.f_beams, fro.w_beams)
        eigen_rates.append(mean_throughput(h, eigen, rho, NOISE_VAR))
        fro_rates.append(mean_throughput(h, fro, rho, NOISE_VAR))
    gap = abs(np.mean(eigen_rates) - np.mean(fro_rates)) / np.mean(eigen_rates)
    assert gap < 0.02
    assert same >= 90


@pytest.mark.slow
def test_fully_digital_normalizer_grows_with_snr():
    cfg = load_config(
        preset="paper-fig3",
        overrides={"n_trials": 5, "snr_db_list": [-10.0, 0.0, 10.0], "m_list": [2]},
    )
    report = run_sweep(cfg)
    rates = [r.mean_rate_bps_hz for r in report.select("fully_digital")]
    assert 0 < rates[0] < rates[1] < rates[2]


def test_build_config_from_values():
    cfg = build_config({"n_tx": "8", "n_rx": "8", "snr_db_list": "0"})
    assert cfg.snr_db_list == [0.0]
