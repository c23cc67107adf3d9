"""
Tests for the hbf command line.
"""
import numpy as np
import pytest

from apps.cli.main import main

SMALL_CONFIG = """\
n_tx = 8
n_rx = 8
n_subcarriers = 8
snr_db_list = -5, 5
m_list = 2, 3
n_trials = 3
master_seed = 11
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.env"
    path.write_text(SMALL_CONFIG)
    return path


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("HBF_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.delenv("HBF_WORKERS", raising=False)


def test_schematic(capsys):
    assert main(["schematic"]) == 0
    out = capsys.readouterr().out
    assert "rate_multiplexing" in out
    assert "rate_dominant" in out


def test_sweep_is_reproducible(config_file, tmp_path, capsys):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(config_file), "--seed", "42", "--out", str(first)]) == 0
    assert main(["sweep", "--config", str(config_file), "--seed", "42", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert "Results:" in capsys.readouterr().out


def test_sweep_workers_do_not_change_output(config_file, tmp_path):
    serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
    base = ["sweep", "--config", str(config_file)]
    assert main(base + ["--out", str(serial), "--workers", "1"]) == 0
    assert main(base + ["--out", str(parallel), "--workers", "2"]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_sweep_flags_override_config(config_file, tmp_path):
    out = tmp_path / "fro.csv"
    argv = [
        "sweep",
        "--config",
        str(config_file),
        "--snr=0",
        "--M",
        "2",
        "--mode",
        "fro",
        "--trials",
        "2",
        "--noiseless",
        "--out",
        str(out),
        "--json",
        "fro.json",
    ]
    assert main(argv) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 4
    assert lines[-1].startswith("0.0,algorithm1,2,fro,")
    assert (tmp_path / "results" / "fro.json").is_file()


def test_relative_output_goes_to_output_dir(config_file, tmp_path):
    assert main(["sweep", "--config", str(config_file), "--trials", "2", "--out", "rel.csv"]) == 0
    assert (tmp_path / "results" / "rel.csv").is_file()


def test_invalid_config_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.env"
    bad.write_text("n_tx = 8\nn_rx = 8\nn_rf = 3\nm_list = 2\n")
    assert main(["sweep", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 1
    assert "Error:" in capsys.readouterr().err


def test_unknown_preset_reports_error(capsys):
    assert main(["sweep", "--preset", "nope"]) == 1
    assert "Unknown preset" in capsys.readouterr().err


def test_sound_exports(config_file, tmp_path):
    csv_path, npy_path = tmp_path / "obs.csv", tmp_path / "obs.npy"
    argv = [
        "sound",
        "--config",
        str(config_file),
        "--snr",
        "0",
        "--out",
        str(csv_path),
        "--npy",
        str(npy_path),
    ]
    assert main(argv) == 0
    assert len(csv_path.read_text().splitlines()) == 1 + 8 * 8 * 8
    assert np.load(npy_path).shape == (8, 8, 8)


def test_oracle_check(capsys):
    assert main(["oracle-check", "--trials", "3"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
