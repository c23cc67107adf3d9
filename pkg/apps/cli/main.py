"""
Command line for the hybrid beamforming simulator.

Subcommands
- sweep: Monte-Carlo sweep written as CSV (and optionally JSON)
- schematic: rates of the two-path example
- oracle-check: small-size audit against the exhaustive oracle
- sound: dump the observation tensor of one trial

Environment variables
- HBF_LOG_LEVEL: logging level (default: INFO)
- HBF_WORKERS: worker processes for sweep trials (default: 1)
- HBF_PRESET: preset used without --config (default: desk)
- HBF_OUTPUT_DIR: directory for relative output paths (default: results)

Run
  hbf sweep --preset desk --out desk.csv --json desk.json
  hbf sweep --config my.env --seed 42 --snr=-10,0,10 --M 2,3 --mode fro
  hbf schematic
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List

from dotenv import load_dotenv

from apps.sim.errors import SimulationError
from apps.sim.services.experiment import (
    run_oracle_check,
    run_schematic_example,
    run_sweep,
    sound_trial,
)
from apps.sim.services.exporter import (
    emit_csv,
    emit_json,
    emit_observations_csv,
    emit_observations_npy,
)
from apps.sim.utils.config_loader import load_config
from apps.sim.utils.env import Settings, get_settings

logger = logging.getLogger("cli")


def configure_logging(level: str, verbose: bool = False) -> None:
    """Configure the root logger once with timestamps."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def parse_args(argv: List[str], settings: Settings) -> argparse.Namespace:
    """Parse CLI arguments."""
    parser = argparse.ArgumentParser(
        prog="hbf",
        description="Hybrid beamforming from implicit CSI: simulations and audits",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose logging"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="Flat key = value experiment config file")
        p.add_argument(
            "--preset",
            default=settings.preset,
            help=f"Named preset when no --config is given (default: {settings.preset})",
        )
        p.add_argument("--seed", type=int, help="Master seed")

    sweep = sub.add_parser("sweep", help="Run a Monte-Carlo sweep")
    add_config_flags(sweep)
    sweep.add_argument("--out", default="sweep.csv", help="CSV output path")
    sweep.add_argument("--json", help="Optional JSON report path")
    sweep.add_argument("--trials", type=int, help="Number of channel realizations")
    sweep.add_argument("--snr", help="Comma-separated SNR points in dB")
    sweep.add_argument("--M", dest="m_list", help="Comma-separated M values")
    sweep.add_argument("--mode", choices=["eigen", "fro"], help="Selection criterion")
    sweep.add_argument(
        "--noiseless", action="store_true", default=None, help="Sound without noise"
    )
    sweep.add_argument(
        "--workers",
        type=int,
        default=settings.workers,
        help=f"Worker processes (default: {settings.workers})",
    )

    sub.add_parser("schematic", help="Rates of the two-path example")

    check = sub.add_parser("oracle-check", help="Audit against the exhaustive oracle")
    check.add_argument("--trials", type=int, default=100, help="Number of instances")
    check.add_argument("--seed", type=int, default=0, help="Master seed")

    sound = sub.add_parser("sound", help="Export the observation tensor of one trial")
    add_config_flags(sound)
    sound.add_argument("--snr", type=float, default=10.0, help="SNR in dB")
    sound.add_argument("--trial", type=int, default=0, help="Trial index")
    sound.add_argument("--out", default="observations.csv", help="CSV output path")
    sound.add_argument("--npy", help="Optional .npy output path")
    return parser.parse_args(argv)


def resolve_output(path: str, settings: Settings) -> Path:
    """Relative paths land in the configured output directory."""
    out = Path(path)
    return out if out.is_absolute() else Path(settings.output_dir) / out


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    overrides = {
        "master_seed": args.seed,
        "n_trials": args.trials,
        "snr_db_list": args.snr,
        "m_list": args.m_list,
        "modes": args.mode,
        "noiseless_observations": args.noiseless,
    }
    cfg = load_config(args.config, args.preset, overrides)
    report = run_sweep(cfg, workers=args.workers)
    csv_path = emit_csv(report, resolve_output(args.out, settings))
    if args.json:
        emit_json(report, resolve_output(args.json, settings))

    for row in report.rows:
        m = "" if row.M is None else f"M={row.M}"
        print(
            f"{row.snr_db:6.1f} dB  {row.method:<13} {m:<5} {row.mode:<5} "
            f"{row.mean_rate_bps_hz:8.4f} bit/s/Hz  ({row.normalized_rate:.4f})"
        )
    print(f"Results: {csv_path}")
    return 0


def cmd_schematic() -> int:
    result = run_schematic_example()
    f_mux, w_mux = result.multiplexing_beams
    f_dom, w_dom = result.dominant_beams
    print(f"SNR: {result.snr_db:.1f} dB")
    print(
        f"rate_multiplexing: {result.rate_multiplexing:.4f} bit/s/Hz "
        f"(tx beams {list(f_mux)}, rx beams {list(w_mux)})"
    )
    print(
        f"rate_dominant: {result.rate_dominant:.4f} bit/s/Hz "
        f"(tx beams {list(f_dom)}, rx beams {list(w_dom)})"
    )
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    summary = run_oracle_check(n_trials=args.trials, seed=args.seed)
    print(f"Trials: {summary.n_trials}")
    print(f"Selections matching the oracle: {summary.matching_selections}")
    print(f"Largest rate gap: {summary.max_rate_gap:.3e}")
    print(f"Dominance ladder violations: {summary.ladder_violations}")
    print("PASS" if summary.passed else "FAIL")
    return 0 if summary.passed else 1


def cmd_sound(args: argparse.Namespace, settings: Settings) -> int:
    cfg = load_config(args.config, args.preset, {"master_seed": args.seed})
    tensor = sound_trial(cfg, args.trial, args.snr)
    written = [emit_observations_csv(tensor, resolve_output(args.out, settings))]
    if args.npy:
        written.append(emit_observations_npy(tensor, resolve_output(args.npy, settings)))
    print(
        f"Observation tensor {tensor.n_w}x{tensor.n_f}x{tensor.n_subcarriers} "
        f"written to {', '.join(str(p) for p in written)}"
    )
    return 0


def main(argv: List[str] | None = None) -> int:
    """Entry point for the CLI."""
    load_dotenv()
    settings = get_settings()
    args = parse_args(sys.argv[1:] if argv is None else argv, settings)
    configure_logging(settings.log_level, args.verbose)

    try:
        if args.command == "sweep":
            return cmd_sweep(args, settings)
        if args.command == "schematic":
            return cmd_schematic()
        if args.command == "oracle-check":
            return cmd_oracle_check(args)
        return cmd_sound(args, settings)
    except (SimulationError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
