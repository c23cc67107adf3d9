"""
Loading of experiment presets and flat ``key = value`` config files.
"""
import logging
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from ..errors import InvalidInput
from ..schemas.config import ExperimentConfig

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent.parent / "config"


def available_presets() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.env"))


def preset_path(name: str) -> Path:
    path = PRESET_DIR / f"{name}.env"
    if not path.is_file():
        raise InvalidInput(
            f"Unknown preset '{name}'; available: {', '.join(available_presets())}"
        )
    return path


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat config file; keys are lower-cased, blank values kept."""
    config_path = Path(path)
    if not config_path.is_file():
        raise InvalidInput(f"Config file not found: {config_path}")
    values = dotenv_values(config_path)
    logger.debug(f"Read {len(values)} keys from {config_path}")
    return {key.lower(): ("" if value is None else value) for key, value in values.items()}


def build_config(values: Mapping[str, Any]) -> ExperimentConfig:
    """Validate raw values, turning pydantic errors into InvalidInput."""
    try:
        return ExperimentConfig(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise InvalidInput(f"Invalid experiment config: {problems}") from e


def load_config(
    config_file: Optional[str | Path] = None,
    preset: Optional[str] = "desk",
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """
    Resolve an experiment config.

    A config file takes precedence over the preset; ``overrides`` (typically
    CLI flags) are applied last. ``None`` override values are ignored.
    """
    if config_file is not None:
        values = read_config_file(config_file)
        source = str(config_file)
    elif preset is not None:
        values = read_config_file(preset_path(preset))
        source = f"preset '{preset}'"
    else:
        values, source = {}, "defaults"

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    cfg = build_config(values)
    logger.info(f"Loaded experiment config from {source}")
    return cfg
