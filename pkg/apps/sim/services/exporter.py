"""
File output for sweep reports and observation tensors.
"""
import csv
import logging
from pathlib import Path
from typing import List

import numpy as np

from ..core.sounding import ObservationTensor
from ..schemas.report import CSV_COLUMNS, SweepReport, SweepRow

logger = logging.getLogger(__name__)


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as e:
        raise OSError(f"Cannot write {path}: {e.strerror or e}") from e


def emit_csv(report: SweepReport, path: str | Path) -> Path:
    """Write one line per row; floats use their shortest round-trip repr."""
    out = Path(path)
    with _open_for_write(out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in report.rows:
            writer.writerow([_format(getattr(row, column)) for column in CSV_COLUMNS])
    logger.info(f"Wrote {len(report.rows)} rows to {out}")
    return out


def read_csv(path: str | Path) -> List[SweepRow]:
    """Parse a CSV written by ``emit_csv`` back into rows."""
    src = Path(path)
    try:
        with open(src, newline="", encoding="utf-8") as f:
            records = list(csv.DictReader(f))
    except OSError as e:
        raise OSError(f"Cannot read {src}: {e.strerror or e}") from e
    rows = []
    for record in records:
        if record.get("M") == "":
            record["M"] = None
        rows.append(SweepRow(**record))
    return rows


def emit_json(report: SweepReport, path: str | Path) -> Path:
    """Rows together with the resolved config and master seed."""
    out = Path(path)
    with _open_for_write(out) as f:
        f.write(report.model_dump_json(indent=2))
        f.write("\n")
    logger.info(f"Wrote report JSON to {out}")
    return out


def emit_observations_csv(t: ObservationTensor, path: str | Path) -> Path:
    """One line per tensor entry: n_w, n_f, k, real part, imaginary part."""
    out = Path(path)
    with _open_for_write(out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("n_w", "n_f", "k", "re", "im"))
        for (n_w, n_f, k), value in np.ndenumerate(t.y):
            writer.writerow(
                (n_w, n_f, k, repr(float(value.real)), repr(float(value.imag)))
            )
    logger.info(f"Wrote {t.y.size} observations to {out}")
    return out


def emit_observations_npy(t: ObservationTensor, path: str | Path) -> Path:
    out = Path(path)
    if out.suffix != ".npy":
        out = out.with_name(out.name + ".npy")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        np.save(out, t.y)
    except OSError as e:
        raise OSError(f"Cannot write {out}: {e.strerror or e}") from e
    logger.info(f"Wrote observation tensor {t.y.shape} to {out}")
    return out
