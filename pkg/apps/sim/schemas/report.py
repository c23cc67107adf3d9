"""
Result schemas for sweeps, the schematic example and the oracle audit.
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from .config import ExperimentConfig

CSV_COLUMNS = (
    "snr_db",
    "method",
    "M",
    "mode",
    "mean_rate_bps_hz",
    "normalized_rate",
    "n_trials",
    "stderr",
)


class SweepRow(BaseModel):
    """One aggregated curve point."""

    snr_db: float = Field(..., description="Per-stream SNR gamma in dB")
    method: str = Field(
        ...,
        description="fully_digital, oracle, power_only or algorithm1",
        pattern="^(fully_digital|oracle|power_only|algorithm1)$",
    )
    M: Optional[int] = Field(None, description="Initially selected pairs, if any")
    mode: str = Field("", description="Selection criterion, empty for baselines")
    mean_rate_bps_hz: float = Field(..., description="Mean throughput in bit/s/Hz")
    normalized_rate: float = Field(..., description="Mean rate over fully digital")
    n_trials: int = Field(..., ge=1)
    stderr: float = Field(..., ge=0, description="Standard error of the mean rate")


class SweepReport(BaseModel):
    rows: List[SweepRow] = Field(default_factory=list)
    config: ExperimentConfig
    master_seed: int

    def select(
        self, method: str, M: Optional[int] = None, mode: Optional[str] = None
    ) -> List[SweepRow]:
        """Rows of one curve in SNR order."""
        return [
            row
            for row in self.rows
            if row.method == method
            and (M is None or row.M == M)
            and (mode is None or row.mode == mode)
        ]


class SchematicResult(BaseModel):
    """Rates of the two-path example at 5 dB."""

    snr_db: float
    rate_multiplexing: float = Field(..., description="M = N_RF power-selected beams")
    rate_dominant: float = Field(..., description="Algorithm with M = 4")
    multiplexing_beams: Tuple[Tuple[int, ...], Tuple[int, ...]]
    dominant_beams: Tuple[Tuple[int, ...], Tuple[int, ...]]


class OracleCheckSummary(BaseModel):
    """Outcome of the small-size oracle audit."""

    n_trials: int
    matching_selections: int
    max_rate_gap: float = Field(..., description="Largest |oracle - algorithm| with M = N_F")
    ladder_violations: int = Field(
        ..., description="Trials breaking fully digital >= oracle >= M=3 >= M=2"
    )

    @property
    def passed(self) -> bool:
        return (
            self.matching_selections == self.n_trials
            and self.max_rate_gap < 1e-9
            and self.ladder_violations == 0
        )
