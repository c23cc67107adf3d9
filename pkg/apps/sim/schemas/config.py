"""
Pydantic schema for experiment configuration.
"""
from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field, ValidationInfo, field_validator, model_validator

from ..core.array_geometry import Codebook, custom_codebook, orthogonal_codebook
from ..core.beam_training import Criterion
from ..core.channel import ClusterProfile
from ..core.precoding import Allocation

NOISE_VAR = 1.0

_LIST_FIELDS = (
    "tx_codebook_angles",
    "rx_codebook_angles",
    "ray_offsets",
    "snr_db_list",
    "m_list",
    "modes",
)
_OPTIONAL_FIELDS = (
    "tx_codebook_angles",
    "rx_codebook_angles",
    "ray_offsets",
    "delay_max",
)


class ExperimentConfig(BaseModel):
    """Resolved configuration of one Monte-Carlo sweep."""

    # Arrays and link
    n_tx: int = Field(default=16, ge=1, description="Transmit antennas N_T")
    n_rx: int = Field(default=16, ge=1, description="Receive antennas N_R")
    n_rf: int = Field(default=2, ge=1, description="RF chains per side")
    n_streams: int = Field(default=2, ge=1, description="Data streams N_S")
    n_subcarriers: int = Field(default=64, ge=1, description="Subcarriers K")
    spacing_ratio: float = Field(
        default=0.5, gt=0, description="Element spacing over wavelength"
    )
    tx_codebook_angles: Optional[list[float]] = Field(
        default=None, description="Custom transmit codebook angles (degrees)"
    )
    rx_codebook_angles: Optional[list[float]] = Field(
        default=None, description="Custom receive codebook angles (degrees)"
    )

    # Channel profile
    n_clusters: int = Field(default=3, ge=1, description="Clusters C")
    rays_per_cluster: int = Field(default=4, ge=1, description="Rays per cluster R")
    angle_spread: float = Field(default=10.0, ge=0, description="Angle spread (degrees)")
    ray_offsets: Optional[list[float]] = Field(
        default=None, description="Intra-cluster offsets, multiples of angle_spread"
    )
    delay_max: Optional[float] = Field(
        default=None, ge=0, description="Largest path delay in samples (default K/8)"
    )
    los_power_fraction: float = Field(
        default=0.5, ge=0, lt=1, description="Power share of the first cluster"
    )
    power_decay: float = Field(
        default=1.0, ge=0, description="Exponential decay of the remaining clusters"
    )
    shared_cluster_delay: bool = Field(
        default=True, description="Rays of one cluster share a delay"
    )

    # Sweep
    snr_db_list: list[float] = Field(
        default=[-10.0, -5.0, 0.0, 5.0, 10.0], min_length=1, description="SNR points"
    )
    m_list: list[int] = Field(
        default=[2, 3], min_length=1, description="Numbers of initially selected pairs"
    )
    modes: list[Criterion] = Field(
        default=[Criterion.EIGEN], min_length=1, description="Selection criteria"
    )
    n_trials: int = Field(default=100, ge=1, description="Channel realizations")
    master_seed: int = Field(default=0, ge=0, description="Seed of the whole sweep")
    noiseless_observations: bool = Field(
        default=False, description="Sound without noise"
    )
    allocation: Allocation = Field(
        default=Allocation.EQUAL, description="Hybrid stream power allocation"
    )
    normalizer_allocation: Allocation = Field(
        default=Allocation.EQUAL, description="Fully digital normalizer allocation"
    )
    include_oracle: bool = Field(default=True, description="Score the exhaustive oracle")
    oracle_max_combinations: int = Field(
        default=20_000, ge=1, description="Oracle size budget per sweep"
    )
    max_candidates: int = Field(default=8, ge=1, description="Upper bound on M")

    model_config = {"extra": "forbid"}

    @field_validator(*_LIST_FIELDS, "delay_max", mode="before")
    @classmethod
    def parse_flat_values(cls, value, info: ValidationInfo):
        """Accept the comma-separated strings of flat config files."""
        optional = info.field_name in _OPTIONAL_FIELDS
        if isinstance(value, str):
            text = value.strip()
            if optional and text.lower() in ("", "none"):
                return None
            if info.field_name in _LIST_FIELDS:
                return [item.strip() for item in text.split(",") if item.strip()]
        if optional and isinstance(value, list) and not value:
            return None
        return value

    @model_validator(mode="after")
    def check_dimensions(self) -> "ExperimentConfig":
        if not self.n_streams <= self.n_rf <= min(self.m_list):
            raise ValueError("need n_streams <= n_rf <= min(m_list)")
        if self.n_streams > min(self.n_tx, self.n_rx):
            raise ValueError("n_streams exceeds min(n_tx, n_rx)")
        if max(self.m_list) > self.max_candidates:
            raise ValueError(
                f"max(m_list)={max(self.m_list)} exceeds max_candidates={self.max_candidates}"
            )
        for angles, n, side in (
            (self.tx_codebook_angles, self.n_tx, "n_tx"),
            (self.rx_codebook_angles, self.n_rx, "n_rx"),
        ):
            if angles is None and (n < 2 or n % 2):
                raise ValueError(f"orthogonal codebook needs an even {side} >= 2")
        if max(self.m_list) > min(self.n_f, self.n_w):
            raise ValueError("max(m_list) exceeds a codebook size")
        if self.ray_offsets is not None and len(self.ray_offsets) != self.rays_per_cluster:
            raise ValueError("ray_offsets needs one entry per ray")
        return self

    @property
    def n_f(self) -> int:
        return self.n_tx if self.tx_codebook_angles is None else len(self.tx_codebook_angles)

    @property
    def n_w(self) -> int:
        return self.n_rx if self.rx_codebook_angles is None else len(self.rx_codebook_angles)

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.n_tx, self.n_rx, self.n_subcarriers

    def cluster_profile(self) -> ClusterProfile:
        return ClusterProfile(
            n_clusters=self.n_clusters,
            rays_per_cluster=self.rays_per_cluster,
            angle_spread=self.angle_spread,
            ray_offsets=None if self.ray_offsets is None else tuple(self.ray_offsets),
            delay_max=self.delay_max,
            los_power_fraction=self.los_power_fraction,
            power_decay=self.power_decay,
            shared_cluster_delay=self.shared_cluster_delay,
        )

    def codebooks(self) -> tuple[Codebook, Codebook]:
        """Transmit and receive codebooks."""
        if self.tx_codebook_angles is None:
            f_cb = orthogonal_codebook(self.n_tx)
        else:
            f_cb = custom_codebook(self.n_tx, self.tx_codebook_angles, self.spacing_ratio)
        if self.rx_codebook_angles is None:
            w_cb = orthogonal_codebook(self.n_rx)
        else:
            w_cb = custom_codebook(self.n_rx, self.rx_codebook_angles, self.spacing_ratio)
        return f_cb, w_cb

    def gamma(self, snr_db: float) -> float:
        """Per-stream SNR gamma = rho / (N_S noise_var) as a linear value."""
        return float(10.0 ** (snr_db / 10.0))

    def rho(self, snr_db: float) -> float:
        return self.gamma(snr_db) * self.n_streams * NOISE_VAR
