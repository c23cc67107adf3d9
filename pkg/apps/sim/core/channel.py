"""
Cluster-based frequency-selective MIMO channel.

A realization is a list of rays (amplitude, delay, AoD, AoA). The matrix at
subcarrier k is

    H[k] = sum_rays alpha * exp(-j 2pi k l / K) * a_A(aoa) a_D(aod)^H

with unit-norm ULA responses a_A, a_D.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInput
from .array_geometry import DEFAULT_SPACING_RATIO, steering_matrix, validate_angle

# 3GPP fixed intra-cluster ray offsets; the first four give the default 8-ray set.
RAY_OFFSET_TABLE = (
    0.0447,
    0.1413,
    0.2492,
    0.3715,
    0.5129,
    0.6797,
    0.8844,
    1.1481,
    1.5195,
    2.1551,
)


def default_ray_offsets(rays_per_cluster: int) -> tuple[float, ...]:
    """Symmetric offsets +-t for the smallest table entries, R values in total."""
    if rays_per_cluster == 1:
        return (0.0,)
    if rays_per_cluster > 2 * len(RAY_OFFSET_TABLE):
        raise InvalidInput(
            f"no default ray offsets for {rays_per_cluster} rays; pass ray_offsets"
        )
    offsets: list[float] = []
    for t in RAY_OFFSET_TABLE:
        offsets.extend((t, -t))
    return tuple(offsets[:rays_per_cluster])


@dataclass(frozen=True)
class RayParams:
    alpha: float
    delay: float
    aod: float
    aoa: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InvalidInput(f"ray amplitude must be > 0, got {self.alpha}")
        if not self.delay >= 0:
            raise InvalidInput(f"ray delay must be >= 0, got {self.delay}")
        validate_angle(self.aod)
        validate_angle(self.aoa)


@dataclass(frozen=True)
class ClusterProfile:
    """
    Statistical description of a cluster channel.

    ``ray_offsets`` are dimensionless multipliers of ``angle_spread`` (degrees).
    ``delay_max`` is in sampling intervals; ``None`` means K/8.
    """

    n_clusters: int = 3
    rays_per_cluster: int = 4
    angle_spread: float = 10.0
    ray_offsets: tuple[float, ...] | None = None
    delay_max: float | None = None
    los_power_fraction: float = 0.5
    power_decay: float = 1.0
    shared_cluster_delay: bool = True

    def __post_init__(self):
        if self.n_clusters < 1 or self.rays_per_cluster < 1:
            raise InvalidInput("cluster profile needs at least one cluster and one ray")
        if self.angle_spread < 0:
            raise InvalidInput(f"angle_spread must be >= 0, got {self.angle_spread}")
        if self.delay_max is not None and self.delay_max < 0:
            raise InvalidInput(f"delay_max must be >= 0, got {self.delay_max}")
        if not 0.0 <= self.los_power_fraction < 1.0:
            raise InvalidInput(
                f"los_power_fraction must lie in [0, 1), got {self.los_power_fraction}"
            )
        if self.power_decay < 0:
            raise InvalidInput(f"power_decay must be >= 0, got {self.power_decay}")
        if self.ray_offsets is not None and len(self.ray_offsets) != self.rays_per_cluster:
            raise InvalidInput(
                f"expected {self.rays_per_cluster} ray offsets, got {len(self.ray_offsets)}"
            )

    def offsets(self) -> np.ndarray:
        if self.ray_offsets is not None:
            return np.asarray(self.ray_offsets, dtype=float)
        return np.asarray(default_ray_offsets(self.rays_per_cluster))

    def cluster_powers(self) -> np.ndarray:
        """Per-cluster power fractions summing to one."""
        weights = np.exp(-self.power_decay * np.arange(self.n_clusters))
        if self.n_clusters == 1 or self.los_power_fraction == 0.0:
            return weights / weights.sum()
        nlos = weights[1:] / weights[1:].sum()
        return np.concatenate(
            ([self.los_power_fraction], (1.0 - self.los_power_fraction) * nlos)
        )


@dataclass(frozen=True)
class ChannelRealization:
    rays: tuple[RayParams, ...]
    n_tx: int
    n_rx: int
    n_subcarriers: int
    spacing_ratio: float = DEFAULT_SPACING_RATIO
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.rays:
            raise InvalidInput("channel needs at least one ray")
        if self.n_tx < 1 or self.n_rx < 1 or self.n_subcarriers < 1:
            raise InvalidInput("channel dimensions must all be >= 1")

    @property
    def alphas(self) -> np.ndarray:
        return np.array([r.alpha for r in self.rays])

    @property
    def delays(self) -> np.ndarray:
        return np.array([r.delay for r in self.rays])

    def _responses(self) -> tuple[np.ndarray, np.ndarray]:
        if "responses" not in self._cache:
            a_rx = steering_matrix(self.n_rx, [r.aoa for r in self.rays], self.spacing_ratio)
            a_tx = steering_matrix(self.n_tx, [r.aod for r in self.rays], self.spacing_ratio)
            self._cache["responses"] = (a_rx, a_tx)
        return self._cache["responses"]

    def _ray_gains(self, subcarriers: np.ndarray) -> np.ndarray:
        phase = -2.0 * np.pi * np.outer(subcarriers, self.delays) / self.n_subcarriers
        return self.alphas[None, :] * np.exp(1j * phase)

    def materialize(self, k: int) -> np.ndarray:
        """Channel matrix H[k] of shape (n_rx, n_tx)."""
        if not 0 <= k < self.n_subcarriers:
            raise InvalidInput(f"subcarrier {k} outside [0, {self.n_subcarriers})")
        a_rx, a_tx = self._responses()
        gains = self._ray_gains(np.array([k]))[0]
        return (a_rx * gains) @ a_tx.conj().T

    def materialize_all(self) -> np.ndarray:
        """All subcarriers at once, shape (K, n_rx, n_tx)."""
        a_rx, a_tx = self._responses()
        gains = self._ray_gains(np.arange(self.n_subcarriers))
        return (a_rx[None, :, :] * gains[:, None, :]) @ a_tx.conj().T


def materialize(ch: ChannelRealization, k: int) -> np.ndarray:
    return ch.materialize(k)


def generate_cluster_channel(
    profile: ClusterProfile,
    dims: tuple[int, int, int],
    seed: int,
    spacing_ratio: float = DEFAULT_SPACING_RATIO,
) -> ChannelRealization:
    """
    Draw one channel realization.

    Cluster mean AoD/AoA are uniform on (-90, 90) degrees; ray angles add
    ``angle_spread * offset`` and are clamped to the ULA range. Delays are
    uniform on [0, delay_max], shared by the rays of a cluster unless
    ``profile.shared_cluster_delay`` is False.

    Args:
        profile: cluster statistics
        dims: (n_tx, n_rx, K)
        seed: seed of the realization; equal seeds give equal realizations
    """
    n_tx, n_rx, n_subcarriers = dims
    n_c, n_r = profile.n_clusters, profile.rays_per_cluster
    delay_max = n_subcarriers / 8 if profile.delay_max is None else profile.delay_max

    rng = np.random.default_rng(seed)
    aod_means = rng.uniform(-90.0, 90.0, n_c)
    aoa_means = rng.uniform(-90.0, 90.0, n_c)
    if profile.shared_cluster_delay:
        delays = np.repeat(rng.uniform(0.0, delay_max, n_c)[:, None], n_r, axis=1)
    else:
        delays = rng.uniform(0.0, delay_max, (n_c, n_r))

    spread = profile.angle_spread * profile.offsets()
    aods = np.clip(aod_means[:, None] + spread[None, :], -90.0, 90.0)
    aoas = np.clip(aoa_means[:, None] + spread[None, :], -90.0, 90.0)

    alphas = np.repeat(np.sqrt(profile.cluster_powers() / n_r)[:, None], n_r, axis=1)
    alphas = alphas / np.sqrt(np.sum(alphas**2))

    rays = tuple(
        RayParams(
            alpha=float(alphas[c, r]),
            delay=float(delays[c, r]),
            aod=float(aods[c, r]),
            aoa=float(aoas[c, r]),
        )
        for c in range(n_c)
        for r in range(n_r)
    )
    return ChannelRealization(
        rays=rays,
        n_tx=n_tx,
        n_rx=n_rx,
        n_subcarriers=n_subcarriers,
        spacing_ratio=spacing_ratio,
    )


def two_path_scenario(n_tx: int = 8, n_rx: int = 8) -> ChannelRealization:
    """Two-path flat channel with a 10 dB attenuation gap between the paths."""
    strong, weak = np.sqrt(10.0 / 11.0), np.sqrt(1.0 / 11.0)
    return ChannelRealization(
        rays=(
            RayParams(alpha=float(strong), delay=0.0, aod=5.0, aoa=5.0),
            RayParams(alpha=float(weak), delay=0.0, aod=30.0, aoa=-15.0),
        ),
        n_tx=n_tx,
        n_rx=n_rx,
        n_subcarriers=1,
    )
