"""
Shared fixtures for the simulator test suite.
"""
import numpy as np
import pytest

from apps.sim.core.array_geometry import orthogonal_codebook
from apps.sim.core.channel import (
    ClusterProfile,
    generate_cluster_channel,
    two_path_scenario,
)
from apps.sim.schemas.config import ExperimentConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def two_path():
    return two_path_scenario()


@pytest.fixture
def codebook8():
    return orthogonal_codebook(8)


@pytest.fixture
def small_channel():
    """8x8 cluster channel over 8 subcarriers."""
    return generate_cluster_channel(ClusterProfile(), (8, 8, 8), seed=7)


@pytest.fixture
def random_channels():
    """A handful of seeded 8x8 channels with 4 subcarriers."""
    return [generate_cluster_channel(ClusterProfile(), (8, 8, 4), seed=s) for s in range(5)]


@pytest.fixture
def small_config():
    return ExperimentConfig(
        n_tx=8,
        n_rx=8,
        n_subcarriers=8,
        snr_db_list=[-5.0, 5.0],
        m_list=[2, 3],
        n_trials=3,
        master_seed=11,
    )


@pytest.fixture
def cmatrix(rng):
    """Factory of random complex Gaussian matrices."""

    def make(rows, cols):
        return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))

    return make
