"""
Uniform linear array steering vectors and beam codebooks.

Angles are given in degrees everywhere at the API surface.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidInput

DEFAULT_SPACING_RATIO = 0.5


def validate_angle(angle: float) -> float:
    """Return ``angle`` as float if it is a steering angle in [-90, 90] degrees."""
    value = float(angle)
    if not np.isfinite(value) or value < -90.0 or value > 90.0:
        raise InvalidInput(f"steering angle {angle} outside [-90, 90] degrees")
    return value


def steering_matrix(
    n_antennas: int,
    angles: Sequence[float] | np.ndarray,
    spacing_ratio: float = DEFAULT_SPACING_RATIO,
) -> np.ndarray:
    """Stack steering vectors for ``angles`` as columns of an N x len(angles) matrix."""
    if n_antennas < 1:
        raise InvalidInput(f"n_antennas must be >= 1, got {n_antennas}")
    if spacing_ratio <= 0:
        raise InvalidInput(f"spacing_ratio must be > 0, got {spacing_ratio}")

    sines = np.sin(np.deg2rad(np.asarray(angles, dtype=float)))
    m = np.arange(n_antennas)[:, None]
    phase = 2.0 * np.pi * spacing_ratio * m * sines[None, :]
    return np.exp(1j * phase) / np.sqrt(n_antennas)


def steering_vector(
    n_antennas: int, angle: float, spacing_ratio: float = DEFAULT_SPACING_RATIO
) -> np.ndarray:
    """
    Array response of an N-element ULA towards ``angle``.

    Entry m is exp(j 2pi spacing_ratio sin(angle) m) / sqrt(N); the vector has
    unit Euclidean norm.
    """
    return steering_matrix(n_antennas, [validate_angle(angle)], spacing_ratio)[:, 0]


@dataclass(frozen=True)
class Codebook:
    """Beam codebook: unit-norm steering vectors as columns plus their angles."""

    matrix: np.ndarray
    angles: tuple[float, ...]
    spacing_ratio: float = DEFAULT_SPACING_RATIO

    @property
    def n_antennas(self) -> int:
        return self.matrix.shape[0]

    @property
    def size(self) -> int:
        return self.matrix.shape[1]

    def columns(self, indices: Sequence[int]) -> np.ndarray:
        """Analog beamforming matrix built from the given beam indices."""
        return self.matrix[:, list(indices)]

    def gram(self) -> np.ndarray:
        return self.matrix.conj().T @ self.matrix


def custom_codebook(
    n_antennas: int,
    angles: Sequence[float],
    spacing_ratio: float = DEFAULT_SPACING_RATIO,
) -> Codebook:
    """Codebook with one steering vector per requested angle, in the given order."""
    if len(angles) == 0:
        raise InvalidInput("codebook needs at least one steering angle")
    checked = tuple(validate_angle(a) for a in angles)
    return Codebook(
        matrix=steering_matrix(n_antennas, checked, spacing_ratio),
        angles=checked,
        spacing_ratio=spacing_ratio,
    )


def orthogonal_codebook(n_antennas: int) -> Codebook:
    """
    Orthogonal N-beam codebook at half-wavelength spacing.

    Beam n (1-based) points at asin((n - 1 - N/2) / (N/2)), so the first beam
    is -90 degrees and the spatial frequencies tile one period uniformly.
    """
    if n_antennas < 2 or n_antennas % 2:
        raise InvalidInput(f"orthogonal codebook needs an even N >= 2, got {n_antennas}")
    half = n_antennas / 2
    ratios = (np.arange(n_antennas) - half) / half
    angles = np.clip(np.rad2deg(np.arcsin(ratios)), -90.0, 90.0)
    return custom_codebook(n_antennas, angles.tolist(), DEFAULT_SPACING_RATIO)
