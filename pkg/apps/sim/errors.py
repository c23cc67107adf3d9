"""
Exception hierarchy for the hybrid beamforming simulator.
"""


class SimulationError(Exception):
    """Base class for every error raised by the simulator."""


class InvalidInput(SimulationError, ValueError):
    """A precondition on an argument or configuration value does not hold."""


class NearSingular(SimulationError):
    """A Gram matrix of analog beams is too close to singular to whiten."""


class TooLarge(SimulationError):
    """An exhaustive enumeration would exceed its size guard."""
