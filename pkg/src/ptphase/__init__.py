"""Entanglement phase diagrams from low-order partial-transpose moments."""

__version__ = "0.1.0"

from .tripartition import PhaseLabel, Tripartition, classify_phase
from .moments import MomentSet, moment_ratio, r2, white_noise_moments

__all__ = [
    "PhaseLabel",
    "Tripartition",
    "classify_phase",
    "MomentSet",
    "moment_ratio",
    "r2",
    "white_noise_moments",
    "__version__",
]
