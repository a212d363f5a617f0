"""Shift-invariant signal spaces on graphs with commuting shifts."""

__version__ = "0.1.0"

from .errors import GsisError, GsisWarning
from .shifts import Graph, ShiftSet, joint_eigendecomposition, standard_shifts, validate_shifts
from .spectral import SpectralDecomposition, build_decomposition, decompose, gft, igft, lowpass
from .tolerances import DEFAULT, ToleranceConfig

__all__ = [
    "DEFAULT",
    "Graph",
    "GsisError",
    "GsisWarning",
    "ShiftSet",
    "SpectralDecomposition",
    "ToleranceConfig",
    "build_decomposition",
    "decompose",
    "gft",
    "igft",
    "joint_eigendecomposition",
    "lowpass",
    "standard_shifts",
    "validate_shifts",
]
