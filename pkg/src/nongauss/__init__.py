"""Bosonic non-Gaussianity: beam-splitter convolution simulator and measures."""

from . import channels, cli, conv, gaussian, lincore, measures, oracles, protocol
from .errors import (
    ConfigError,
    CutoffError,
    LeakageError,
    MemoryGuardError,
    NonGaussError,
    NumericalGateError,
    SpectrumError,
)
from .lincore import DensityMatrix, FockSpec, PureState

__all__ = [
    "channels", "cli", "conv", "gaussian", "lincore", "measures", "oracles",
    "protocol", "DensityMatrix", "FockSpec", "PureState", "NonGaussError",
    "ConfigError", "NumericalGateError", "CutoffError", "LeakageError",
    "SpectrumError", "MemoryGuardError",
]

__version__ = "0.1.0"
