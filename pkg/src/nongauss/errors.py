"""Exception hierarchy shared by all nongauss modules.

The CLI maps these onto exit codes: ConfigError -> 2, NumericalGateError
(and subclasses) -> 3, MemoryGuardError -> 4.
"""


class NonGaussError(Exception):
    """Base class for all package errors."""


class ConfigError(NonGaussError):
    """Invalid user configuration (bad flag, malformed grid, wrong combo)."""


class NumericalGateError(NonGaussError):
    """A numerical validity gate tripped (leakage, spectrum, hermiticity)."""


class CutoffError(NumericalGateError):
    """Requested Fock cutoff cannot represent the state to tolerance.

    Carries the minimal adequate cutoff when it is known.
    """

    def __init__(self, message, minimal_cutoff=None):
        super().__init__(message)
        self.minimal_cutoff = minimal_cutoff


class LeakageError(NumericalGateError):
    """Truncation leakage exceeds the declared tolerance."""


class SpectrumError(NumericalGateError):
    """Eigenvalue below the negativity tolerance: CPTP or truncation bug."""


class MemoryGuardError(NonGaussError):
    """A joint-space object would exceed the configured dimension cap."""
