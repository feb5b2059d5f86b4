"""Exception types shared across the package."""

from __future__ import annotations


class MagnonHybridError(Exception):
    """Base class for every package-specific error."""


class InvalidArgumentError(MagnonHybridError, ValueError):
    """An argument violates a documented precondition."""


class NonPhysicalError(MagnonHybridError):
    """A network eigenproblem produced a nonpositive squared frequency (overcoupled)."""


class InstabilityError(MagnonHybridError):
    """The quadratic boson Hamiltonian is not positive definite.

    Carries a diagnosis instead of a bare message: ``min_eigenvalue`` is the
    smallest eigenvalue of the position-space quadratic form, and
    ``offending_pairs`` lists photon mode indices whose magnon coupling alone
    already violates the two-mode stability bound (omega_i * omega_m > 4 g_i**2).
    """

    def __init__(self, message: str, *, min_eigenvalue: float | None = None,
                 offending_pairs: tuple[int, ...] = ()):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.offending_pairs = tuple(offending_pairs)


class ResourceLimitError(MagnonHybridError):
    """A truncated-basis computation would exceed the allowed problem size."""


class NoPeakError(MagnonHybridError):
    """A fit window contains no interior local maximum."""


class DegenerateFitError(MagnonHybridError):
    """A line fit failed or produced a singular covariance."""


class ConfigError(MagnonHybridError):
    """A run configuration is malformed (CLI exit code 2)."""


class DataError(MagnonHybridError):
    """An input data file is unreadable, malformed or too small (CLI exit code 4)."""


class AllUnstableError(MagnonHybridError):
    """Every point of a requested sweep is Bogoliubov-unstable (CLI exit code 3)."""
