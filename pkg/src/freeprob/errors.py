"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`FreeProbError`, so callers (the CLI in particular) can separate
domain/solver failures from programming errors.
"""

from __future__ import annotations


class FreeProbError(Exception):
    """Base class for all library errors."""


class DomainError(FreeProbError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(FreeProbError):
    """A brute-force routine was asked for a size beyond its guard."""


class SingularDeconvolutionError(DomainError):
    """Multiplicative deconvolution by a sequence with vanishing first moment."""


class PoleError(DomainError):
    """Transform evaluated on (or numerically at) a pole."""


class ConvergenceError(FreeProbError):
    """A truncated series cannot reach the requested accuracy at this point."""


class SolverError(FreeProbError):
    """An iterative or bracketing solver failed.

    Attributes
    ----------
    residual : float or None
        Last residual reached, when the solver tracks one.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual
