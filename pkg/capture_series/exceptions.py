"""Error model for the capture-series package.

Every error carries a ``context`` mapping with the values that led to it.
The CLI serialises ``type(err).__name__``, ``str(err)`` and ``context`` as
the structured error JSON it writes to stderr.
"""

from __future__ import annotations

from typing import Any


class CaptureSeriesError(RuntimeError):
    """Base class of every error raised by the package."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.context: dict[str, Any] = dict(context)


class InvalidInputError(CaptureSeriesError, ValueError):
    """A documented precondition of an operation was violated."""


class CompositionUndefinedError(CaptureSeriesError):
    """Series composition (or log1p) with a non-zero constant term in the inner series."""


class InternalInconsistencyError(CaptureSeriesError):
    """An identity that holds by construction failed; signals a bug."""


class SolverDegenerateError(CaptureSeriesError):
    """The order-by-order θ-solve met a zero pivot."""


class RowOutOfRangeError(CaptureSeriesError, IndexError):
    """A partial-sum row was requested outside the solved order."""


class BreakdownError(CaptureSeriesError):
    """Initial conditions fall outside the validity region of the closed forms."""


class PoleError(CaptureSeriesError):
    """A closed-form solution was evaluated at its pole εt = C."""


class StiffnessError(CaptureSeriesError):
    """The integrator step size underflowed; ``last_state`` is the last good state."""

    def __init__(self, message: str, last_state: Any = None, **context: Any) -> None:
        super().__init__(message, **context)
        self.last_state = last_state


class TraceIncompleteError(CaptureSeriesError):
    """The backward separatrix trace never reached the nullcline."""


class BracketError(CaptureSeriesError):
    """Both bisection endpoints share the same fate."""


class InsufficientDataError(CaptureSeriesError):
    """Too few coefficients for the requested analysis."""


class DegenerateFitError(CaptureSeriesError):
    """Every point of a fit window was excluded."""


class ConfigError(CaptureSeriesError, ValueError):
    """CLI configuration failed validation."""
