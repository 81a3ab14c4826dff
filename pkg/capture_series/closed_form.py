"""Leading-order matched-asymptotics and RG closed forms.

Both solutions are parameterised by 1/C (``invC``) rather than C so that the
separatrix, C → ±∞, is the regular point invC = 0:

    matched:  x = ε/(εt − C) + εB e^{−t}
    RG:       x = εÃ + εB̃ e^{−t} − ε²(B̃²/2) e^{−2t},
              Ã = 1/(εt − C),  B̃ = D(εt − C)²

Every division by (εt − C) is rewritten as invC/(εt·invC − 1).  This module
works in doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__

from ._log import get_logger
from .const import (
    FATE_CAPTURE,
    FATE_ESCAPE,
    FATE_SEPARATRIX,
    METHOD_MATCHED,
    METHOD_RG,
    POLE_TOL,
)
from .exceptions import BreakdownError, InvalidInputError, PoleError

_LOGGER = get_logger(__name__)


class Branch(StrEnum):
    """Root of y² + y + (x0 + u0) = 0, y = ε/C."""

    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class InitialConditions:
    x0: float
    u0: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x0) and math.isfinite(self.u0)):
            raise InvalidInputError("initial conditions must be finite", x0=self.x0, u0=self.u0)


@dataclass(frozen=True)
class SolutionConstants:
    """Integration constants of the closed forms.

    ``D`` and ``B`` are related by B = DC² at leading order; ``DC2`` returns
    that product and stays finite at invC = 0.
    """

    invC: float  # noqa: N815
    B: float
    D: float
    epsilon: float = 1.0

    @property
    def DC2(self) -> float:  # noqa: N802
        if self.invC == 0:
            return self.B
        return self.D / (self.invC * self.invC)


def constants_from_ic(
    ic: InitialConditions, epsilon: float = 1.0, branch: Branch = Branch.PLUS
) -> SolutionConstants:
    """Fit invC, B and D to (x0, u0) through the matched solution at t = 0.

    At t = 0 the matched form gives x0 = −ε/C + εB and u0 = −ε²/C² − εB, so
    y = ε/C solves y² + y + (x0 + u0) = 0.  The plus root is taken in the
    rationalised form −2(x0+u0)/(1 + √disc), which is exactly zero on the
    separatrix x0 + u0 = 0.

    Raises:
        BreakdownError: u0 > (1 − 4x0)/4, where no real root exists.
    """
    if not epsilon > 0:
        raise InvalidInputError("epsilon must be positive", epsilon=epsilon)
    total = ic.x0 + ic.u0
    disc = 1.0 - 4.0 * ic.x0 - 4.0 * ic.u0
    if disc < 0:
        raise BreakdownError(
            "initial conditions lie outside the closed-form validity region",
            x0=ic.x0,
            u0=ic.u0,
            condition="u0 > (1 - 4*x0)/4",
            u0_limit=(1.0 - 4.0 * ic.x0) / 4.0,
        )
    root = math.sqrt(disc)
    if branch is Branch.PLUS:
        inv_c = -2.0 * total / (epsilon * (1.0 + root))
    else:
        inv_c = (-1.0 - root) / (2.0 * epsilon)
    b = ic.x0 / epsilon + inv_c
    constants = SolutionConstants(invC=inv_c, B=b, D=b * inv_c * inv_c, epsilon=epsilon)
    _LOGGER.debug("Constants for %s (branch %s): %s", ic, branch, constants)
    return constants


def _pole_factor(c: SolutionConstants, t: float) -> float:
    """εt·invC − 1, i.e. (εt − C)/C; raises at the pole."""
    s = c.epsilon * t * c.invC - 1.0
    if abs(s) <= POLE_TOL:
        raise PoleError("closed form evaluated at its pole εt = C", t=t, invC=c.invC)
    return s


def rg_amplitudes(c: SolutionConstants, t: float) -> tuple[float, float]:
    """Return (Ã, B̃) = (1/(εt − C), D(εt − C)²)."""
    s = _pole_factor(c, t)
    return c.invC / s, c.DC2 * s * s


def matched_eval(c: SolutionConstants, t: float) -> float:
    a_tilde = c.invC / _pole_factor(c, t)
    return c.epsilon * a_tilde + c.epsilon * c.B * math.exp(-t)


def matched_velocity(c: SolutionConstants, t: float) -> float:
    a_tilde = c.invC / _pole_factor(c, t)
    eps = c.epsilon
    return -eps * eps * a_tilde * a_tilde - eps * c.B * math.exp(-t)


def rg_eval(c: SolutionConstants, t: float, order: int = 2) -> float:
    """RG solution; ``order=1`` drops the B̃² term and freezes (εt − C)² at C².

    Raises:
        InvalidInputError: *order* is not 1 or 2.
        PoleError: εt = C.
    """
    eps = c.epsilon
    if order == 1:
        a_tilde = c.invC / _pole_factor(c, t)
        return eps * a_tilde + eps * c.DC2 * math.exp(-t)
    if order != 2:
        raise InvalidInputError("RG order must be 1 or 2", order=order)
    a_tilde, b_tilde = rg_amplitudes(c, t)
    decay = math.exp(-t)
    return eps * a_tilde + eps * b_tilde * decay - eps * eps * b_tilde * b_tilde / 2.0 * decay * decay


def rg_velocity(c: SolutionConstants, t: float, order: int = 2) -> float:
    """Analytic ẋ of :func:`rg_eval`, using Ã′ = −εÃ² and B̃′ = 2εÃB̃."""
    eps = c.epsilon
    if order == 1:
        a_tilde = c.invC / _pole_factor(c, t)
        return -eps * eps * a_tilde * a_tilde - eps * c.DC2 * math.exp(-t)
    if order != 2:
        raise InvalidInputError("RG order must be 1 or 2", order=order)
    a_tilde, b_tilde = rg_amplitudes(c, t)
    decay = math.exp(-t)
    return (
        -eps * eps * a_tilde * a_tilde
        + eps * (2.0 * eps * a_tilde * b_tilde - b_tilde) * decay
        - eps * eps * b_tilde * b_tilde * (2.0 * eps * a_tilde - 1.0) * decay * decay
    )


def evaluate(method: str, c: SolutionConstants, t: float) -> tuple[float, float]:
    """Return (x, u) at *t* for ``"matched"`` or ``"rg"``."""
    if method == METHOD_MATCHED:
        return matched_eval(c, t), matched_velocity(c, t)
    if method == METHOD_RG:
        return rg_eval(c, t), rg_velocity(c, t)
    raise InvalidInputError("unknown closed-form method", method=method)


def predicted_fate(c: SolutionConstants) -> str:
    """Capture for C > 0 (the pole lies ahead), escape for C < 0, separatrix at invC = 0."""
    if c.invC > 0:
        return FATE_CAPTURE
    if c.invC < 0:
        return FATE_ESCAPE
    return FATE_SEPARATRIX
