"""Evaluation of the separatrix series x(t) = z Σ B_n (−εz)^n, z = e^{−t}.

Exact evaluations take a rational z; the ``*_float`` helpers convert their
argument to an exact rational, evaluate exactly and round once at the end.
The time parameterisation is exposed through z only, except for
:func:`eval_at_time` which computes z = e^{−t} in floating point.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._log import get_logger
from .coefficients import CoefficientTable, generate_B
from .exact_arith import PowerSeries, RationalLike, series_mul, to_float
from .exceptions import InternalInconsistencyError, InvalidInputError

_LOGGER = get_logger(__name__)


@dataclass(frozen=True)
class SeparatrixExpansion:
    """Degree-N truncation of the separatrix series for a given ε."""

    table: CoefficientTable
    N: int
    epsilon: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.N < 0:
            raise InvalidInputError("truncation order must be non-negative", N=self.N)
        self.table.require(self.N)
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be positive", epsilon=str(self.epsilon))


def expansion(
    N: int,  # noqa: N803
    epsilon: RationalLike = 1,
    table: CoefficientTable | None = None,
) -> SeparatrixExpansion:
    """Build a :class:`SeparatrixExpansion`, generating B_0 … B_N when no table is given."""
    if table is None:
        table = generate_B(N)
    return SeparatrixExpansion(table, N, Fraction(epsilon))


def x_series(exp: SeparatrixExpansion) -> PowerSeries:
    """x as a z-polynomial: [z^{n+1}] = B_n (−ε)^n, order N+1."""
    coeffs = [Fraction(0)]
    for n in range(exp.N + 1):
        coeffs.append(exp.table.B[n] * (-exp.epsilon) ** n)
    return PowerSeries(tuple(coeffs))


def u_series(exp: SeparatrixExpansion) -> PowerSeries:
    """u = ẋ as a z-polynomial: [z^{n+1}] = −(n+1) B_n (−ε)^n, order N+1."""
    coeffs = [Fraction(0)]
    for n in range(exp.N + 1):
        coeffs.append(-(n + 1) * exp.table.B[n] * (-exp.epsilon) ** n)
    return PowerSeries(tuple(coeffs))


def _check_z(z: Fraction) -> None:
    if z < 0:
        raise InvalidInputError("z = e^{-t} cannot be negative", z=str(z))


def eval_x(exp: SeparatrixExpansion, z: RationalLike) -> Fraction:
    """Exact partial sum of x at *z*; z = 0 gives 0."""
    value = Fraction(z)
    _check_z(value)
    return x_series(exp).evaluate(value)


def eval_u(exp: SeparatrixExpansion, z: RationalLike) -> Fraction:
    """Exact partial sum of u = ẋ at *z* (dz/dt = −z)."""
    value = Fraction(z)
    _check_z(value)
    return u_series(exp).evaluate(value)


def eval_x_float(exp: SeparatrixExpansion, z: float) -> float:
    return to_float(eval_x(exp, Fraction(z)))


def eval_u_float(exp: SeparatrixExpansion, z: float) -> float:
    return to_float(eval_u(exp, Fraction(z)))


def eval_at_time(exp: SeparatrixExpansion, t: float) -> tuple[float, float]:
    """Return (x, u) on the truncated separatrix at time *t*."""
    z = math.exp(-t)
    return eval_x_float(exp, z), eval_u_float(exp, z)


def square_via_recurrence(exp: SeparatrixExpansion) -> PowerSeries:
    """x² from the single-sum identity x² = z² Σ_{n<N} (n+1)(n+2) B_{n+1} (−εz)^n.

    Known through z^{N+1}; equal to the Cauchy square of :func:`x_series`
    truncated there.

    Raises:
        InvalidInputError: N < 1.
    """
    if exp.N < 1:
        raise InvalidInputError("the square identity needs N >= 1", N=exp.N)
    coeffs = [Fraction(0), Fraction(0)]
    for n in range(exp.N):
        coeffs.append((n + 1) * (n + 2) * exp.table.B[n + 1] * (-exp.epsilon) ** n)
    return PowerSeries(tuple(coeffs))


def ode_residual(exp: SeparatrixExpansion) -> PowerSeries:
    """z-series of ẍ + ẋ + εx² for the degree-N truncation, order 2N+2.

    With d/dt z^j = −j z^j the linear part of z^j is j(j−1) c_j.  The
    coefficients of z^0 … z^{N+1} vanish by construction; the first
    surviving one is ε(−ε)^N (N+1)(N+2) B_{N+1} at z^{N+2}.

    Raises:
        InternalInconsistencyError: a low-order coefficient is non-zero.
    """
    top = 2 * exp.N + 2
    x = PowerSeries.from_coefficients(x_series(exp).coefficients, top)
    square = series_mul(x, x)
    residual = [
        j * (j - 1) * x[j] + exp.epsilon * square[j] for j in range(top + 1)
    ]
    for j in range(exp.N + 2):
        if residual[j] != 0:
            raise InternalInconsistencyError(
                "separatrix truncation leaves a low-order ODE residual",
                N=exp.N,
                power=j,
                coefficient=str(residual[j]),
            )
    return PowerSeries(tuple(residual))


@dataclass(frozen=True)
class SeparatrixFamily:
    """Float samples of the truncations k = 1 … max_order.

    ``x[k-1, i]`` and ``u[k-1, i]`` are the order-k values at ``z[i]``.
    """

    z: np.ndarray
    x: np.ndarray
    u: np.ndarray

    @property
    def max_order(self) -> int:
        return int(self.x.shape[0])


def sample_family(
    table: CoefficientTable, max_order: int, z_values: Sequence[float] | np.ndarray
) -> SeparatrixFamily:
    """Evaluate every truncation 1 … *max_order* at each z in *z_values*."""
    if max_order < 1:
        raise InvalidInputError("max_order must be at least 1", max_order=max_order)
    table.require(max_order)
    z = np.asarray(z_values, dtype=float)
    if np.any(z < 0):
        raise InvalidInputError("z = e^{-t} cannot be negative", z_min=float(z.min()))
    xs = np.empty((max_order, z.size))
    us = np.empty((max_order, z.size))
    for k in range(1, max_order + 1):
        exp = SeparatrixExpansion(table, k)
        x_coeffs = [to_float(c) for c in x_series(exp).coefficients]
        u_coeffs = [to_float(c) for c in u_series(exp).coefficients]
        xs[k - 1] = np.polynomial.polynomial.polyval(z, x_coeffs)
        us[k - 1] = np.polynomial.polynomial.polyval(z, u_coeffs)
    _LOGGER.debug("Sampled %d truncations at %d points", max_order, z.size)
    return SeparatrixFamily(z, xs, us)
