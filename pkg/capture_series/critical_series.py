"""Convergent series for the critical capture threshold.

The separatrix meets the zero-acceleration nullcline u = −x² where

    θ·L(w) + R(w) = 0,   L(w) = Σ (n+1) B_n (−w)^n,   R(w) = Σ n(n+1) B_n (−w)^n

with w = εz_c and θ a bookkeeping parameter set to 1 at the end.  Writing
w(θ) = Σ a_n θ^n and collecting powers of θ gives one linear equation per
order in the newest unknown a_m, whose coefficient is [w¹]R = −2B_1.  The
threshold itself is εx_c(θ) = w Σ B_n (−w)^n.

ε never appears here: everything is solved for the products εz_c and εx_c.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from ._log import get_logger
from .coefficients import CoefficientTable, generate_B
from .exact_arith import PowerSeries, format_rational, series_add, series_compose, to_float
from .exceptions import (
    InternalInconsistencyError,
    InvalidInputError,
    RowOutOfRangeError,
    SolverDegenerateError,
)

_LOGGER = get_logger(__name__)


@dataclass(frozen=True)
class CriticalSeries:
    """θ-coefficients of εz_c (``a``) and εx_c (``xc``); index n−1 holds θ^n.

    ``xc`` is empty until :func:`xc_from_zc` has been applied.
    """

    a: tuple[Fraction, ...]
    xc: tuple[Fraction, ...]
    N: int

    @property
    def zc_series(self) -> PowerSeries:
        return PowerSeries((Fraction(0),) + self.a)

    @property
    def xc_series(self) -> PowerSeries:
        if not self.xc:
            raise InvalidInputError("εx_c has not been derived yet; call xc_from_zc")
        return PowerSeries((Fraction(0),) + self.xc)


@dataclass(frozen=True)
class PartialSumRow:
    """Partial sums at θ = 1 after *n* terms, with the magnitude of the n-th term."""

    n: int
    zc_sum: Fraction
    xc_sum: Fraction
    zc_term: Fraction
    xc_term: Fraction

    @property
    def zc_float(self) -> float:
        return to_float(self.zc_sum)

    @property
    def xc_float(self) -> float:
        return to_float(self.xc_sum)


@dataclass(frozen=True)
class TermRatio:
    """|a_n / a_{n−1}| for both series; ``None`` where a_{n−1} = 0."""

    n: int
    zc_ratio: float | None
    xc_ratio: float | None

    @property
    def zc_in_band(self) -> bool | None:
        return None if self.zc_ratio is None else self.zc_ratio < 1

    @property
    def xc_in_band(self) -> bool | None:
        return None if self.xc_ratio is None else self.xc_ratio < 1


def _left_series(table: CoefficientTable, order: int) -> PowerSeries:
    return PowerSeries(
        tuple((n + 1) * table.B[n] * (-1) ** n for n in range(order + 1))
    )


def _right_series(table: CoefficientTable, order: int) -> PowerSeries:
    return PowerSeries(
        tuple(n * (n + 1) * table.B[n] * (-1) ** n for n in range(order + 1))
    )


def _intersection_condition(
    left: PowerSeries, right: PowerSeries, w: PowerSeries
) -> PowerSeries:
    """θ·L(w(θ)) + R(w(θ)) known through θ^{w.order}."""
    order = w.order
    theta_left = series_compose(left.truncate(order - 1), w.truncate(order - 1)).shift(1)
    return series_add(theta_left, series_compose(right.truncate(order), w))


def solve_zc(N: int, table: CoefficientTable | None = None) -> CriticalSeries:  # noqa: N803
    """Solve for a_1 … a_N of εz_c(θ) = Σ a_n θ^n, one order at a time.

    Each order is extracted by composing L and R with the current partial
    w (with a_m = 0) and reading the θ^m coefficient; the result is checked
    by substituting the full w back into the condition.

    Raises:
        InvalidInputError: N < 1 or *table* shorter than N.
        SolverDegenerateError: the linear coefficient of R vanishes.
        InternalInconsistencyError: the final residual is non-zero.
    """
    if N < 1:
        raise InvalidInputError("the critical series needs N >= 1", N=N)
    if table is None:
        table = generate_B(N)
    table.require(N)

    left = _left_series(table, N)
    right = _right_series(table, N)
    pivot = right[1]
    if pivot == 0:
        raise SolverDegenerateError("zero pivot in the θ-solve", pivot=format_rational(pivot))

    a: list[Fraction] = []
    for m in range(1, N + 1):
        w = PowerSeries((Fraction(0),) + tuple(a) + (Fraction(0),))
        c = _intersection_condition(left, right, w)[m]
        a.append(-c / pivot)
        _LOGGER.debug("Solved θ^%d: a_%d = %s", m, m, format_rational(a[-1]))

    w = PowerSeries((Fraction(0),) + tuple(a))
    residual = _intersection_condition(left, right, w)
    for m, coeff in enumerate(residual.coefficients):
        if coeff != 0:
            raise InternalInconsistencyError(
                "θ-solve residual does not vanish", power=m, coefficient=format_rational(coeff)
            )
    _LOGGER.info("Solved the critical series to order %d", N)
    return CriticalSeries(tuple(a), (), N)


def xc_from_zc(cs: CriticalSeries, table: CoefficientTable | None = None) -> CriticalSeries:
    """Compose εx_c(θ) = w Σ B_n (−w)^n with the solved w(θ)."""
    if table is None:
        table = generate_B(cs.N)
    table.require(cs.N - 1)
    outer = PowerSeries(
        (Fraction(0),) + tuple(table.B[n] * (-1) ** n for n in range(cs.N))
    )
    composed = series_compose(outer, cs.zc_series)
    return CriticalSeries(cs.a, composed.coefficients[1:], cs.N)


def critical_series(N: int, table: CoefficientTable | None = None) -> CriticalSeries:  # noqa: N803
    """Solve εz_c and derive εx_c in one call."""
    if table is None:
        table = generate_B(N)
    return xc_from_zc(solve_zc(N, table), table)


def partial_sum_table(cs: CriticalSeries, rows: Iterable[int]) -> list[PartialSumRow]:
    """Partial sums of both series at θ = 1 truncated after each requested n.

    Raises:
        RowOutOfRangeError: a row lies outside 1 … N.
    """
    if not cs.xc:
        raise InvalidInputError("εx_c has not been derived yet; call xc_from_zc")
    out: list[PartialSumRow] = []
    for n in rows:
        if n < 1 or n > cs.N:
            raise RowOutOfRangeError("partial-sum row out of range", row=n, N=cs.N)
        out.append(
            PartialSumRow(
                n=n,
                zc_sum=sum(cs.a[:n], Fraction(0)),
                xc_sum=sum(cs.xc[:n], Fraction(0)),
                zc_term=abs(cs.a[n - 1]),
                xc_term=abs(cs.xc[n - 1]),
            )
        )
    return out


def _ratio(num: Fraction, den: Fraction) -> float | None:
    if den == 0:
        return None
    return to_float(abs(num / den))


def term_ratios(cs: CriticalSeries) -> list[TermRatio]:
    """|a_n/a_{n−1}| for n = 2 … N, for εz_c and εx_c."""
    if not cs.xc:
        raise InvalidInputError("εx_c has not been derived yet; call xc_from_zc")
    return [
        TermRatio(n, _ratio(cs.a[n - 1], cs.a[n - 2]), _ratio(cs.xc[n - 1], cs.xc[n - 2]))
        for n in range(2, cs.N + 1)
    ]


def ratio_test_inconclusive(ratios: Sequence[TermRatio]) -> bool:
    """True when some series has term ratios on both sides of 1.

    Such a series is neither bounded below 1 nor bounded away from it over
    the computed range, so d'Alembert's test decides nothing.
    """
    for column in ("zc_ratio", "xc_ratio"):
        values = [getattr(r, column) for r in ratios if getattr(r, column) is not None]
        if any(v < 1 for v in values) and any(v >= 1 for v in values):
            return True
    return False


def intersection_residual(w: float | Fraction, table: CoefficientTable) -> float:
    """Float value of L(w) + R(w) (the condition at θ = 1) using all of *table*."""
    value = Fraction(w)
    left = _left_series(table, table.N)
    right = _right_series(table, table.N)
    return to_float(left.evaluate(value) + right.evaluate(value))


def critical_inertia(x0: float, xc: float) -> float:
    """Critical Stokes number εx_c / x0 for a particle released from rest at *x0*."""
    if x0 <= 0:
        raise InvalidInputError("release position must be positive", x0=x0)
    return xc / x0
