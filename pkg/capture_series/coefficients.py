"""Separatrix coefficients B_n and the integer sequences derived from them.

The separatrix of ẍ + ẋ + εx² = 0 is x = z Σ B_n (−εz)^n with z = e^{−t}.
Substituting into the ODE gives the convolution recurrence

    B_{n+1} = Σ_{k=0}^{n} B_k B_{n−k} / ((n+1)(n+2)),   B_0 = 1

and clearing the factorials (b_n = n!(n+1)! B_n) leaves integers.

Functions:
    generate_B                          exact B_0 … B_N as a CoefficientTable
    integer_b                           b_n = n!(n+1)! B_n, integrality asserted
    integer_b_recurrence                the same b_n from an integer-only recurrence
    sequence_d                          d_0 … d_N of the companion binomial convolution
    catalan                             Catalan numbers, recurrence checked against the closed form
    catalan_from_generating_function    Catalan numbers from (1 − √(1−4t))/(2t)
    bessel_log_series                   −log Σ_{k≤N} (−t)^k/(k!)² as a PowerSeries
    d_from_bessel                       the d-sequence read back from that logarithm
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from ._log import get_logger
from .exact_arith import PowerSeries, series_log1p, series_neg
from .exceptions import InternalInconsistencyError, InvalidInputError

_LOGGER = get_logger(__name__)


@dataclass(frozen=True)
class CoefficientTable:
    """Exact separatrix coefficients ``B`` with their integer companions ``b``.

    Tables are immutable and may be shared freely between callers.
    """

    B: tuple[Fraction, ...]
    b: tuple[int, ...]

    @property
    def N(self) -> int:  # noqa: N802
        return len(self.B) - 1

    def require(self, order: int) -> None:
        """Raise InvalidInputError unless the table holds B_0 … B_order."""
        if order > self.N:
            raise InvalidInputError(
                "coefficient table is too short", required=order, available=self.N
            )


def _check_order(N: int) -> None:  # noqa: N803
    if N < 0:
        raise InvalidInputError("order must be non-negative", N=N)


def generate_B(N: int) -> CoefficientTable:  # noqa: N802, N803
    """Return the exact coefficients B_0 … B_N.

    Iterative O(N²) convolution; nothing is memoised between calls.

    Raises:
        InvalidInputError: *N* is negative.
    """
    _check_order(N)
    B: list[Fraction] = [Fraction(1)]  # noqa: N806
    for n in range(N):
        conv = sum((B[k] * B[n - k] for k in range(n + 1)), Fraction(0))
        B.append(conv / ((n + 1) * (n + 2)))
    b = _integer_b(B)
    _LOGGER.debug("Generated B_0..B_%d", N)
    return CoefficientTable(tuple(B), tuple(b))


def _integer_b(B: list[Fraction] | tuple[Fraction, ...]) -> list[int]:  # noqa: N803
    out: list[int] = []
    fact_n = 1  # n!
    fact_n1 = 1  # (n+1)!
    for n, coeff in enumerate(B):
        if n > 0:
            fact_n *= n
            fact_n1 *= n + 1
        value = coeff * fact_n * fact_n1
        if value.denominator != 1:
            raise InternalInconsistencyError(
                "n!(n+1)! B_n is not an integer", n=n, value=str(value)
            )
        out.append(value.numerator)
    return out


def integer_b(table: CoefficientTable) -> list[int]:
    """Return b_n = n!(n+1)! B_n for every n in *table*.

    Raises:
        InternalInconsistencyError: some b_n is not an integer.
    """
    return _integer_b(table.B)


def integer_b_recurrence(N: int) -> list[int]:  # noqa: N803
    """Return b_0 … b_N from the integer-only form of the B recurrence.

        b_{n+1} = Σ_{k=0}^{n} C(n,k) C(n+2,k+1) b_k b_{n−k} / (n+2)

    The division is exact; a remainder raises InternalInconsistencyError.
    """
    _check_order(N)
    b = [1]
    for n in range(N):
        total = sum(comb(n, k) * comb(n + 2, k + 1) * b[k] * b[n - k] for k in range(n + 1))
        quotient, remainder = divmod(total, n + 2)
        if remainder:
            raise InternalInconsistencyError(
                "integer b recurrence left a remainder", n=n + 1, remainder=remainder
            )
        b.append(quotient)
    return b


def sequence_d(N: int) -> list[int]:  # noqa: N803
    """Return d_0 … d_N with d_0 = 1 and

        d_{n+1} = Σ_{k=0}^{n} C(n+1,k) C(n+1,k+1) d_k d_{n−k}
    """
    _check_order(N)
    d = [1]
    for n in range(N):
        d.append(
            sum(comb(n + 1, k) * comb(n + 1, k + 1) * d[k] * d[n - k] for k in range(n + 1))
        )
    return d


def catalan(N: int) -> list[int]:  # noqa: N803
    """Return C_0 … C_N.

    Computed by the convolution C_{n+1} = Σ C_k C_{n−k} and checked term by
    term against (2n)!/((n+1)! n!).
    """
    _check_order(N)
    values = [1]
    for n in range(N):
        values.append(sum(values[k] * values[n - k] for k in range(n + 1)))
    for n, value in enumerate(values):
        closed = factorial(2 * n) // (factorial(n + 1) * factorial(n))
        if closed != value:
            raise InternalInconsistencyError(
                "Catalan recurrence disagrees with the closed form",
                n=n,
                recurrence=value,
                closed_form=closed,
            )
    return values


def catalan_from_generating_function(N: int) -> list[int]:  # noqa: N803
    """Expand (1 − √(1−4t))/(2t) by the generalised binomial theorem.

    [t^n] = −binom(1/2, n+1)·(−4)^{n+1}/2, evaluated in exact rationals.
    """
    _check_order(N)
    half = Fraction(1, 2)
    binom = Fraction(1)  # binom(1/2, 0)
    out: list[int] = []
    for k in range(1, N + 2):
        binom = binom * (half - (k - 1)) / k
        value = -binom * Fraction(-4) ** k / 2
        if value.denominator != 1:
            raise InternalInconsistencyError(
                "generating function produced a non-integer", n=k - 1, value=str(value)
            )
        out.append(value.numerator)
    return out


def bessel_log_series(N: int) -> PowerSeries:  # noqa: N803
    """Return −log Σ_{k=0}^{N} (−t)^k/(k!)² known through t^N.

    The truncated sum agrees with the full Bessel series through t^N, so the
    result carries order N.
    """
    _check_order(N)
    terms = [Fraction((-1) ** k, factorial(k) ** 2) for k in range(N + 1)]
    terms[0] = Fraction(0)  # log(1 + s) needs s(0) = 0
    return series_neg(series_log1p(PowerSeries(tuple(terms))))


def d_from_bessel(N: int) -> list[int]:  # noqa: N803
    """Read d_0 … d_N back from the Bessel logarithm.

    [t^{n+1}] of :func:`bessel_log_series` equals d_n / ((n+1)!)².
    """
    _check_order(N)
    series = bessel_log_series(N + 1)
    out: list[int] = []
    for n in range(N + 1):
        value = series[n + 1] * factorial(n + 1) ** 2
        if value.denominator != 1:
            raise InternalInconsistencyError(
                "Bessel logarithm produced a non-integer d_n", n=n, value=str(value)
            )
        out.append(value.numerator)
    return out
