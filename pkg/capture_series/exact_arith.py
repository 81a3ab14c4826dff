"""Exact rational scalars and truncated power-series algebra.

Everything symbolic in the package is built on :class:`fractions.Fraction`
and :class:`PowerSeries`.  There is no floating point in this module apart
from the explicit conversion helpers at the bottom.

A ``PowerSeries`` of order N knows the coefficients of ``w^0 … w^N`` of
some (possibly infinite) series.  Coefficients beyond N are *unknown*, not
zero, so every operation returns the largest order it can vouch for:

    series_add       order = min(a.order, b.order)
    series_mul       order = min(a.order, b.order)
    series_compose   order = min(outer.order, inner.order)
    series_log1p     order = s.order

Functions:
    series_add / series_sub / series_neg / series_scale
    series_mul          Cauchy product
    series_compose      outer ∘ inner by Horner's rule (inner[0] must be 0)
    series_log1p        log(1 + s) from the logarithm series
    format_rational     "p/q" (or "p") serialisation
    parse_rational      inverse of format_rational
    to_float            correctly rounded float of a rational
    render_decimal      fixed-point decimal string at a chosen precision
    render_scientific   d.ddde±xx string with a chosen number of significant digits
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exceptions import CompositionUndefinedError, InvalidInputError

Rational = Fraction
RationalLike = Union[Fraction, int, str]

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated formal power series with exact rational coefficients.

    ``coefficients[k]`` is the coefficient of ``w^k``; ``order`` is the index
    of the last known coefficient.  Instances are immutable and compare by
    value, so two runs of the same pipeline produce equal objects.
    """

    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise InvalidInputError("a power series needs at least one coefficient")
        object.__setattr__(
            self, "coefficients", tuple(Fraction(c) for c in self.coefficients)
        )

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_coefficients(
        cls, coefficients: Iterable[RationalLike], order: int | None = None
    ) -> PowerSeries:
        """Build a series from *coefficients*, lowest power first.

        When *order* is given the list is truncated to it, or padded with
        exact zeros.  Padding asserts that the input is an exact polynomial;
        callers holding a genuinely truncated series must not pad it.
        """
        coeffs = [Fraction(c) for c in coefficients]
        if order is not None:
            if order < 0:
                raise InvalidInputError("order must be non-negative", order=order)
            coeffs = coeffs[: order + 1] + [_ZERO] * (order + 1 - len(coeffs))
        return cls(tuple(coeffs))

    @classmethod
    def zero(cls, order: int) -> PowerSeries:
        return cls.from_coefficients([], order)

    @classmethod
    def one(cls, order: int) -> PowerSeries:
        return cls.from_coefficients([1], order)

    @classmethod
    def variable(cls, order: int) -> PowerSeries:
        """The indeterminate ``w`` itself, known to *order* (``order >= 1``)."""
        if order < 1:
            raise InvalidInputError("the indeterminate needs order >= 1", order=order)
        return cls.from_coefficients([0, 1], order)

    @classmethod
    def from_json(cls, data: Sequence[str]) -> PowerSeries:
        return cls(tuple(parse_rational(item) for item in data))

    # ------------------------------------------------------------------
    # Accessors
    # ------------------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, k: int) -> Fraction:
        if k < 0 or k > self.order:
            raise IndexError(f"coefficient w^{k} is not known (order {self.order})")
        return self.coefficients[k]

    def truncate(self, order: int) -> PowerSeries:
        """Forget the coefficients above *order* (never extends the series)."""
        if order > self.order:
            raise InvalidInputError(
                "cannot truncate above the known order", requested=order, order=self.order
            )
        return PowerSeries(self.coefficients[: order + 1])

    def shift(self, k: int) -> PowerSeries:
        """Multiply by ``w^k``; the known order grows by *k*."""
        return PowerSeries((_ZERO,) * k + self.coefficients)

    def evaluate(self, value: RationalLike) -> Fraction:
        """Exact partial sum of the known coefficients at ``w = value``."""
        w = Fraction(value)
        total = _ZERO
        for c in reversed(self.coefficients):
            total = total * w + c
        return total

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coefficients]

    # ------------------------------------------------------------------
    # Operators
    # ------------------------------------------------------------------

    def __add__(self, other: PowerSeries) -> PowerSeries:
        return series_add(self, other)

    def __sub__(self, other: PowerSeries) -> PowerSeries:
        return series_sub(self, other)

    def __neg__(self) -> PowerSeries:
        return series_neg(self)

    def __mul__(self, other: PowerSeries) -> PowerSeries:
        return series_mul(self, other)


# ----------------------------------------------------------------------
# Ring operations
# ----------------------------------------------------------------------


def series_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Coefficient-wise sum, known to the smaller of the two orders."""
    order = min(a.order, b.order)
    return PowerSeries(tuple(a[k] + b[k] for k in range(order + 1)))


def series_neg(a: PowerSeries) -> PowerSeries:
    return PowerSeries(tuple(-c for c in a.coefficients))


def series_sub(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    return series_add(a, series_neg(b))


def series_scale(a: PowerSeries, factor: RationalLike) -> PowerSeries:
    f = Fraction(factor)
    return PowerSeries(tuple(f * c for c in a.coefficients))


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at the smaller of the two orders."""
    order = min(a.order, b.order)
    ac = a.coefficients
    bc = b.coefficients
    out: list[Fraction] = []
    for k in range(order + 1):
        total = _ZERO
        for i in range(k + 1):
            if ac[i] and bc[k - i]:
                total += ac[i] * bc[k - i]
        out.append(total)
    return PowerSeries(tuple(out))


def _add_constant(a: PowerSeries, c: Fraction) -> PowerSeries:
    return PowerSeries((a.coefficients[0] + c,) + a.coefficients[1:])


def series_compose(outer: PowerSeries, inner: PowerSeries) -> PowerSeries:
    """Return ``outer(inner(θ))`` known to ``min(outer.order, inner.order)``.

    The inner series must vanish at the origin; otherwise every output
    coefficient would depend on infinitely many outer coefficients.

    Raises:
        CompositionUndefinedError: *inner* has a non-zero constant term.
    """
    if inner[0] != 0:
        raise CompositionUndefinedError(
            "composition needs an inner series with zero constant term",
            constant_term=format_rational(inner[0]),
        )
    order = min(outer.order, inner.order)
    inner_t = inner.truncate(order)
    result = PowerSeries.from_coefficients([outer[order]], order)
    for k in range(order - 1, -1, -1):
        result = _add_constant(series_mul(result, inner_t), outer[k])
    return result


def series_log1p(s: PowerSeries) -> PowerSeries:
    """Return ``log(1 + s)`` from ``Σ_{k≥1} (−1)^{k+1} w^k / k`` composed with *s*.

    Raises:
        CompositionUndefinedError: *s* has a non-zero constant term.
    """
    if s[0] != 0:
        raise CompositionUndefinedError(
            "log1p needs a series with zero constant term",
            constant_term=format_rational(s[0]),
        )
    log_coeffs = [_ZERO] + [
        Fraction((-1) ** (k + 1), k) for k in range(1, s.order + 1)
    ]
    return series_compose(PowerSeries(tuple(log_coeffs)), s)


# ----------------------------------------------------------------------
# Serialisation and explicit float conversion
# ----------------------------------------------------------------------


def format_rational(q: RationalLike) -> str:
    """Serialise as ``"p/q"``, or ``"p"`` when the denominator is 1."""
    return str(Fraction(q))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise InvalidInputError(f"not a rational literal: {text!r}", text=text) from err


def to_float(q: RationalLike) -> float:
    return float(Fraction(q))


def render_decimal(q: RationalLike, digits: int) -> str:
    """Round *q* to *digits* decimal places (half-even) without going through float."""
    if digits < 0:
        raise InvalidInputError("digits must be non-negative", digits=digits)
    scaled = round(Fraction(q) * 10**digits)
    sign = "-" if scaled < 0 else ""
    magnitude = str(abs(scaled))
    if digits == 0:
        return f"{sign}{magnitude}"
    magnitude = magnitude.rjust(digits + 1, "0")
    return f"{sign}{magnitude[:-digits]}.{magnitude[-digits:]}"


def render_scientific(q: RationalLike, significant: int) -> str:
    """Render *q* as ``d.ddde±xx`` with *significant* digits, rounded exactly."""
    if significant < 1:
        raise InvalidInputError("need at least one significant digit", significant=significant)
    value = Fraction(q)
    if value == 0:
        return f"{0:.{significant - 1}e}"
    sign = "-" if value < 0 else ""
    mag = abs(value)
    exponent = len(str(mag.numerator)) - len(str(mag.denominator))
    while mag >= Fraction(10) ** (exponent + 1):
        exponent += 1
    while mag < Fraction(10) ** exponent:
        exponent -= 1
    mantissa = round(mag / Fraction(10) ** exponent * 10 ** (significant - 1))
    if mantissa >= 10**significant:
        mantissa //= 10
        exponent += 1
    digits = str(mantissa)
    body = digits[0] + ("." + digits[1:] if significant > 1 else "")
    return f"{sign}{body}e{exponent:+03d}"
