"""Domb-Sykes analysis of the separatrix coefficients.

For a coefficient law B_n ∼ (n − Δ) a^{−n} the ratios B_{n−1}/B_n are
linear in 1/(n − Δ) with intercept a, and

    s_n = (1 − B_{n−1} B_{n+1} / B_n²)^{−1/2}

is linear in n with root n = Δ.  Ratios and radicands are computed exactly
and converted to float only for the least-squares fits.

Inputs are a :class:`CoefficientTable` or any sequence of positive rationals
indexed from n = 0.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ._log import get_logger
from .coefficients import CoefficientTable
from .const import DEFAULT_MIN_WINDOW_WIDTH, MIN_FIT_WIDTH
from .exact_arith import RationalLike, to_float
from .exceptions import DegenerateFitError, InsufficientDataError, InvalidInputError

_LOGGER = get_logger(__name__)

Coefficients = Union[CoefficientTable, Sequence[RationalLike]]
Window = tuple[int, int]


@dataclass(frozen=True)
class OffsetFit:
    """Least-squares line s_n ≈ slope·n + intercept and its root Δ."""

    delta: float
    slope: float
    intercept: float
    window: Window
    residuals: tuple[tuple[int, float], ...]
    excluded: tuple[int, ...]


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares line ratio ≈ growth + slope/(n − Δ)."""

    growth: float
    slope: float
    delta: float
    window: Window
    residuals: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class DombSykesReport:
    ratios: tuple[tuple[int, float], ...]
    s_values: tuple[tuple[int, float], ...]
    delta: float
    growth: float
    fit_window: Window
    fit_residuals: tuple[tuple[int, float], ...]
    excluded: tuple[int, ...]
    fitted_delta: float
    growth_window: Window


def _coefficients(coeffs: Coefficients) -> tuple[Fraction, ...]:
    values = coeffs.B if isinstance(coeffs, CoefficientTable) else tuple(Fraction(c) for c in coeffs)
    for n, value in enumerate(values):
        if value <= 0:
            raise InvalidInputError("coefficients must be positive", n=n, value=str(value))
    if len(values) < 3:
        raise InsufficientDataError(
            "Domb-Sykes analysis needs at least three coefficients", count=len(values)
        )
    return values


def ds_ratios(coeffs: Coefficients) -> list[tuple[int, float]]:
    """(n, B_{n−1}/B_n) for n = 1 … N."""
    values = _coefficients(coeffs)
    return [(n, to_float(values[n - 1] / values[n])) for n in range(1, len(values))]


def _s_points(values: Sequence[Fraction]) -> tuple[list[tuple[int, float]], list[int]]:
    points: list[tuple[int, float]] = []
    excluded: list[int] = []
    for n in range(1, len(values) - 1):
        radicand = 1 - values[n - 1] * values[n + 1] / (values[n] * values[n])
        if radicand <= 0:
            excluded.append(n)
            continue
        points.append((n, 1.0 / math.sqrt(to_float(radicand))))
    return points, excluded


def s_values(coeffs: Coefficients) -> list[tuple[int, float]]:
    """(n, s_n) for n = 1 … N−1, skipping points with a non-positive radicand."""
    points, excluded = _s_points(_coefficients(coeffs))
    if excluded:
        _LOGGER.warning("Excluded %d s_n points with non-positive radicand", len(excluded))
    return points


def default_window(indices: Sequence[int]) -> Window:
    """Last half of *indices*, at least DEFAULT_MIN_WINDOW_WIDTH wide when available."""
    if len(indices) < MIN_FIT_WIDTH:
        raise InsufficientDataError(
            "too few points for a fit window", count=len(indices), min_width=MIN_FIT_WIDTH
        )
    width = min(len(indices), max(DEFAULT_MIN_WINDOW_WIDTH, len(indices) // 2))
    return indices[-width], indices[-1]


def _check_window(window: Window, first: int, last: int) -> None:
    lo, hi = window
    if hi - lo + 1 < MIN_FIT_WIDTH:
        raise InvalidInputError(
            "fit window is too narrow", window=window, min_width=MIN_FIT_WIDTH
        )
    if lo < first or hi > last:
        raise InvalidInputError(
            "fit window outside the available indices", window=window, available=(first, last)
        )


def _fit_line(xs: np.ndarray, ys: np.ndarray) -> tuple[float, float, np.ndarray]:
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(intercept), ys - (slope * xs + intercept)


def estimate_offset(coeffs: Coefficients, window: Window | None = None) -> OffsetFit:
    """Fit s_n ≈ m·n + c over *window* and return Δ = −c/m.

    Raises:
        InvalidInputError: window narrower than 5 or outside 1 … N−1.
        DegenerateFitError: fewer than two usable points remain in the window.
    """
    values = _coefficients(coeffs)
    points, excluded = _s_points(values)
    last = len(values) - 2
    if window is None:
        window = default_window(list(range(1, last + 1)))
    _check_window(window, 1, last)
    lo, hi = window
    used = [(n, s) for n, s in points if lo <= n <= hi]
    dropped = tuple(n for n in excluded if lo <= n <= hi)
    if dropped:
        _LOGGER.warning("Excluded s_n at n = %s from the offset fit", list(dropped))
    if len(used) < 2:
        raise DegenerateFitError(
            "every s_n point in the window was excluded", window=window, excluded=list(dropped)
        )
    ns = np.array([n for n, _ in used], dtype=float)
    ss = np.array([s for _, s in used])
    slope, intercept, residuals = _fit_line(ns, ss)
    delta = -intercept / slope
    _LOGGER.debug("Offset fit over %s: slope %.8g, Δ = %.8g", window, slope, delta)
    return OffsetFit(
        delta=delta,
        slope=slope,
        intercept=intercept,
        window=window,
        residuals=tuple((n, float(r)) for (n, _), r in zip(used, residuals)),
        excluded=dropped,
    )


def estimate_growth(
    coeffs: Coefficients, delta: RationalLike | float, window: Window | None = None
) -> GrowthFit:
    """Fit B_{n−1}/B_n against 1/(n − Δ); the intercept is the growth constant a."""
    values = _coefficients(coeffs)
    ratios = ds_ratios(values)
    last = len(values) - 1
    if window is None:
        window = default_window(list(range(1, last + 1)))
    _check_window(window, 1, last)
    lo, hi = window
    d = float(Fraction(delta))
    used = [(n, r) for n, r in ratios if lo <= n <= hi and n != d]
    xs = np.array([1.0 / (n - d) for n, _ in used])
    ys = np.array([r for _, r in used])
    slope, intercept, residuals = _fit_line(xs, ys)
    _LOGGER.debug("Growth fit over %s with Δ = %.6g: a = %.8g", window, d, intercept)
    return GrowthFit(
        growth=intercept,
        slope=slope,
        delta=d,
        window=window,
        residuals=tuple((n, float(r)) for (n, _), r in zip(used, residuals)),
    )


def domb_sykes_report(
    coeffs: Coefficients,
    window: Window | None = None,
    delta: RationalLike | float | None = None,
) -> DombSykesReport:
    """Full analysis: ratios, s_n, fitted Δ and the growth constant.

    The growth fit uses *delta* when given, otherwise the fitted Δ.  A given
    *window* applies to both fits; by default each uses the last half of
    its own index range.
    """
    values = _coefficients(coeffs)
    ratios = ds_ratios(values)
    points, excluded = _s_points(values)
    offset = estimate_offset(values, window)
    used_delta = offset.delta if delta is None else float(Fraction(delta))
    growth = estimate_growth(values, used_delta, window)
    if growth.growth <= 0:
        raise DegenerateFitError("growth constant is not positive", growth=growth.growth)
    _LOGGER.info("Domb-Sykes: Δ = %.6f, a = %.6f", offset.delta, growth.growth)
    return DombSykesReport(
        ratios=tuple(ratios),
        s_values=tuple(points),
        delta=used_delta,
        growth=growth.growth,
        fit_window=offset.window,
        fit_residuals=offset.residuals,
        excluded=tuple(excluded),
        fitted_delta=offset.delta,
        growth_window=growth.window,
    )


def convergence_factor(zc: float, growth: float) -> float:
    """εz_c / a, the geometric rate at which the separatrix series converges at z_c."""
    if not growth > 0:
        raise InvalidInputError("growth constant must be positive", growth=growth)
    return zc / growth
