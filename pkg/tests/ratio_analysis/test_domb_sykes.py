"""Unit tests for the Domb-Sykes analysis of the separatrix coefficients.

Covers:
- ds_ratios and s_values on real and synthetic coefficients
- estimate_offset / estimate_growth: the separatrix values and exact synthetic recovery
- window handling, exclusions and degenerate inputs
- domb_sykes_report, its invariance under rescaling, and the convergence factor εz_c / a
"""

from fractions import Fraction

import pytest

from capture_series.exceptions import DegenerateFitError, InsufficientDataError, InvalidInputError
from capture_series.ratio_analysis import (
    convergence_factor,
    default_window,
    domb_sykes_report,
    ds_ratios,
    estimate_growth,
    estimate_offset,
    s_values,
)

from ..conftest import ZC_REFERENCE


def synthetic(count: int, delta: Fraction, growth: int) -> list[Fraction]:
    """B_n = (n − Δ)·growth^{−n}, the law the analysis assumes."""
    return [(n - delta) / Fraction(growth) ** n for n in range(count)]


# ---------------------------------------------------------------------------
# Ratios and s_n
# ---------------------------------------------------------------------------


class TestRatios:
    """B_{n−1}/B_n and s_n = (1 − B_{n−1}B_{n+1}/B_n²)^{−1/2}."""

    def test_first_ratio(self, table40):
        """B_0/B_1 = 2."""
        assert ds_ratios(table40)[0] == (1, 2.0)

    def test_ratio_indices(self, table40):
        """Ratios run over n = 1 … N."""
        assert [n for n, _ in ds_ratios(table40)] == list(range(1, 41))

    def test_ratios_approach_growth(self, table40):
        """The ratios climb towards a ≈ 4.6537 from below."""
        ratios = [r for _, r in ds_ratios(table40)]
        assert 4.4 < ratios[-1] < 4.66
        assert ratios[-1] > ratios[-10]

    def test_s_values_exact_for_synthetic_law(self):
        """For B_n = (n − Δ)a^{−n} the s_n line is exactly n − Δ."""
        for n, s in s_values(synthetic(20, Fraction(-4, 5), 5)):
            assert s == pytest.approx(n + 0.8, rel=1e-12)

    def test_s_value_indices(self, table40):
        """s_n is defined for n = 1 … N−1."""
        assert [n for n, _ in s_values(table40)] == list(range(1, 40))

    def test_geometric_input_excluded(self):
        """Geometric coefficients have a zero radicand everywhere."""
        assert s_values([Fraction(1, 2**n) for n in range(10)]) == []


# ---------------------------------------------------------------------------
# Fits
# ---------------------------------------------------------------------------


class TestOffsetFit:
    """Δ from the root of the straight line through s_n."""

    def test_separatrix_offset(self, table40):
        """N = 40 over n = 20 … 39 gives Δ ≈ −4/5."""
        fit = estimate_offset(table40, (20, 39))
        assert -0.83 <= fit.delta <= -0.77
        assert fit.window == (20, 39)
        assert len(fit.residuals) == 20

    def test_synthetic_offset_recovered(self):
        """The synthetic law returns Δ = −4/5 to four significant figures."""
        fit = estimate_offset(synthetic(41, Fraction(-4, 5), 5))
        assert fit.delta == pytest.approx(-0.8, rel=1e-4)
        assert fit.slope == pytest.approx(1.0, rel=1e-9)

    def test_estimate_improves_with_later_window(self):
        """With a decaying correction the later window lies closer to Δ."""
        coeffs = [(n + Fraction(4, 5)) / Fraction(5) ** n + Fraction(1, 7**n) for n in range(41)]
        early = estimate_offset(coeffs, (5, 14))
        late = estimate_offset(coeffs, (25, 39))
        assert abs(late.delta + 0.8) < abs(early.delta + 0.8)

    def test_all_points_excluded(self):
        """A geometric sequence leaves nothing to fit."""
        with pytest.raises(DegenerateFitError):
            estimate_offset([Fraction(1, 2**n) for n in range(20)], (5, 15))

    def test_window_too_narrow(self, table40):
        """Windows narrower than five points are rejected."""
        with pytest.raises(InvalidInputError):
            estimate_offset(table40, (20, 23))

    def test_window_outside_range(self, table40):
        """s_n stops at N − 1."""
        with pytest.raises(InvalidInputError):
            estimate_offset(table40, (30, 40))


class TestGrowthFit:
    """a from the intercept of B_{n−1}/B_n against 1/(n − Δ)."""

    def test_separatrix_growth(self, table40):
        """With Δ = −4/5 and N = 40, a ≈ 4.6537."""
        fit = estimate_growth(table40, Fraction(-4, 5))
        assert 4.64 <= fit.growth <= 4.67
        assert fit.delta == -0.8

    def test_string_delta_accepted(self, table40):
        """Δ may be given as a rational literal."""
        assert estimate_growth(table40, "-4/5").growth == estimate_growth(table40, Fraction(-4, 5)).growth

    def test_synthetic_growth_recovered(self):
        """The synthetic law returns a = 5 to four significant figures."""
        fit = estimate_growth(synthetic(41, Fraction(-4, 5), 5), Fraction(-4, 5))
        assert fit.growth == pytest.approx(5.0, rel=1e-4)
        assert fit.slope == pytest.approx(-5.0, rel=1e-4)


class TestInputs:
    """Coefficient validation and default windows."""

    def test_too_few_coefficients(self):
        """Two coefficients give no s_n at all."""
        with pytest.raises(InsufficientDataError):
            ds_ratios([1, Fraction(1, 2)])

    def test_non_positive_coefficient(self):
        """The analysis assumes positive coefficients."""
        with pytest.raises(InvalidInputError):
            ds_ratios([1, 0, 1])

    def test_default_window_is_last_half(self):
        """39 indices give the last 19."""
        assert default_window(list(range(1, 40))) == (21, 39)

    def test_default_window_minimum_width(self):
        """Short ranges use at least ten points when available."""
        assert default_window(list(range(1, 13))) == (3, 12)

    def test_default_window_needs_five_points(self):
        """Fewer than five indices cannot be fitted."""
        with pytest.raises(InsufficientDataError):
            default_window([1, 2, 3, 4])


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


class TestReport:
    """domb_sykes_report bundles both fits."""

    def test_report_on_separatrix(self, table40):
        """The fitted Δ feeds the growth fit unless one is supplied."""
        report = domb_sykes_report(table40, (20, 39))
        assert report.delta == report.fitted_delta
        assert -0.83 <= report.fitted_delta <= -0.77
        assert 4.6 <= report.growth <= 4.7
        assert len(report.ratios) == 40
        assert len(report.s_values) == 39
        assert report.excluded == ()

    def test_supplied_delta_used(self, table40):
        """An explicit Δ overrides the fitted one for the growth fit."""
        report = domb_sykes_report(table40, delta=Fraction(-4, 5))
        assert report.delta == -0.8
        assert 4.64 <= report.growth <= 4.67

    def test_constant_rescaling_invariant(self, table40):
        """Multiplying every B_n by 7/3 changes neither Δ nor a."""
        scaled = [Fraction(7, 3) * b for b in table40.B]
        base = domb_sykes_report(table40, (20, 39))
        other = domb_sykes_report(scaled, (20, 39))
        assert other.fitted_delta == pytest.approx(base.fitted_delta, rel=1e-12)
        assert other.growth == pytest.approx(base.growth, rel=1e-12)

    def test_geometric_rescaling_scales_growth(self, table40):
        """B_n·λ^n (a rescaled ε) keeps Δ and divides a by λ."""
        lam = Fraction(7, 3)
        scaled = [b * lam**n for n, b in enumerate(table40.B)]
        base = domb_sykes_report(table40, (20, 39))
        other = domb_sykes_report(scaled, (20, 39))
        assert other.fitted_delta == pytest.approx(base.fitted_delta, rel=1e-12)
        assert other.growth == pytest.approx(base.growth / float(lam), rel=1e-9)

    def test_convergence_factor(self, table40):
        """εz_c / a ≈ 0.197."""
        report = domb_sykes_report(table40, delta=Fraction(-4, 5))
        assert convergence_factor(ZC_REFERENCE, report.growth) == pytest.approx(0.197, abs=0.002)

    def test_convergence_factor_needs_positive_growth(self):
        """a ≤ 0 is rejected."""
        with pytest.raises(InvalidInputError):
            convergence_factor(0.9, 0.0)
