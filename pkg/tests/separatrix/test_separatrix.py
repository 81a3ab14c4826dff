"""Unit tests for the separatrix series x = z Σ B_n (−εz)^n.

Covers:
- exact evaluation of x and u at rational z
- x > 0 and u < 0 for every truncation up to the nullcline crossing
- the ODE residual: vanishing low orders and the first surviving coefficient
- the single-sum identity for x²
- float sampling of the truncation family
- agreement with the critical series at the nullcline crossing
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from capture_series.coefficients import generate_B
from capture_series.critical_series import partial_sum_table
from capture_series.exact_arith import series_mul
from capture_series.exceptions import InvalidInputError
from capture_series.separatrix import (
    SeparatrixExpansion,
    eval_at_time,
    eval_u,
    eval_u_float,
    eval_x,
    eval_x_float,
    expansion,
    ode_residual,
    sample_family,
    square_via_recurrence,
    x_series,
)

from ..conftest import ZC_REFERENCE

# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


class TestEvaluation:
    """Exact partial sums of x and u = ẋ."""

    def test_first_order_position(self):
        """N = 1, z = 1/2: x = (1/2)(1 − 1/4) = 3/8."""
        assert eval_x(expansion(1), Fraction(1, 2)) == Fraction(3, 8)

    def test_first_order_velocity(self):
        """N = 1, z = 1/2: u = −(1/2)(1 − 1/2) = −1/4."""
        assert eval_u(expansion(1), Fraction(1, 2)) == Fraction(-1, 4)

    def test_origin(self):
        """z = 0 (t → ∞) is the attractor x = u = 0."""
        exp = expansion(5)
        assert eval_x(exp, 0) == 0
        assert eval_u(exp, 0) == 0

    def test_negative_z_rejected(self):
        """z = e^{−t} is never negative."""
        with pytest.raises(InvalidInputError):
            eval_x(expansion(2), Fraction(-1, 10))

    def test_epsilon_scales_argument(self):
        """For ε = 2 the series is x = z Σ B_n (−2z)^n."""
        exp = expansion(1, epsilon=2)
        assert eval_x(exp, Fraction(1, 4)) == Fraction(1, 4) * (1 - Fraction(1, 2) * Fraction(1, 2))

    def test_float_helpers_match_exact(self):
        """eval_*_float round the exact value once."""
        exp = expansion(6)
        assert eval_x_float(exp, 0.5) == float(eval_x(exp, Fraction(0.5)))
        assert eval_u_float(exp, 0.5) == float(eval_u(exp, Fraction(0.5)))

    def test_time_parameterisation(self):
        """eval_at_time(t) samples at z = e^{−t}."""
        exp = expansion(6)
        x, u = eval_at_time(exp, 1.0)
        assert x == pytest.approx(eval_x_float(exp, math.exp(-1.0)), rel=1e-15)
        assert u == pytest.approx(eval_u_float(exp, math.exp(-1.0)), rel=1e-15)

    def test_expansion_validates_inputs(self):
        """Negative order, short tables and non-positive ε are rejected."""
        with pytest.raises(InvalidInputError):
            SeparatrixExpansion(generate_B(3), -1)
        with pytest.raises(InvalidInputError):
            SeparatrixExpansion(generate_B(3), 4)
        with pytest.raises(InvalidInputError):
            expansion(2, epsilon=0)


class TestSigns:
    """Between the attractor and the nullcline crossing the particle sits at x > 0 moving inwards."""

    @pytest.mark.parametrize("order", range(5, 31))
    def test_positive_position_negative_velocity(self, table40, order):
        """Every truncation N ≥ 5 keeps x > 0 and u < 0 for 0 < z ≤ z_c."""
        exp = SeparatrixExpansion(table40, order)
        for z in [Fraction(k, 20) for k in range(1, 19)] + [Fraction(ZC_REFERENCE)]:
            assert eval_x(exp, z) > 0
            assert eval_u(exp, z) < 0


# ---------------------------------------------------------------------------
# Residual and square identity
# ---------------------------------------------------------------------------


class TestResidual:
    """The degree-N truncation solves the ODE through z^{N+1}."""

    @pytest.mark.parametrize("order", [0, 1, 2, 5, 12, 25, 39])
    def test_low_orders_vanish(self, table40, order):
        """Coefficients of z^0 … z^{N+1} of ẍ + ẋ + εx² are exactly zero."""
        residual = ode_residual(SeparatrixExpansion(table40, order))
        assert all(c == 0 for c in residual.coefficients[: order + 2])

    @pytest.mark.parametrize("order", [1, 4, 10, 39])
    def test_first_surviving_coefficient(self, table40, order):
        """[z^{N+2}] = ε(−ε)^N (N+1)(N+2) B_{N+1}."""
        residual = ode_residual(SeparatrixExpansion(table40, order))
        expected = (-1) ** order * (order + 1) * (order + 2) * table40.B[order + 1]
        assert residual[order + 2] == expected

    def test_residual_with_other_epsilon(self, table40):
        """The cancellation holds for ε ≠ 1 and the leading term carries ε^{N+1}."""
        eps = Fraction(3, 7)
        residual = ode_residual(SeparatrixExpansion(table40, 6, eps))
        assert all(c == 0 for c in residual.coefficients[:8])
        assert residual[8] == eps * (-eps) ** 6 * 7 * 8 * table40.B[7]

    @pytest.mark.parametrize("order", [1, 2, 10, 40])
    def test_square_identity(self, table40, order):
        """x² from the single-sum identity equals the Cauchy square exactly."""
        exp = SeparatrixExpansion(table40, order)
        x = x_series(exp)
        assert square_via_recurrence(exp) == series_mul(x, x)

    def test_square_identity_needs_order_one(self):
        """At N = 0 there is nothing to shift into the identity."""
        with pytest.raises(InvalidInputError):
            square_via_recurrence(expansion(0))


# ---------------------------------------------------------------------------
# Family sampling and nullcline crossing
# ---------------------------------------------------------------------------


class TestFamily:
    """sample_family evaluates every truncation 1 … max_order on a z grid."""

    def test_shapes(self, table40):
        """x and u are (max_order, len(z)) arrays."""
        family = sample_family(table40, 8, np.linspace(0.0, 1.2, 25))
        assert family.x.shape == (8, 25)
        assert family.u.shape == (8, 25)
        assert family.max_order == 8

    def test_first_truncation_value(self, table40):
        """Row k = 1 at z = 1/2 equals the exact 3/8."""
        family = sample_family(table40, 3, [0.5])
        assert family.x[0, 0] == pytest.approx(0.375, abs=1e-15)

    def test_negative_z_rejected(self, table40):
        """Negative grid points are rejected."""
        with pytest.raises(InvalidInputError):
            sample_family(table40, 2, [-0.1, 0.5])

    def test_max_order_at_least_one(self, table40):
        """An empty family is refused."""
        with pytest.raises(InvalidInputError):
            sample_family(table40, 0, [0.5])


class TestNullclineCrossing:
    """At z = z_c the separatrix lies on u = −x²."""

    def test_velocity_equals_minus_square(self, table40, critical30):
        """eval_u(z_c) = −eval_x(z_c)² to well within the last term of the z_c series."""
        (row,) = partial_sum_table(critical30, [30])
        exp = SeparatrixExpansion(table40, 30)
        x = eval_x(exp, row.zc_sum)
        u = eval_u(exp, row.zc_sum)
        assert abs(float(u + x * x)) < 1e-7

    def test_position_matches_critical_series(self, table40, critical30):
        """eval_x at the z_c partial sum agrees with the εx_c partial sum."""
        (row,) = partial_sum_table(critical30, [30])
        x = eval_x(SeparatrixExpansion(table40, 30), row.zc_sum)
        assert float(x) == pytest.approx(row.xc_float, abs=1e-8)
