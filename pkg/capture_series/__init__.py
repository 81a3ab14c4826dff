"""Exact series and numerical checks for the capture equation ẍ + ẋ + εx² = 0."""

from __future__ import annotations

from .closed_form import (
    Branch,
    InitialConditions,
    SolutionConstants,
    constants_from_ic,
    matched_eval,
    rg_eval,
)
from .coefficients import CoefficientTable, catalan, generate_B, integer_b, sequence_d
from .const import VERSION
from .critical_series import CriticalSeries, critical_series, partial_sum_table, term_ratios
from .exact_arith import PowerSeries, Rational
from .exceptions import CaptureSeriesError
from .ode_oracle import IntegratorConfig, classify_fate, find_xc_bisection, trace_separatrix
from .ratio_analysis import domb_sykes_report
from .separatrix import SeparatrixExpansion, expansion

__version__ = VERSION

__all__ = [
    "Branch",
    "CaptureSeriesError",
    "CoefficientTable",
    "CriticalSeries",
    "InitialConditions",
    "IntegratorConfig",
    "PowerSeries",
    "Rational",
    "SeparatrixExpansion",
    "SolutionConstants",
    "__version__",
    "catalan",
    "classify_fate",
    "constants_from_ic",
    "critical_series",
    "domb_sykes_report",
    "expansion",
    "find_xc_bisection",
    "generate_B",
    "integer_b",
    "matched_eval",
    "partial_sum_table",
    "rg_eval",
    "sequence_d",
    "term_ratios",
    "trace_separatrix",
]
