"""Constants for the capture-series package."""

from __future__ import annotations

from fractions import Fraction

PACKAGE_LOGGER = "capture_series"
PROG_NAME = "capture-series"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# Environment variable overriding the default float rendering precision
ENV_FLOAT_DIGITS = "CAPTURE_SERIES_FLOAT_DIGITS"

# Output formats
FORMAT_CSV = "csv"
FORMAT_JSON = "json"
OUTPUT_FORMATS = [FORMAT_CSV, FORMAT_JSON]

# Rendering
DEFAULT_FLOAT_DIGITS = 8
TERM_SIGNIFICANT_DIGITS = 4  # partial-sum terms render as d.ddde±xx
MIN_FLOAT_DIGITS = 1
MAX_FLOAT_DIGITS = 60

# Series orders
DEFAULT_CRITICAL_ORDER = 30
DEFAULT_DOMB_SYKES_COUNT = 40
MAX_SERIES_ORDER = 400
CRITICAL_TABLE_ROWS = [1, 2, 3, 4, 5, 10, 15, 20, 25, 30]

# Separatrix family of curves
DEFAULT_SEPARATRIX_MAX_ORDER = 8
DEFAULT_Z_MIN = 0.01
DEFAULT_Z_MAX = 1.2
DEFAULT_POINTS = 200
MAX_POINTS = 100_000

# Closed-form solutions
DEFAULT_EPSILON = 1.0
DEFAULT_T_MAX_SOLUTION = 10.0
POLE_TOL = 1e-12  # |εt·invC − 1| below this is treated as the pole

# Integrator defaults; xc must be resolvable to 1e-7
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
DEFAULT_T_MAX = 200.0
DEFAULT_X_BLOWUP = 1e6
DEFAULT_ATTRACTOR_TOL = 1e-9
DEFAULT_H_MAX = 1.0
# Upper x bound of the forward-invariant escape region {x > 0, u > -2x^2}
DEFAULT_ESCAPE_X_MAX = 0.125

# Step-size controller (Dormand-Prince with PI control)
STEP_SAFETY = 0.9
STEP_FACTOR_MIN = 0.2
STEP_FACTOR_MAX = 10.0
PI_BETA = 0.04
STEP_UNDERFLOW = 1e-14  # relative to max(1, |t|)

# Separatrix trace and bisection
DEFAULT_TRACE_DELTA = 1e-6
MAX_TRACE_DELTA = 1e-3
DEFAULT_XC_TOL = 1e-7
BISECTION_LO = 0.0
BISECTION_HI = 1.0

# Phase portrait
DEFAULT_PORTRAIT_X_RANGE = (0.0, 1.5)
DEFAULT_PORTRAIT_U_RANGE = (-1.5, 0.5)
DEFAULT_PORTRAIT_RESOLUTION = (31, 21)
MAX_PORTRAIT_CELLS = 250_000

# Domb-Sykes fits
MIN_FIT_WIDTH = 5
DEFAULT_MIN_WINDOW_WIDTH = 10
REFERENCE_DELTA = Fraction(-4, 5)  # offset the separatrix s_n line extrapolates to

# Fates
FATE_CAPTURE = "capture"
FATE_ESCAPE = "escape"
FATE_UNDECIDED = "undecided"
FATE_SEPARATRIX = "separatrix"

# Subcommands
CMD_COEFFS = "coeffs"
CMD_CRITICAL = "critical"
CMD_CRITICAL_TERMS = "critical-terms"
CMD_SEPARATRIX = "separatrix"
CMD_SOLUTION = "solution"
CMD_FATE = "fate"
CMD_TRACE_SEPARATRIX = "trace-separatrix"
CMD_FIND_XC = "find-xc"
CMD_PORTRAIT = "portrait"
CMD_DOMB_SYKES = "domb-sykes"
CMD_DATASET = "dataset"

# Closed-form methods
METHOD_MATCHED = "matched"
METHOD_RG = "rg"

# Figure datasets
FIG1_PORTRAIT = "fig1-portrait"
FIG2_SEPARATRIX = "fig2-separatrix"
FIG3_TERMS = "fig3-terms"
FIG4_DOMB_SYKES = "fig4-domb-sykes"
FIGURES = [FIG1_PORTRAIT, FIG2_SEPARATRIX, FIG3_TERMS, FIG4_DOMB_SYKES]
# Parameters each figure reads; anything else is rejected.
DATASET_PARAMS = {
    FIG1_PORTRAIT: frozenset({"x_range", "u_range", "resolution", "delta", "points"}),
    FIG2_SEPARATRIX: frozenset({"max_order", "z_min", "z_max", "points"}),
    FIG3_TERMS: frozenset({"order"}),
    FIG4_DOMB_SYKES: frozenset({"count", "delta"}),
}

# Exit codes
EXIT_OK = 0
EXIT_COMPUTATION_ERROR = 1
EXIT_CONFIG_ERROR = 2

VERSION = "2026.10.0"
