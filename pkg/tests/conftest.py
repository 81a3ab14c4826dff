"""pytest configuration and shared fixtures for the capture-series test suite.

Coefficient tables and solved critical series are exact and immutable, so
they are built once per session and shared by every module that needs
them.
"""

import logging

import pytest

from capture_series.coefficients import CoefficientTable, generate_B
from capture_series.const import PACKAGE_LOGGER
from capture_series.critical_series import CriticalSeries, critical_series
from capture_series.ode_oracle import IntegratorConfig

# -----------------------------------------------------------------------
# Shared constants
# -----------------------------------------------------------------------

B_FIRST_SEVEN = ("1", "1/2", "1/6", "7/144", "19/1440", "37/10800", "29/33600")
ZC_FIRST_SEVEN = ("1", "0", "-1/12", "-1/72", "17/1440", "119/21600", "-949/725760")
XC_FIRST_SEVEN = ("1", "-1/2", "1/12", "1/48", "-1/360", "-17/4320", "-43/80640")

# Partial sums of εz_c and εx_c at θ = 1, eight decimals, with |n-th term|
CRITICAL_ROWS = {
    1: ("1.00000000", "1.000e+00", "1.00000000", "1.000e+00"),
    2: ("1.00000000", "0.000e+00", "0.50000000", "5.000e-01"),
    3: ("0.91666667", "8.333e-02", "0.58333333", "8.333e-02"),
    4: ("0.90277778", "1.389e-02", "0.60416667", "2.083e-02"),
    5: ("0.91458333", "1.181e-02", "0.60138889", "2.778e-03"),
    10: ("0.91742317", "4.125e-04", "0.59786408", "8.479e-05"),
    15: ("0.91745309", "2.015e-05", "0.59777988", "5.033e-06"),
    20: ("0.91745195", "1.117e-06", "0.59777679", "3.378e-07"),
    25: ("0.91745176", "6.525e-08", "0.59777667", "2.357e-08"),
    30: ("0.91745174", "3.872e-09", "0.59777667", "1.664e-09"),
}

XC_REFERENCE = 0.597777
ZC_REFERENCE = 0.917452


# -----------------------------------------------------------------------
# Shared fixtures
# -----------------------------------------------------------------------


@pytest.fixture(scope="session")
def table40() -> CoefficientTable:
    """B_0 … B_40, enough for every Domb-Sykes window used in the suite."""
    return generate_B(40)


@pytest.fixture(scope="session")
def critical30(table40: CoefficientTable) -> CriticalSeries:
    """εz_c and εx_c solved through θ^30."""
    return critical_series(30, table40)


@pytest.fixture
def oracle_cfg() -> IntegratorConfig:
    """Default integrator settings (rel 1e-10, abs 1e-12, t_max 200)."""
    return IntegratorConfig()


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Drop any stderr handler the CLI attached so captured streams are not reused."""
    yield
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_capture_series", False):
            logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
