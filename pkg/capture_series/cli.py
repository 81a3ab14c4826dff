"""Command-line front end: ``capture-series <command> [options]``.

Each subcommand runs one library operation and writes a CSV (default) or
JSON document to stdout or ``--out PATH``.  Parameters are validated with a
voluptuous schema per command before anything is computed.

Exit status:
    0  success
    1  a computation raised a CaptureSeriesError
    2  invalid arguments or configuration, or an unwritable output path

Errors are reported on stderr as one JSON object
``{"error": <class>, "message": ..., "context": {...}}``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, TextIO

import voluptuous as vol

from ._log import configure_logging, get_logger
from .closed_form import InitialConditions
from .coefficients import generate_B
from .const import (
    BISECTION_HI,
    BISECTION_LO,
    CMD_COEFFS,
    CMD_CRITICAL,
    CMD_CRITICAL_TERMS,
    CMD_DATASET,
    CMD_DOMB_SYKES,
    CMD_FATE,
    CMD_FIND_XC,
    CMD_PORTRAIT,
    CMD_SEPARATRIX,
    CMD_SOLUTION,
    CMD_TRACE_SEPARATRIX,
    DATASET_PARAMS,
    DEFAULT_ABS_TOL,
    DEFAULT_CRITICAL_ORDER,
    DEFAULT_DOMB_SYKES_COUNT,
    DEFAULT_EPSILON,
    DEFAULT_FLOAT_DIGITS,
    DEFAULT_POINTS,
    DEFAULT_PORTRAIT_RESOLUTION,
    DEFAULT_PORTRAIT_U_RANGE,
    DEFAULT_PORTRAIT_X_RANGE,
    DEFAULT_REL_TOL,
    DEFAULT_SEPARATRIX_MAX_ORDER,
    DEFAULT_T_MAX,
    DEFAULT_T_MAX_SOLUTION,
    DEFAULT_TRACE_DELTA,
    DEFAULT_XC_TOL,
    DEFAULT_Z_MAX,
    DEFAULT_Z_MIN,
    ENV_FLOAT_DIGITS,
    EXIT_COMPUTATION_ERROR,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    FIGURES,
    FORMAT_CSV,
    FORMAT_JSON,
    MAX_FLOAT_DIGITS,
    MAX_POINTS,
    MAX_SERIES_ORDER,
    MAX_TRACE_DELTA,
    METHOD_MATCHED,
    METHOD_RG,
    MIN_FLOAT_DIGITS,
    OUTPUT_FORMATS,
    PROG_NAME,
    VERSION,
)
from .datasets import (
    Table,
    coeffs_table,
    critical_table,
    critical_terms_table,
    domb_sykes_table,
    emit_dataset,
    format_float,
    portrait_table,
    separatrix_table,
    solution_table,
    write_csv,
    write_json,
)
from .exceptions import CaptureSeriesError, ConfigError
from .ode_oracle import (
    IntegratorConfig,
    classify_fate,
    find_xc_bisection,
    phase_portrait,
    trace_separatrix,
)
from .ratio_analysis import domb_sykes_report

_LOGGER = get_logger(__name__)

_GLOBAL_KEYS = ("command", "output_format", "out", "float_digits", "verbose")


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises ConfigError instead of exiting on bad input."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message, prog=self.prog)


# ----------------------------------------------------------------------
# Argument types
# ----------------------------------------------------------------------


def _float_pair(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from err
    return lo, hi


def _int_pair(text: str) -> tuple[int, int]:
    try:
        first, second = (int(part) for part in text.split(":"))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected A:B with integers, got {text!r}") from err
    return first, second


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


# ----------------------------------------------------------------------
# Validation schemas
# ----------------------------------------------------------------------


def _finite(value: Any) -> float:
    number = float(value)
    if not math.isfinite(number):
        raise vol.Invalid("must be finite")
    return number


def _increasing(pair: Sequence[float]) -> tuple[float, float]:
    lo, hi = pair
    if not lo < hi:
        raise vol.Invalid("range must satisfy LO < HI")
    return float(lo), float(hi)


_FINITE = vol.All(vol.Coerce(float), _finite)
_POSITIVE = vol.All(vol.Coerce(float), _finite, vol.Range(min=0, min_included=False))
_POINTS = vol.All(vol.Coerce(int), vol.Range(min=2, max=MAX_POINTS))
_RANGE = vol.All(vol.ExactSequence([_FINITE, _FINITE]), _increasing)

_INTEGRATOR = {
    vol.Required("rel_tol"): _POSITIVE,
    vol.Required("abs_tol"): _POSITIVE,
    vol.Required("t_max"): _POSITIVE,
}

SCHEMAS: dict[str, vol.Schema] = {
    CMD_COEFFS: vol.Schema(
        {vol.Required("count"): vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_SERIES_ORDER + 1))}
    ),
    CMD_CRITICAL: vol.Schema(
        {
            vol.Required("order"): vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_SERIES_ORDER)),
            vol.Required("rows"): vol.Any(None, [vol.All(vol.Coerce(int), vol.Range(min=1))]),
        }
    ),
    CMD_CRITICAL_TERMS: vol.Schema(
        {vol.Required("order"): vol.All(vol.Coerce(int), vol.Range(min=2, max=MAX_SERIES_ORDER))}
    ),
    CMD_SEPARATRIX: vol.Schema(
        {
            vol.Required("max_order"): vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_SERIES_ORDER)),
            vol.Required("z_min"): vol.All(_FINITE, vol.Range(min=0)),
            vol.Required("z_max"): _POSITIVE,
            vol.Required("points"): _POINTS,
        }
    ),
    CMD_SOLUTION: vol.Schema(
        {
            vol.Required("method"): vol.In([METHOD_MATCHED, METHOD_RG]),
            vol.Required("x0"): _FINITE,
            vol.Required("u0"): _FINITE,
            vol.Required("epsilon"): _POSITIVE,
            vol.Required("t_max"): _POSITIVE,
            vol.Required("points"): _POINTS,
            vol.Required("branch"): vol.In(["plus", "minus"]),
        }
    ),
    CMD_FATE: vol.Schema({vol.Required("x0"): _FINITE, vol.Required("u0"): _FINITE, **_INTEGRATOR}),
    CMD_TRACE_SEPARATRIX: vol.Schema(
        {
            vol.Required("delta"): vol.All(
                _FINITE, vol.Range(min=0, max=MAX_TRACE_DELTA, min_included=False)
            ),
            **_INTEGRATOR,
        }
    ),
    CMD_FIND_XC: vol.Schema(
        {
            vol.Required("tol"): _POSITIVE,
            vol.Required("lo"): _FINITE,
            vol.Required("hi"): _FINITE,
            **_INTEGRATOR,
        }
    ),
    CMD_PORTRAIT: vol.Schema(
        {
            vol.Required("x_range"): _RANGE,
            vol.Required("u_range"): _RANGE,
            vol.Required("resolution"): vol.ExactSequence(
                [vol.All(vol.Coerce(int), vol.Range(min=1)), vol.All(vol.Coerce(int), vol.Range(min=1))]
            ),
            **_INTEGRATOR,
        }
    ),
    CMD_DOMB_SYKES: vol.Schema(
        {
            vol.Required("count"): vol.All(vol.Coerce(int), vol.Range(min=3, max=MAX_SERIES_ORDER + 1)),
            vol.Required("window"): vol.Any(None, vol.ExactSequence([vol.Coerce(int), vol.Coerce(int)])),
            vol.Required("delta"): vol.Any(None, _FINITE),
        }
    ),
    CMD_DATASET: vol.Schema(
        {
            vol.Required("figure"): vol.In(FIGURES),
            vol.Required("out_dir"): vol.All(str, vol.Length(min=1)),
            vol.Optional("order"): vol.Any(None, vol.All(vol.Coerce(int), vol.Range(min=2, max=MAX_SERIES_ORDER))),
            vol.Optional("count"): vol.Any(
                None, vol.All(vol.Coerce(int), vol.Range(min=3, max=MAX_SERIES_ORDER + 1))
            ),
            vol.Optional("max_order"): vol.Any(
                None, vol.All(vol.Coerce(int), vol.Range(min=1, max=MAX_SERIES_ORDER))
            ),
            vol.Optional("points"): vol.Any(None, _POINTS),
            vol.Optional("resolution"): vol.Any(
                None,
                vol.ExactSequence(
                    [vol.All(vol.Coerce(int), vol.Range(min=1)), vol.All(vol.Coerce(int), vol.Range(min=1))]
                ),
            ),
            vol.Optional("delta"): vol.Any(None, _FINITE),
            vol.Optional("z_min"): vol.Any(None, vol.All(_FINITE, vol.Range(min=0))),
            vol.Optional("z_max"): vol.Any(None, _POSITIVE),
            vol.Optional("x_range"): vol.Any(None, _RANGE),
            vol.Optional("u_range"): vol.Any(None, _RANGE),
        }
    ),
}


# ----------------------------------------------------------------------
# Configuration
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs; ``record()`` is what output files embed."""

    command: str
    params: dict[str, Any]
    output_format: str = FORMAT_CSV
    out_path: str | None = None
    float_digits: int = DEFAULT_FLOAT_DIGITS
    explicit_digits: bool = False
    verbosity: int = 0

    def record(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "params": self.params,
            "format": self.output_format,
            "float_digits": self.float_digits,
        }


def _default_float_digits() -> int:
    raw = os.environ.get(ENV_FLOAT_DIGITS)
    if raw is None or not raw.strip():
        return DEFAULT_FLOAT_DIGITS
    try:
        digits = int(raw)
    except ValueError as err:
        raise ConfigError(
            f"{ENV_FLOAT_DIGITS} must be an integer", variable=ENV_FLOAT_DIGITS, value=raw
        ) from err
    return digits


def create_parser() -> argparse.ArgumentParser:
    """Build the parser with one subparser per command."""
    common = _ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        dest="output_format",
        choices=OUTPUT_FORMATS,
        default=FORMAT_CSV,
        help="output format (default: csv)",
    )
    common.add_argument("--out", default=None, metavar="PATH", help="write to PATH instead of stdout")
    common.add_argument(
        "--float-digits",
        type=int,
        default=None,
        metavar="D",
        help=f"precision of inexact columns (default: ${ENV_FLOAT_DIGITS} or {DEFAULT_FLOAT_DIGITS})",
    )
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    integrator = _ArgumentParser(add_help=False)
    integrator.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL)
    integrator.add_argument("--abs-tol", type=float, default=DEFAULT_ABS_TOL)
    integrator.add_argument("--t-max", type=float, default=DEFAULT_T_MAX, help="integration horizon")

    parser = _ArgumentParser(
        prog=PROG_NAME,
        description="Exact series and numerical checks for the capture equation x'' + x' + εx² = 0.",
    )
    parser.add_argument("--version", action="version", version=f"{PROG_NAME} {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(CMD_COEFFS, parents=[common], help="separatrix coefficients B_n and b_n")
    p.add_argument("--count", type=int, default=7, help="number of coefficients, n = 0..count-1")

    p = sub.add_parser(CMD_CRITICAL, parents=[common], help="partial sums of εz_c and εx_c")
    p.add_argument("--order", type=int, default=DEFAULT_CRITICAL_ORDER)
    p.add_argument("--rows", type=_int_list, default=None, help="comma-separated truncation orders")

    p = sub.add_parser(CMD_CRITICAL_TERMS, parents=[common], help="term ratios of the critical series")
    p.add_argument("--order", type=int, default=DEFAULT_CRITICAL_ORDER)

    p = sub.add_parser(CMD_SEPARATRIX, parents=[common], help="family of truncated separatrices")
    p.add_argument("--max-order", type=int, default=DEFAULT_SEPARATRIX_MAX_ORDER)
    p.add_argument("--z-min", type=float, default=DEFAULT_Z_MIN)
    p.add_argument("--z-max", type=float, default=DEFAULT_Z_MAX)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)

    p = sub.add_parser(CMD_SOLUTION, parents=[common], help="matched or RG closed-form trajectory")
    p.add_argument("--method", choices=[METHOD_MATCHED, METHOD_RG], default=METHOD_MATCHED)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--u0", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--t-max", type=float, default=DEFAULT_T_MAX_SOLUTION)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--branch", choices=["plus", "minus"], default="plus")

    p = sub.add_parser(CMD_FATE, parents=[common, integrator], help="numerical fate of one initial state")
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--u0", type=float, required=True)

    p = sub.add_parser(
        CMD_TRACE_SEPARATRIX, parents=[common, integrator], help="backward trace of the separatrix"
    )
    p.add_argument("--delta", type=float, default=DEFAULT_TRACE_DELTA)

    p = sub.add_parser(CMD_FIND_XC, parents=[common, integrator], help="bisection for x_c on the nullcline")
    p.add_argument("--tol", type=float, default=DEFAULT_XC_TOL)
    p.add_argument("--lo", type=float, default=BISECTION_LO)
    p.add_argument("--hi", type=float, default=BISECTION_HI)

    p = sub.add_parser(CMD_PORTRAIT, parents=[common, integrator], help="fates on a grid of initial states")
    p.add_argument("--x-range", type=_float_pair, default=DEFAULT_PORTRAIT_X_RANGE, metavar="LO:HI")
    p.add_argument("--u-range", type=_float_pair, default=DEFAULT_PORTRAIT_U_RANGE, metavar="LO:HI")
    p.add_argument("--resolution", type=_int_pair, default=DEFAULT_PORTRAIT_RESOLUTION, metavar="NX:NU")

    p = sub.add_parser(CMD_DOMB_SYKES, parents=[common], help="Domb-Sykes analysis of B_n")
    p.add_argument("--count", type=int, default=DEFAULT_DOMB_SYKES_COUNT)
    p.add_argument("--window", type=_int_pair, default=None, metavar="LO:HI")
    p.add_argument("--delta", type=float, default=None, help="offset used for the growth fit")

    p = sub.add_parser(CMD_DATASET, parents=[common], help="write the CSV files behind a figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--out-dir", default=".", help="directory for the CSV files")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--points", type=int, default=None)
    p.add_argument("--resolution", type=_int_pair, default=None, metavar="NX:NU")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--z-min", type=float, default=None)
    p.add_argument("--z-max", type=float, default=None)
    p.add_argument("--x-range", type=_float_pair, default=None, metavar="LO:HI")
    p.add_argument("--u-range", type=_float_pair, default=None, metavar="LO:HI")

    return parser


def build_config(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse *argv* and validate it into a RunConfig.

    Raises:
        ConfigError: unknown flags, malformed values or out-of-range parameters.
    """
    args = create_parser().parse_args(argv)
    raw = {key: value for key, value in vars(args).items() if key not in _GLOBAL_KEYS}
    try:
        params = SCHEMAS[args.command](raw)
    except vol.Invalid as err:
        raise ConfigError(f"invalid {args.command} parameters: {err}", command=args.command) from err

    explicit = args.float_digits is not None
    digits = args.float_digits if explicit else _default_float_digits()
    if not MIN_FLOAT_DIGITS <= digits <= MAX_FLOAT_DIGITS:
        raise ConfigError(
            "float digits out of range",
            float_digits=digits,
            min=MIN_FLOAT_DIGITS,
            max=MAX_FLOAT_DIGITS,
        )
    if args.command == CMD_DATASET:
        params = {key: value for key, value in params.items() if value is not None}
        unused = sorted(set(params) - {"figure", "out_dir"} - DATASET_PARAMS[params["figure"]])
        if unused:
            raise ConfigError(
                f"{params['figure']} does not use: {', '.join(unused)}",
                command=args.command,
                figure=params["figure"],
                unused=unused,
            )
    return RunConfig(
        command=args.command,
        params=params,
        output_format=args.output_format,
        out_path=args.out,
        float_digits=digits,
        explicit_digits=explicit,
        verbosity=args.verbose,
    )


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------


def _integrator_config(params: dict[str, Any]) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=params["rel_tol"], abs_tol=params["abs_tol"], t_max=params["t_max"])


def _run_coeffs(config: RunConfig) -> Table:
    digits = config.float_digits if config.explicit_digits else None
    return coeffs_table(config.params["count"], digits)


def _run_critical(config: RunConfig) -> Table:
    return critical_table(config.params["order"], config.params["rows"], config.float_digits)


def _run_critical_terms(config: RunConfig) -> Table:
    return critical_terms_table(config.params["order"], config.float_digits)


def _run_separatrix(config: RunConfig) -> Table:
    p = config.params
    return separatrix_table(p["max_order"], p["z_min"], p["z_max"], p["points"], config.float_digits)


def _run_solution(config: RunConfig) -> Table:
    p = config.params
    return solution_table(
        p["method"], p["x0"], p["u0"], p["epsilon"], p["t_max"], p["points"], p["branch"], config.float_digits
    )


def _run_fate(config: RunConfig) -> Table:
    p = config.params
    result = classify_fate(InitialConditions(p["x0"], p["u0"]), _integrator_config(p))
    record = {"x0": p["x0"], "u0": p["u0"], "fate": str(result.fate), "t_event": result.t_event}
    digits = config.float_digits
    row = [value if key == "fate" else format_float(value, digits) for key, value in record.items()]
    return Table(list(record), [row], record)


def _run_trace_separatrix(config: RunConfig) -> Table:
    p = config.params
    trace = trace_separatrix(p["delta"], _integrator_config(p))
    record = {
        "delta": p["delta"],
        "xc": trace.xc_estimate,
        "uc": trace.uc_estimate,
        "t_cross": trace.t_cross,
        "zc": trace.zc_estimate,
        "error_estimate": trace.error_estimate,
        "steps": trace.trajectory.n_accepted,
    }
    digits = config.float_digits
    row = [str(record["steps"]) if key == "steps" else format_float(value, digits) for key, value in record.items()]
    return Table(list(record), [row], record)


def _run_find_xc(config: RunConfig) -> Table:
    p = config.params
    result = find_xc_bisection(_integrator_config(p), p["tol"], p["lo"], p["hi"])
    record = {
        "xc": result.xc,
        "lo": result.lo,
        "hi": result.hi,
        "tol": p["tol"],
        "probes": result.n_probes,
        "undecided": len(result.undecided),
    }
    digits = config.float_digits
    row = [
        str(value) if isinstance(value, int) else format_float(value, max(digits, 10)) for value in record.values()
    ]
    return Table(list(record), [row], record)


def _run_portrait(config: RunConfig) -> Table:
    p = config.params
    cells = phase_portrait(p["x_range"], p["u_range"], tuple(p["resolution"]), _integrator_config(p))
    return portrait_table(cells, config.float_digits)


def _run_domb_sykes(config: RunConfig) -> Table:
    p = config.params
    window = tuple(p["window"]) if p["window"] is not None else None
    report = domb_sykes_report(generate_B(p["count"] - 1), window, p["delta"])
    return domb_sykes_table(report, config.float_digits)


def _run_dataset(config: RunConfig) -> Table:
    params = dict(config.params)
    figure = params.pop("figure")
    out_dir = params.pop("out_dir")
    paths = emit_dataset(figure, params, out_dir, config.float_digits)
    return Table(["path"], [[str(path)] for path in paths], [str(path) for path in paths])


COMMANDS: dict[str, Callable[[RunConfig], Table]] = {
    CMD_COEFFS: _run_coeffs,
    CMD_CRITICAL: _run_critical,
    CMD_CRITICAL_TERMS: _run_critical_terms,
    CMD_SEPARATRIX: _run_separatrix,
    CMD_SOLUTION: _run_solution,
    CMD_FATE: _run_fate,
    CMD_TRACE_SEPARATRIX: _run_trace_separatrix,
    CMD_FIND_XC: _run_find_xc,
    CMD_PORTRAIT: _run_portrait,
    CMD_DOMB_SYKES: _run_domb_sykes,
    CMD_DATASET: _run_dataset,
}


def _write(config: RunConfig, table: Table, stream: TextIO) -> None:
    if config.output_format == FORMAT_JSON:
        write_json(stream, config.record(), table)
    else:
        write_csv(stream, config.record(), table)


def execute(config: RunConfig, stream: TextIO | None = None) -> None:
    """Run the configured command and write its output."""
    table = COMMANDS[config.command](config)
    if config.out_path is not None:
        with open(config.out_path, "w", newline="", encoding="utf-8") as handle:
            _write(config, table, handle)
        _LOGGER.info("Wrote %s", config.out_path)
    else:
        _write(config, table, stream if stream is not None else sys.stdout)


def _report_error(err: CaptureSeriesError) -> None:
    payload = {"error": type(err).__name__, "message": str(err), "context": err.context}
    sys.stderr.write(json.dumps(payload, default=str, sort_keys=True) + "\n")


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Parse, validate and run one command; return the process exit status."""
    try:
        config = build_config(argv)
    except ConfigError as err:
        _report_error(err)
        return EXIT_CONFIG_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    configure_logging(config.verbosity)
    _LOGGER.debug("Running %s with %s", config.command, config.params)
    try:
        execute(config)
    except OSError as err:
        _report_error(ConfigError(f"cannot write output: {err.strerror or err}", path=err.filename))
        return EXIT_CONFIG_ERROR
    except ConfigError as err:
        _report_error(err)
        return EXIT_CONFIG_ERROR
    except CaptureSeriesError as err:
        _report_error(err)
        return EXIT_COMPUTATION_ERROR
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())
