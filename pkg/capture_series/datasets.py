"""Tabular outputs: CSV/JSON writers, per-command tables and figure datasets.

Every CSV starts with a comment line recording the producing configuration:

    # capture-series <version> config=<compact sorted JSON>

followed by a header row and CRLF-terminated records.  JSON documents have
the shape ``{"config": {...}, "data": ...}``.  Exact values are written as
``"p/q"`` strings next to their decimal renderings.

Figure datasets (``emit_dataset``):
    fig1-portrait     <fig>-cells.csv      x0, u0, fate, t_event
                      <fig>-nullcline.csv  x, u
                      <fig>-xc.csv         source, xc, uc
    fig2-separatrix   <fig>.csv            z, x_1, u_1, …, x_N, u_N
    fig3-terms        <fig>.csv            n, zc_ratio, xc_ratio, zc_in_band, xc_in_band
    fig4-domb-sykes   <fig>-ratios.csv     n, inv_n, inv_n_minus_delta, ratio
                      <fig>-s.csv          n, s_n, fit
                      <fig>-fit.csv        delta, fitted_delta, growth, window_lo, window_hi
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

import numpy as np

from ._log import get_logger
from .closed_form import Branch, InitialConditions, constants_from_ic, evaluate
from .coefficients import generate_B
from .const import (
    CRITICAL_TABLE_ROWS,
    DATASET_PARAMS,
    DEFAULT_CRITICAL_ORDER,
    DEFAULT_DOMB_SYKES_COUNT,
    DEFAULT_PORTRAIT_RESOLUTION,
    DEFAULT_PORTRAIT_U_RANGE,
    DEFAULT_PORTRAIT_X_RANGE,
    DEFAULT_POINTS,
    DEFAULT_SEPARATRIX_MAX_ORDER,
    DEFAULT_TRACE_DELTA,
    DEFAULT_Z_MAX,
    DEFAULT_Z_MIN,
    FIG1_PORTRAIT,
    FIG2_SEPARATRIX,
    FIG3_TERMS,
    FIGURES,
    PROG_NAME,
    REFERENCE_DELTA,
    TERM_SIGNIFICANT_DIGITS,
    VERSION,
)
from .critical_series import critical_series, partial_sum_table, ratio_test_inconclusive, term_ratios
from .exact_arith import format_rational, render_decimal, render_scientific
from .exceptions import InvalidInputError
from .ode_oracle import IntegratorConfig, PortraitCell, nullcline, phase_portrait, trace_separatrix
from .ratio_analysis import DombSykesReport, domb_sykes_report
from .separatrix import sample_family

_LOGGER = get_logger(__name__)

CSV_LINE_TERMINATOR = "\r\n"


class Table:
    """Header plus rows of already-rendered cells, and the JSON form of the same data.

    *notes* are extra CSV comment lines written after the config comment.
    """

    def __init__(
        self, header: Sequence[str], rows: list[list[str]], data: Any, notes: Sequence[str] = ()
    ) -> None:
        self.header = list(header)
        self.rows = rows
        self.data = data
        self.notes = list(notes)


# ----------------------------------------------------------------------
# Writers
# ----------------------------------------------------------------------


def config_comment(config: Mapping[str, Any]) -> str:
    payload = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return f"# {PROG_NAME} {VERSION} config={payload}"


def write_csv(stream: TextIO, config: Mapping[str, Any], table: Table) -> None:
    stream.write(config_comment(config) + CSV_LINE_TERMINATOR)
    for note in table.notes:
        stream.write(f"# {note}" + CSV_LINE_TERMINATOR)
    writer = csv.writer(stream, lineterminator=CSV_LINE_TERMINATOR)
    writer.writerow(table.header)
    writer.writerows(table.rows)


def write_json(stream: TextIO, config: Mapping[str, Any], table: Table) -> None:
    json.dump({"config": dict(config), "data": table.data}, stream, indent=2, sort_keys=True)
    stream.write("\n")


def format_float(value: float | None, digits: int) -> str:
    """Render an inexact value with *digits* significant digits; None becomes empty."""
    if value is None:
        return ""
    return f"{value:.{digits}g}"


def _flag(value: bool | None) -> str:
    return "" if value is None else str(int(value))


# ----------------------------------------------------------------------
# Per-command tables
# ----------------------------------------------------------------------


def coeffs_table(count: int, float_digits: int | None = None) -> Table:
    """B_n and b_n for n = 0 … count−1; a decimal column only when *float_digits* is set."""
    table = generate_B(count - 1)
    header = ["n", "B_n", "b_n"]
    if float_digits is not None:
        header.append("B_n_decimal")
    rows: list[list[str]] = []
    data: list[dict[str, Any]] = []
    for n, (big_b, small_b) in enumerate(zip(table.B, table.b)):
        row = [str(n), format_rational(big_b), str(small_b)]
        record: dict[str, Any] = {"n": n, "B": format_rational(big_b), "b": str(small_b)}
        if float_digits is not None:
            row.append(render_decimal(big_b, float_digits))
            record["B_decimal"] = row[-1]
        rows.append(row)
        data.append(record)
    return Table(header, rows, data)


def critical_table(order: int, rows: Sequence[int] | None, float_digits: int) -> Table:
    """Partial sums of εz_c and εx_c at θ = 1 with the magnitude of the last term."""
    cs = critical_series(order)
    if rows is None:
        rows = [n for n in CRITICAL_TABLE_ROWS if n <= order]
    header = ["n", "zc_exact", "zc", "zc_term", "xc_exact", "xc", "xc_term"]
    out_rows: list[list[str]] = []
    data: list[dict[str, Any]] = []
    for row in partial_sum_table(cs, rows):
        cells = [
            str(row.n),
            format_rational(row.zc_sum),
            render_decimal(row.zc_sum, float_digits),
            render_scientific(row.zc_term, TERM_SIGNIFICANT_DIGITS),
            format_rational(row.xc_sum),
            render_decimal(row.xc_sum, float_digits),
            render_scientific(row.xc_term, TERM_SIGNIFICANT_DIGITS),
        ]
        out_rows.append(cells)
        data.append(dict(zip(header, cells)) | {"n": row.n})
    return Table(header, out_rows, data)


def critical_terms_table(order: int, float_digits: int) -> Table:
    """|a_n/a_{n−1}| for both series with the |ratio| < 1 band flags."""
    ratios = term_ratios(critical_series(order))
    if ratio_test_inconclusive(ratios):
        _LOGGER.info("Ratio test is inconclusive over n = 2..%d", order)
    header = ["n", "zc_ratio", "xc_ratio", "zc_in_band", "xc_in_band"]
    rows = [
        [
            str(r.n),
            format_float(r.zc_ratio, float_digits),
            format_float(r.xc_ratio, float_digits),
            _flag(r.zc_in_band),
            _flag(r.xc_in_band),
        ]
        for r in ratios
    ]
    data = [
        {
            "n": r.n,
            "zc_ratio": r.zc_ratio,
            "xc_ratio": r.xc_ratio,
            "zc_in_band": r.zc_in_band,
            "xc_in_band": r.xc_in_band,
        }
        for r in ratios
    ]
    return Table(header, rows, data)


def separatrix_table(max_order: int, z_min: float, z_max: float, points: int, float_digits: int) -> Table:
    """Family of truncated separatrices sampled on a uniform z grid."""
    if not 0 <= z_min < z_max:
        raise InvalidInputError("need 0 <= z_min < z_max", z_min=z_min, z_max=z_max)
    family = sample_family(generate_B(max_order), max_order, np.linspace(z_min, z_max, points))
    header = ["z"]
    for k in range(1, max_order + 1):
        header += [f"x_{k}", f"u_{k}"]
    rows: list[list[str]] = []
    data: list[dict[str, Any]] = []
    for i, z in enumerate(family.z):
        row = [format_float(float(z), float_digits)]
        record: dict[str, Any] = {"z": float(z)}
        for k in range(1, max_order + 1):
            x = float(family.x[k - 1, i])
            u = float(family.u[k - 1, i])
            row += [format_float(x, float_digits), format_float(u, float_digits)]
            record[f"x_{k}"] = x
            record[f"u_{k}"] = u
        rows.append(row)
        data.append(record)
    return Table(header, rows, data)


def solution_table(
    method: str,
    x0: float,
    u0: float,
    epsilon: float,
    t_max: float,
    points: int,
    branch: str,
    float_digits: int,
) -> Table:
    """(t, x, u) along a matched or RG closed form."""
    constants = constants_from_ic(InitialConditions(x0, u0), epsilon, Branch(branch))
    header = ["t", "x", "u"]
    rows: list[list[str]] = []
    data: list[dict[str, float]] = []
    for t in np.linspace(0.0, t_max, points):
        x, u = evaluate(method, constants, float(t))
        rows.append([format_float(value, float_digits) for value in (float(t), x, u)])
        data.append({"t": float(t), "x": x, "u": u})
    return Table(header, rows, data)


def portrait_table(cells: Iterable[PortraitCell], float_digits: int) -> Table:
    header = ["x0", "u0", "fate", "t_event"]
    cells = list(cells)
    rows = [
        [
            format_float(c.x0, float_digits),
            format_float(c.u0, float_digits),
            str(c.fate),
            format_float(c.t_event, float_digits),
        ]
        for c in cells
    ]
    data = [{"x0": c.x0, "u0": c.u0, "fate": str(c.fate), "t_event": c.t_event} for c in cells]
    return Table(header, rows, data)


def domb_sykes_tables(report: DombSykesReport, float_digits: int) -> tuple[Table, Table, Table]:
    """Ratio panel, s_n panel and fit summary of a Domb-Sykes report."""
    ratio_rows = [
        [
            str(n),
            format_float(1.0 / n, float_digits),
            format_float(1.0 / (n - report.delta), float_digits),
            format_float(r, float_digits),
        ]
        for n, r in report.ratios
    ]
    ratios = Table(["n", "inv_n", "inv_n_minus_delta", "ratio"], ratio_rows, None)
    lo, hi = report.fit_window
    s_rows = [
        [str(n), format_float(s, float_digits), _flag(lo <= n <= hi)] for n, s in report.s_values
    ]
    s_table = Table(["n", "s_n", "fit"], s_rows, None)
    fit = Table(
        ["delta", "fitted_delta", "growth", "window_lo", "window_hi"],
        [
            [
                format_float(report.delta, float_digits),
                format_float(report.fitted_delta, float_digits),
                format_float(report.growth, float_digits),
                str(lo),
                str(hi),
            ]
        ],
        None,
    )
    return ratios, s_table, fit


def domb_sykes_json(report: DombSykesReport) -> dict[str, Any]:
    return {
        "ratios": [[n, r] for n, r in report.ratios],
        "s_values": [[n, s] for n, s in report.s_values],
        "delta": report.delta,
        "fitted_delta": report.fitted_delta,
        "growth": report.growth,
        "fit_window": list(report.fit_window),
        "growth_window": list(report.growth_window),
        "fit_residuals": [[n, r] for n, r in report.fit_residuals],
        "excluded": list(report.excluded),
    }


def domb_sykes_fit_note(report: DombSykesReport, float_digits: int) -> str:
    """One-line ``key=value`` summary of the fit, written as a CSV comment."""
    lo, hi = report.fit_window
    g_lo, g_hi = report.growth_window
    return (
        f"fit delta={format_float(report.delta, float_digits)}"
        f",fitted_delta={format_float(report.fitted_delta, float_digits)}"
        f",growth={format_float(report.growth, float_digits)}"
        f",window={lo}:{hi},growth_window={g_lo}:{g_hi}"
    )


def domb_sykes_table(report: DombSykesReport, float_digits: int) -> Table:
    """Ratios and s_n side by side, with the fit summary as a CSV note.

    ``s_fit_residual`` is empty outside the offset fit window.
    """
    s_by_n = dict(report.s_values)
    residual_by_n = dict(report.fit_residuals)
    rows = [
        [
            str(n),
            format_float(1.0 / n, float_digits),
            format_float(1.0 / (n - report.delta), float_digits),
            format_float(ratio, float_digits),
            format_float(s_by_n.get(n), float_digits),
            format_float(residual_by_n.get(n), float_digits),
        ]
        for n, ratio in report.ratios
    ]
    return Table(
        ["n", "inv_n", "inv_n_minus_delta", "ratio", "s_n", "s_fit_residual"],
        rows,
        domb_sykes_json(report),
        notes=[domb_sykes_fit_note(report, float_digits)],
    )


# ----------------------------------------------------------------------
# Figure datasets
# ----------------------------------------------------------------------


def _write_file(path: Path, config: Mapping[str, Any], table: Table) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        write_csv(handle, config, table)
    _LOGGER.debug("Wrote %s (%d rows)", path, len(table.rows))
    return path


def emit_dataset(
    figure: str,
    params: Mapping[str, Any],
    out_dir: str | Path,
    float_digits: int = 8,
) -> list[Path]:
    """Write the CSV files for *figure* into *out_dir* and return their paths.

    Unset *params* fall back to the package defaults; the effective values
    are recorded in each file's config comment.

    Raises:
        InvalidInputError: unknown figure id, or a parameter the figure does not read.
    """
    if figure not in FIGURES:
        raise InvalidInputError("unknown figure", figure=figure, known=FIGURES)
    unused = sorted(set(params) - DATASET_PARAMS[figure])
    if unused:
        raise InvalidInputError(
            "parameters not used by this figure",
            figure=figure,
            unused=unused,
            accepted=sorted(DATASET_PARAMS[figure]),
        )
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    effective = dict(params)

    if figure == FIG1_PORTRAIT:
        effective.setdefault("x_range", list(DEFAULT_PORTRAIT_X_RANGE))
        effective.setdefault("u_range", list(DEFAULT_PORTRAIT_U_RANGE))
        effective.setdefault("resolution", list(DEFAULT_PORTRAIT_RESOLUTION))
        effective.setdefault("delta", DEFAULT_TRACE_DELTA)
        effective.setdefault("points", DEFAULT_POINTS)
        config = {"figure": figure, "params": effective, "float_digits": float_digits}
        cfg = IntegratorConfig()
        cells = phase_portrait(
            tuple(effective["x_range"]), tuple(effective["u_range"]), tuple(effective["resolution"]), cfg
        )
        xs, us = nullcline(np.linspace(effective["x_range"][0], effective["x_range"][1], effective["points"]))
        trace = trace_separatrix(effective["delta"], cfg)
        paths = [
            _write_file(directory / f"{figure}-cells.csv", config, portrait_table(cells, float_digits)),
            _write_file(
                directory / f"{figure}-nullcline.csv",
                config,
                Table(
                    ["x", "u"],
                    [[format_float(float(v), float_digits) for v in pair] for pair in zip(xs, us, strict=True)],
                    None,
                ),
            ),
            _write_file(
                directory / f"{figure}-xc.csv",
                config,
                Table(
                    ["source", "xc", "uc"],
                    [
                        [
                            "trace-separatrix",
                            format_float(trace.xc_estimate, float_digits),
                            format_float(trace.uc_estimate, float_digits),
                        ]
                    ],
                    None,
                ),
            ),
        ]
    elif figure == FIG2_SEPARATRIX:
        effective.setdefault("max_order", DEFAULT_SEPARATRIX_MAX_ORDER)
        effective.setdefault("z_min", DEFAULT_Z_MIN)
        effective.setdefault("z_max", DEFAULT_Z_MAX)
        effective.setdefault("points", DEFAULT_POINTS)
        config = {"figure": figure, "params": effective, "float_digits": float_digits}
        table = separatrix_table(
            effective["max_order"], effective["z_min"], effective["z_max"], effective["points"], float_digits
        )
        paths = [_write_file(directory / f"{figure}.csv", config, table)]
    elif figure == FIG3_TERMS:
        effective.setdefault("order", DEFAULT_CRITICAL_ORDER)
        config = {"figure": figure, "params": effective, "float_digits": float_digits}
        paths = [
            _write_file(directory / f"{figure}.csv", config, critical_terms_table(effective["order"], float_digits))
        ]
    else:  # fig4-domb-sykes
        effective.setdefault("count", DEFAULT_DOMB_SYKES_COUNT)
        effective.setdefault("delta", float(REFERENCE_DELTA))
        config = {"figure": figure, "params": effective, "float_digits": float_digits}
        report = domb_sykes_report(generate_B(effective["count"] - 1), delta=effective["delta"])
        ratios, s_table, fit = domb_sykes_tables(report, float_digits)
        paths = [
            _write_file(directory / f"{figure}-ratios.csv", config, ratios),
            _write_file(directory / f"{figure}-s.csv", config, s_table),
            _write_file(directory / f"{figure}-fit.csv", config, fit),
        ]

    _LOGGER.info("Dataset %s written to %s (%d files)", figure, directory, len(paths))
    return paths
