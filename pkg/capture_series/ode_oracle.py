"""Numerical ground truth for ẍ + ẋ + x² = 0 (ε = 1 working units).

The phase-plane system is dx/dt = u, du/dt = −u − x².  It is integrated
with a Dormand–Prince 5(4) pair (first-same-as-last, PI step-size control)
and cubic Hermite dense output.  Events are located by Brent's method on
the Hermite interpolant of the step that bracketed them.

Fates:
    capture      x reaches 0 from above in finite time
    escape       x stays positive and the state reaches the attractor box,
                 or enters the forward-invariant region
                 {x > 0, u > −2x², x + max(u, 0) < escape_x_max}
                 on whose lower boundary d/dt(u + 2x²) = x²(1 − 8x) > 0
    undecided    neither before the horizon t_max

Functions:
    integrate             adaptive integration with events and stop predicate
    classify_fate         capture / escape / undecided for one initial state
    in_escape_region      escape test applied after every step
    trace_separatrix      backward trace of the critical trajectory to u = −x²
    find_xc_bisection     critical release position on the nullcline
    phase_portrait        fate of every cell of a grid of initial states
    nullcline             the zero-acceleration locus u = −x²
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__

import numpy as np
from scipy.optimize import brentq

from ._log import get_logger
from .closed_form import InitialConditions
from .const import (
    BISECTION_HI,
    BISECTION_LO,
    DEFAULT_ABS_TOL,
    DEFAULT_ATTRACTOR_TOL,
    DEFAULT_ESCAPE_X_MAX,
    DEFAULT_H_MAX,
    DEFAULT_REL_TOL,
    DEFAULT_T_MAX,
    DEFAULT_TRACE_DELTA,
    DEFAULT_X_BLOWUP,
    DEFAULT_XC_TOL,
    FATE_CAPTURE,
    FATE_ESCAPE,
    FATE_UNDECIDED,
    MAX_PORTRAIT_CELLS,
    MAX_TRACE_DELTA,
    PI_BETA,
    STEP_FACTOR_MAX,
    STEP_FACTOR_MIN,
    STEP_SAFETY,
    STEP_UNDERFLOW,
)
from .exceptions import (
    BracketError,
    InvalidInputError,
    StiffnessError,
    TraceIncompleteError,
)

_LOGGER = get_logger(__name__)

# Dormand–Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    ]
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Fifth-order minus embedded fourth-order weights (seven stages, FSAL)
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
_ERROR_EXPONENT = 1 / 5
_PI_ALPHA = _ERROR_EXPONENT - 0.75 * PI_BETA
_MIN_PREV_NORM = 1e-4


def _rhs(y: np.ndarray) -> np.ndarray:
    return np.array([y[1], -y[1] - y[0] * y[0]])


class Direction(StrEnum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def sign(self) -> float:
        return 1.0 if self is Direction.FORWARD else -1.0


class Fate(StrEnum):
    CAPTURE = FATE_CAPTURE
    ESCAPE = FATE_ESCAPE
    UNDECIDED = FATE_UNDECIDED


class TrajectoryStatus(StrEnum):
    HORIZON = "horizon"
    EVENT = "event"
    BLOWUP = "blowup"
    STOP = "stop"


@dataclass(frozen=True)
class PhaseState:
    t: float
    x: float
    u: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.u])


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and guards of the adaptive integrator; all must be positive."""

    rel_tol: float = DEFAULT_REL_TOL
    abs_tol: float = DEFAULT_ABS_TOL
    t_max: float = DEFAULT_T_MAX
    x_blowup: float = DEFAULT_X_BLOWUP
    attractor_tol: float = DEFAULT_ATTRACTOR_TOL
    h_max: float = DEFAULT_H_MAX
    escape_x_max: float = DEFAULT_ESCAPE_X_MAX

    def __post_init__(self) -> None:
        for name in (
            "rel_tol",
            "abs_tol",
            "t_max",
            "x_blowup",
            "attractor_tol",
            "h_max",
            "escape_x_max",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be a positive number", **{name: value})


@dataclass(frozen=True)
class EventSpec:
    """Scalar event function g(t, x, u).

    ``direction`` is −1 for crossings from positive to non-positive, +1 for
    the reverse and 0 for either, taken in the order the integrator visits
    the states.
    """

    name: str
    function: Callable[[float, float, float], float]
    direction: int = 0
    terminal: bool = True


@dataclass(frozen=True)
class EventHit:
    name: str
    state: PhaseState


@dataclass(frozen=True)
class Trajectory:
    """Accepted steps of one integration; ``y[:, 0]`` is x and ``y[:, 1]`` is u."""

    t: np.ndarray
    y: np.ndarray
    status: TrajectoryStatus
    events: tuple[EventHit, ...] = ()
    n_accepted: int = 0
    n_rejected: int = 0
    n_evaluations: int = 0

    @property
    def final(self) -> PhaseState:
        return PhaseState(float(self.t[-1]), float(self.y[-1, 0]), float(self.y[-1, 1]))


@dataclass(frozen=True)
class FateResult:
    fate: Fate
    t_event: float
    trajectory: Trajectory | None = None


@dataclass(frozen=True)
class SeparatrixTrace:
    trajectory: Trajectory
    xc_estimate: float
    uc_estimate: float
    t_cross: float
    zc_estimate: float
    error_estimate: float


@dataclass(frozen=True)
class BisectionResult:
    xc: float
    lo: float
    hi: float
    n_probes: int
    undecided: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class PortraitCell:
    x0: float
    u0: float
    fate: Fate
    t_event: float


# ----------------------------------------------------------------------
# Integrator
# ----------------------------------------------------------------------


def _error_norm(err: np.ndarray, y: np.ndarray, y_new: np.ndarray, cfg: IntegratorConfig) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(y: np.ndarray, f0: np.ndarray, cfg: IntegratorConfig) -> float:
    """Starting step size from the usual two-evaluation estimate."""
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y)
    d0 = float(np.sqrt(np.mean((y / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = _rhs(y + h0 * f0)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** _ERROR_EXPONENT
    return min(100 * h0, h1, cfg.h_max)


def _hermite(
    theta: float, h: float, y0: np.ndarray, f0: np.ndarray, y1: np.ndarray, f1: np.ndarray
) -> np.ndarray:
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2 * t3 - 3 * t2 + 1) * y0
        + (t3 - 2 * t2 + theta) * h * f0
        + (-2 * t3 + 3 * t2) * y1
        + (t3 - t2) * h * f1
    )


def _crossed(direction: int, g_prev: float, g_new: float) -> bool:
    down = g_prev > 0 >= g_new
    up = g_prev < 0 <= g_new
    if direction < 0:
        return down
    if direction > 0:
        return up
    return down or up


def integrate(
    start: PhaseState,
    cfg: IntegratorConfig,
    direction: Direction = Direction.FORWARD,
    events: Sequence[EventSpec] = (),
    stop: Callable[[PhaseState], bool] | None = None,
) -> Trajectory:
    """Integrate from *start* for at most ``cfg.t_max`` time units.

    Integration ends at the horizon, when |x| exceeds ``cfg.x_blowup``, at
    the first terminal event, or when *stop* returns True for an accepted
    state.  Event times are refined with :func:`scipy.optimize.brentq` on the
    cubic Hermite interpolant of the bracketing step.

    Raises:
        StiffnessError: the step size underflowed; ``last_state`` holds the
            last accepted state.
    """
    sign = direction.sign
    t = start.t
    t_end = start.t + sign * cfg.t_max
    y = start.as_array()
    f = _rhs(y)
    n_eval = 1

    ts = [t]
    ys = [y.copy()]
    hits: list[EventHit] = []
    g_prev = [ev.function(t, y[0], y[1]) for ev in events]

    h_abs = _initial_step(y, f, cfg)
    n_eval += 1
    prev_norm = _MIN_PREV_NORM
    rejected_last = False
    n_accepted = 0
    n_rejected = 0
    status = TrajectoryStatus.HORIZON
    k = np.empty((7, 2))

    while (t_end - t) * sign > 0:
        if h_abs < STEP_UNDERFLOW * max(1.0, abs(t)):
            raise StiffnessError(
                "integrator step size underflow",
                last_state=PhaseState(t, float(y[0]), float(y[1])),
                t=t,
                h=h_abs,
            )
        h_abs = min(h_abs, cfg.h_max, abs(t_end - t))
        h = sign * h_abs

        k[0] = f
        for s in range(1, 6):
            k[s] = _rhs(y + h * (_A[s, :s] @ k[:s]))
        y_new = y + h * (_B @ k[:6])
        f_new = _rhs(y_new)
        k[6] = f_new
        n_eval += 6
        norm = _error_norm(h * (_E @ k), y, y_new, cfg)

        if norm > 1.0 or not np.all(np.isfinite(y_new)):
            factor = STEP_SAFETY * norm ** (-_ERROR_EXPONENT) if math.isfinite(norm) else 0.0
            h_abs *= max(STEP_FACTOR_MIN, factor)
            rejected_last = True
            n_rejected += 1
            continue

        if norm == 0.0:
            factor = STEP_FACTOR_MAX
        else:
            factor = STEP_SAFETY * norm ** (-_PI_ALPHA) * prev_norm**PI_BETA
            factor = min(STEP_FACTOR_MAX, max(STEP_FACTOR_MIN, factor))
        if rejected_last:
            factor = min(factor, 1.0)
        prev_norm = max(norm, _MIN_PREV_NORM)
        rejected_last = False
        n_accepted += 1

        t_new = t + h
        if t_new == t_end or (t_end - t_new) * sign < 0:
            t_new = t_end

        terminal_hit: EventHit | None = None
        for i, ev in enumerate(events):
            g_new = ev.function(t_new, y_new[0], y_new[1])
            if _crossed(ev.direction, g_prev[i], g_new):
                hit = _locate_event(ev, t, h, y, f, y_new, f_new, g_new)
                hits.append(hit)
                if ev.terminal and (
                    terminal_hit is None or (hit.state.t - terminal_hit.state.t) * sign < 0
                ):
                    terminal_hit = hit
            g_prev[i] = g_new

        if terminal_hit is not None:
            ts.append(terminal_hit.state.t)
            ys.append(np.array([terminal_hit.state.x, terminal_hit.state.u]))
            status = TrajectoryStatus.EVENT
            break

        t, y, f = t_new, y_new, f_new
        ts.append(t)
        ys.append(y.copy())
        h_abs *= factor

        if abs(y[0]) > cfg.x_blowup:
            status = TrajectoryStatus.BLOWUP
            break
        if stop is not None and stop(PhaseState(t, float(y[0]), float(y[1]))):
            status = TrajectoryStatus.STOP
            break

    if status is TrajectoryStatus.HORIZON:
        if stop is not None or any(ev.terminal for ev in events):
            _LOGGER.warning("Integration reached the horizon t = %s before a terminal event", t_end)
        else:
            _LOGGER.debug("Integration reached the horizon t = %s", t_end)
    _LOGGER.debug(
        "Integrated %d steps (%d rejected, %d evaluations), status %s",
        n_accepted,
        n_rejected,
        n_eval,
        status,
    )
    return Trajectory(
        t=np.asarray(ts),
        y=np.asarray(ys),
        status=status,
        events=tuple(hits),
        n_accepted=n_accepted,
        n_rejected=n_rejected,
        n_evaluations=n_eval,
    )


def _locate_event(
    ev: EventSpec,
    t: float,
    h: float,
    y: np.ndarray,
    f: np.ndarray,
    y_new: np.ndarray,
    f_new: np.ndarray,
    g_new: float,
) -> EventHit:
    if g_new == 0.0:
        theta = 1.0
    else:

        def g_of_theta(th: float) -> float:
            state = _hermite(th, h, y, f, y_new, f_new)
            return ev.function(t + th * h, state[0], state[1])

        theta = brentq(g_of_theta, 0.0, 1.0, xtol=1e-15)
    state = _hermite(theta, h, y, f, y_new, f_new)
    return EventHit(ev.name, PhaseState(t + theta * h, float(state[0]), float(state[1])))


# ----------------------------------------------------------------------
# Fates
# ----------------------------------------------------------------------


def in_escape_region(state: PhaseState, cfg: IntegratorConfig) -> bool:
    """True once the state is certain to decay to the origin without capture."""
    x, u = state.x, state.u
    if x >= 0 and math.hypot(x, u) < cfg.attractor_tol:
        return True
    return x > 0 and u > -2.0 * x * x and x + max(u, 0.0) < cfg.escape_x_max


_CAPTURE_EVENT = EventSpec("capture", lambda t, x, u: x, direction=-1, terminal=True)


def classify_fate(
    ic: InitialConditions, cfg: IntegratorConfig, keep_trajectory: bool = False
) -> FateResult:
    """Integrate forward from (x0, u0) at t = 0 until the fate is known.

    A start with x0 < 0, or x0 = 0 moving inwards, is a capture at t = 0.
    """
    start = PhaseState(0.0, ic.x0, ic.u0)
    if ic.x0 < 0 or (ic.x0 == 0 and ic.u0 < 0):
        return FateResult(Fate.CAPTURE, 0.0)
    if in_escape_region(start, cfg):
        return FateResult(Fate.ESCAPE, 0.0)

    traj = integrate(
        start,
        cfg,
        Direction.FORWARD,
        events=(_CAPTURE_EVENT,),
        stop=lambda state: in_escape_region(state, cfg),
    )
    kept = traj if keep_trajectory else None
    final = traj.final
    if traj.status is TrajectoryStatus.EVENT:
        return FateResult(Fate.CAPTURE, final.t, kept)
    if traj.status is TrajectoryStatus.STOP:
        return FateResult(Fate.ESCAPE, final.t, kept)
    if traj.status is TrajectoryStatus.BLOWUP and final.x < 0:
        return FateResult(Fate.CAPTURE, final.t, kept)
    _LOGGER.warning("Fate of %s undecided at t = %s (%s)", ic, final.t, traj.status)
    return FateResult(Fate.UNDECIDED, final.t, kept)


# ----------------------------------------------------------------------
# Separatrix trace and bisection
# ----------------------------------------------------------------------


def trace_separatrix(
    delta: float = DEFAULT_TRACE_DELTA, cfg: IntegratorConfig | None = None
) -> SeparatrixTrace:
    """Trace the critical trajectory backward from the attractor to the nullcline.

    The seed x = δ − δ²/2, u = −δ + δ² at t = −ln δ is the two-term
    separatrix series, accurate to O(δ³).

    Raises:
        InvalidInputError: δ outside (0, 1e−3].
        TraceIncompleteError: the nullcline was not reached within t_max.
    """
    if not (0 < delta <= MAX_TRACE_DELTA):
        raise InvalidInputError(
            "seed distance must lie in (0, 1e-3]", delta=delta, max_delta=MAX_TRACE_DELTA
        )
    cfg = cfg or IntegratorConfig()
    seed = PhaseState(-math.log(delta), delta - delta * delta / 2, -delta + delta * delta)
    nullcline_event = EventSpec("nullcline", lambda t, x, u: u + x * x, direction=0)
    traj = integrate(seed, cfg, Direction.BACKWARD, events=(nullcline_event,))
    if traj.status is not TrajectoryStatus.EVENT:
        raise TraceIncompleteError(
            "backward trace did not reach the nullcline",
            delta=delta,
            status=str(traj.status),
            t_final=float(traj.t[-1]),
        )
    hit = traj.events[-1].state
    error = traj.n_accepted * (cfg.rel_tol * abs(hit.x) + cfg.abs_tol) + delta**3
    _LOGGER.info("Traced separatrix: x_c ≈ %.10f at t = %.10f", hit.x, hit.t)
    return SeparatrixTrace(
        trajectory=traj,
        xc_estimate=hit.x,
        uc_estimate=hit.u,
        t_cross=hit.t,
        zc_estimate=math.exp(-hit.t),
        error_estimate=error,
    )


def find_xc_bisection(
    cfg: IntegratorConfig | None = None,
    tol: float = DEFAULT_XC_TOL,
    lo: float = BISECTION_LO,
    hi: float = BISECTION_HI,
) -> BisectionResult:
    """Bisect the release position x0 along the nullcline u0 = −x0².

    An undecided probe is logged and counted as non-capture.

    Raises:
        InvalidInputError: non-positive *tol* or lo >= hi.
        BracketError: both endpoints share the same fate.
    """
    cfg = cfg or IntegratorConfig()
    if not tol > 0:
        raise InvalidInputError("tolerance must be positive", tol=tol)
    if not lo < hi:
        raise InvalidInputError("bracket must satisfy lo < hi", lo=lo, hi=hi)

    undecided: list[float] = []

    def captured(x0: float) -> bool:
        result = classify_fate(InitialConditions(x0, -x0 * x0), cfg)
        _LOGGER.debug("Probe x0 = %.12f: %s", x0, result.fate)
        if result.fate is Fate.UNDECIDED:
            _LOGGER.warning("Probe x0 = %.12f undecided; treated as non-capture", x0)
            undecided.append(x0)
        return result.fate is Fate.CAPTURE

    lo_captured = captured(lo)
    hi_captured = captured(hi)
    n_probes = 2
    if lo_captured == hi_captured:
        raise BracketError(
            "both bracket endpoints have the same fate",
            lo=lo,
            hi=hi,
            fate=FATE_CAPTURE if lo_captured else "non-capture",
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        n_probes += 1
        if captured(mid) == hi_captured:
            hi = mid
        else:
            lo = mid
    xc = 0.5 * (lo + hi)
    _LOGGER.info("Bisection: x_c ≈ %.10f after %d probes", xc, n_probes)
    return BisectionResult(xc=xc, lo=lo, hi=hi, n_probes=n_probes, undecided=undecided)


# ----------------------------------------------------------------------
# Phase portrait
# ----------------------------------------------------------------------


def phase_portrait(
    x_range: tuple[float, float],
    u_range: tuple[float, float],
    resolution: tuple[int, int],
    cfg: IntegratorConfig | None = None,
) -> list[PortraitCell]:
    """Fate of each initial state on an ``resolution[0] × resolution[1]`` grid."""
    cfg = cfg or IntegratorConfig()
    nx, nu = resolution
    if nx < 1 or nu < 1:
        raise InvalidInputError("resolution must be positive", resolution=resolution)
    if nx * nu > MAX_PORTRAIT_CELLS:
        raise InvalidInputError(
            "portrait grid is too large", cells=nx * nu, max_cells=MAX_PORTRAIT_CELLS
        )
    if x_range[0] > x_range[1] or u_range[0] > u_range[1]:
        raise InvalidInputError("ranges must be increasing", x_range=x_range, u_range=u_range)

    cells: list[PortraitCell] = []
    for u0 in np.linspace(u_range[0], u_range[1], nu):
        for x0 in np.linspace(x_range[0], x_range[1], nx):
            result = classify_fate(InitialConditions(float(x0), float(u0)), cfg)
            cells.append(PortraitCell(float(x0), float(u0), result.fate, result.t_event))

    n_undecided = sum(1 for c in cells if c.fate is Fate.UNDECIDED)
    if n_undecided:
        _LOGGER.warning("%d of %d portrait cells undecided at t_max", n_undecided, len(cells))
    return cells


def nullcline(x_values: Sequence[float] | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polyline (x, −x²) of zero initial acceleration."""
    x = np.asarray(x_values, dtype=float)
    return x, -(x * x)
