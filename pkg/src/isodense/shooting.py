"""Arclength shooting for generating curves of constant generalized mean
curvature.

The state is (x, y, phi) with phi the unwrapped tangent angle, integrated
in arclength from the rightmost point (1, 0) with vertical tangent.  The
curvature law is

    kappa = c - (n-2) * lambda - H1,
    lambda = -cos(phi) / y,
    H1    = p * (x sin(phi) - y cos(phi)) / (x^2 + y^2),

with c fixed by the start data: kappa(0) = lambda(0) = kappa0 and
H1(0) = p force c = (n-1) * kappa0 + p.

Termination.  The curvature law repels trajectories from the axis: a
curve that descends toward y = 0 with a non-vertical tangent flattens out
and turns back up at a positive local minimum of y.  The first such
minimum plays the role of the axis-return event beta (the tangent there
is exactly horizontal, pointing left for the left case and right for the
right case).  Only two kinds of shot actually reach the axis: the
closing solution through the origin (kappa0 = 2), detected by proximity
to the origin, and the p = 0 circles, which meet the axis vertically.
"""

from __future__ import annotations

import bisect
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .errors import (
    IntegrationDomainError,
    InvalidBracketError,
    OutOfDomainError,
)
from .geometry import RadialDensity

__all__ = [
    "ShotTolerances",
    "ShotConfig",
    "ShotEvents",
    "ShotCurve",
    "ShotOutcome",
    "Classification",
    "FeatureReport",
    "init_shot",
    "curvature_rhs",
    "integrate",
    "classify",
    "find_closing_kappa0",
    "extract_features",
    "hf_residual",
    "curve_to_csv",
    "read_curve_csv",
    "summary_record",
]

CSV_HEADER = "s,x,y,phi,kappa,lambda,F,R,H1"

_Y_CLAMP = 1e-12      # keeps the rhs finite if the solver probes past y = 0
_R2_CLAMP = 1e-24


@dataclass(frozen=True)
class ShotTolerances:
    """Numeric knobs of one shot.

    step_tol is the integrator's relative tolerance.  The default is
    tighter than casual use needs because the origin passage of the
    closing shot amplifies accumulated error: the closest approach scales
    like its square root at unit power, so reaching the 1e-6 origin
    radius takes accumulated error below ~1e-12.
    """

    step_tol: float = 1e-13
    abs_tol: float = 1e-16
    event_tol: float = 1e-12
    terminal_y: float = 1e-9
    origin_radius: float = 1e-6
    max_step: float = 0.02
    escape_radius: float = 50.0
    max_minima: int = 8


LEAN_TOLERANCES = ShotTolerances(step_tol=1e-11, abs_tol=1e-13, max_step=0.05)


@dataclass(frozen=True)
class ShotConfig:
    n: int
    density: RadialDensity
    kappa0: float
    tolerances: ShotTolerances = field(default_factory=ShotTolerances)
    experimental: bool = False

    @property
    def c(self) -> float:
        """Generalized-mean-curvature constant (n-1)*kappa0 + g'(1)."""
        return (self.n - 1) * self.kappa0 + self.density.log_derivative(1.0)

    @property
    def F0(self) -> float:
        return 1.0 - 1.0 / self.kappa0

    @property
    def R0(self) -> float:
        return 1.0 / self.kappa0

    @property
    def out_of_regime(self) -> bool:
        return self.kappa0 <= 1.0

    @property
    def kappa_pp0(self) -> float:
        """kappa''(0) for the power case.

        Differentiating the curvature law twice at the start and using
        lambda''(0) = kappa''(0)/3 (Taylor expansion of -cos(phi)/y with
        kappa'(0) = 0) gives kappa''(0) * (n+1)/3 = -H1''(0), so
        kappa''(0) = 3/(n+1) * p * F0 * (F0^2 - R0^2) / R0^2.  Its sign
        is that of F0 - 1/2.
        """
        if self.density.kind != "power":
            return 0.0
        F0, R0 = self.F0, self.R0
        return (3.0 / (self.n + 1)) * self.density.p * F0 \
            * (F0 * F0 - R0 * R0) / (R0 * R0)

    @property
    def s_max(self) -> float:
        return 50.0 * (1.0 + 1.0 / self.kappa0)


def init_shot(n: int, density: RadialDensity, kappa0: float,
              tolerances: Optional[ShotTolerances] = None,
              experimental: bool = False) -> ShotConfig:
    """Build a shot configuration from dimension, density and start curvature.

    kappa0 <= 0 is rejected; kappa0 <= 1 (initial tangent circle reaching
    left of the origin) is tagged out-of-regime but still integrable.
    """
    if kappa0 <= 0:
        raise OutOfDomainError("kappa0 must be positive")
    if n < 3 and not experimental:
        raise OutOfDomainError("n >= 3 (n = 2 only behind experimental flag)")
    if density.kind == "power" and density.p == 0 and not experimental:
        raise OutOfDomainError("p = 0 requires the experimental flag")
    return ShotConfig(n=int(n), density=density, kappa0=float(kappa0),
                      tolerances=tolerances or ShotTolerances(),
                      experimental=experimental)


def curvature_rhs(state, config: ShotConfig) -> float:
    """Profile curvature at a shot state.

    Uses the curvature law away from the axis.  In the start region
    (small s, y below the Taylor-step scale) the law is 0/0 and the
    symmetric expansion kappa0 + kappa''(0) s^2 / 2 is returned instead.
    """
    x, y, phi = float(state[0]), float(state[1]), float(state[2])
    s = float(state[3]) if len(state) > 3 else None
    h0 = _taylor_step(config)
    if s is not None and abs(s) <= h0 and y <= h0:
        return config.kappa0 + 0.5 * config.kappa_pp0 * s * s
    if y <= 0:
        raise IntegrationDomainError(f"state below the axis: y = {y}")
    lam = -math.cos(phi) / y
    r2 = x * x + y * y
    if r2 == 0:
        raise IntegrationDomainError("state at the origin")
    if config.density.kind == "power":
        h1 = config.density.p * (x * math.sin(phi) - y * math.cos(phi)) / r2
    else:
        r = math.sqrt(r2)
        h1 = config.density.dg(r) * (x * math.sin(phi) - y * math.cos(phi)) / r
    return config.c - (config.n - 2) * lam - h1


class ShotOutcome(Enum):
    CLOSED = "Closed"
    RIGHT = "RightCase"
    LEFT = "LeftCase"
    OUT_OF_REGIME = "OutOfRegime"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ShotEvents:
    """Event log of one shot, all arclength values.

    minima holds every recorded local minimum of y as (s, x, y, phi);
    beta is the first of them, or the axis/origin endpoint when the shot
    genuinely reaches the axis.  horizontal lists every horizontal
    tangent (s, kind) with kind +1 for y-maxima and -1 for y-minima.
    """

    delta: Optional[float] = None
    eta: Optional[float] = None
    minima: List[Tuple[float, float, float, float]] = field(default_factory=list)
    beta: Optional[Tuple[float, float, float, float]] = None
    origin: Optional[Tuple[float, float, float, float]] = None
    axis_vertical: Optional[Tuple[float, float, float, float]] = None
    horizontal: List[Tuple[float, int]] = field(default_factory=list)

    @property
    def beta_s(self) -> Optional[float]:
        return None if self.beta is None else self.beta[0]


@dataclass
class ShotCurve:
    """Dense shot trajectory with per-sample geometry and an event log."""

    config: ShotConfig
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    kappa: np.ndarray
    lam: np.ndarray
    F: np.ndarray
    R: np.ndarray
    H1: np.ndarray
    events: ShotEvents
    termination: str
    endpoint: Tuple[float, float]
    _segments: list = field(default_factory=list, repr=False)

    @property
    def s_end(self) -> float:
        """Arclength at which the integration stopped."""
        return self._segments[-1][1]

    def state_at(self, s):
        """Dense-output state (x, y, phi) at arclength s (scalar or array)."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty((3, s_arr.size))
        bounds = [seg[1] for seg in self._segments]
        for i, si in enumerate(s_arr):
            if si <= self._segments[0][0]:
                out[:, i] = _taylor_state(self.config, si)
                continue
            k = min(bisect.bisect_left(bounds, si), len(self._segments) - 1)
            out[:, i] = self._segments[k][2](min(si, self._segments[k][1]))
        return out[:, 0] if np.isscalar(s) else out

    def kappa_at(self, s):
        st = self.state_at(s)
        if st.ndim == 1:
            return curvature_rhs((st[0], st[1], st[2], s), self.config)
        return np.array([curvature_rhs((st[0, i], st[1, i], st[2, i], si),
                                       self.config)
                         for i, si in enumerate(np.atleast_1d(s))])


def _taylor_step(config: ShotConfig) -> float:
    return 1e-4 * min(1.0, 1.0 / config.kappa0)


def _taylor_state(config: ShotConfig, s: float):
    """Symmetric start expansion; valid for |s| up to a few Taylor steps.

    kappa'(0) = 0 (mirror symmetry over the axis), so
    x = 1 - k0 s^2/2, y = s - k0^2 s^3/6, phi = pi/2 + k0 s + k''(0) s^3/6.
    """
    k0 = config.kappa0
    kpp = config.kappa_pp0
    return (1.0 - 0.5 * k0 * s * s,
            s - k0 * k0 * s ** 3 / 6.0,
            0.5 * math.pi + k0 * s + kpp * s ** 3 / 6.0)


def _make_rhs(config: ShotConfig):
    n, c = config.n, config.c
    power = config.density.kind == "power"
    p = config.density.p
    dg = config.density.dg
    cos, sin, sqrt = math.cos, math.sin, math.sqrt

    def rhs(s, u):
        x, y, phi = u
        cp = cos(phi)
        sp = sin(phi)
        ys = y if y > _Y_CLAMP else _Y_CLAMP
        lam = -cp / ys
        r2 = x * x + y * y
        if r2 < _R2_CLAMP:
            r2 = _R2_CLAMP
        if power:
            h1 = p * (x * sp - y * cp) / r2
        else:
            r = sqrt(r2)
            h1 = dg(r) * (x * sp - y * cp) / r
        return (cp, sp, c - (n - 2) * lam - h1)

    return rhs


def _minimum_tangent_kind(phi: float) -> str:
    """'L' when the horizontal tangent at a y-minimum points left, else 'R'."""
    return "L" if math.cos(phi) < 0 else "R"


def integrate(config: ShotConfig, samples_per_unit: float = 400.0,
              lean: bool = False) -> ShotCurve:
    """Shoot the curve and log events.

    One explicit Taylor step of length 1e-4*min(1, 1/kappa0) leaves the
    start singularity of lambda; from there an adaptive 8th-order pair
    with dense output integrates until the first of: origin proximity
    (closing solution), vertical axis return (p = 0 circles), a
    classifiable local minimum of y, escape, or the safety bound s_max.
    A minimum is classifiable when the side of the e2-axis and the
    horizontal tangent direction point to the same case; the trajectory
    is otherwise continued through the bounce to the next minimum.

    lean mode skips the dense sample arrays (bisection only needs events).
    """
    tol = config.tolerances
    rhs = _make_rhs(config)
    h0 = _taylor_step(config)
    state = list(_taylor_state(config, h0))
    s_now = h0
    events = ShotEvents()
    segments = []
    termination = "smax"
    endpoint: Optional[Tuple[float, float]] = None

    def ev_min(s, u):
        return math.sin(u[2])
    ev_min.terminal = True
    ev_min.direction = 1

    def ev_max(s, u):
        return math.sin(u[2])
    ev_max.terminal = False
    ev_max.direction = -1

    def ev_eta(s, u):
        return u[2] - 1.5 * math.pi
    ev_eta.terminal = False
    ev_eta.direction = 0

    def ev_origin(s, u):
        return math.hypot(u[0], u[1]) - tol.origin_radius
    ev_origin.terminal = True
    ev_origin.direction = -1

    def ev_yfloor(s, u):
        return u[1] - tol.terminal_y
    ev_yfloor.terminal = True
    ev_yfloor.direction = -1

    def ev_escape(s, u):
        return math.hypot(u[0], u[1]) - tol.escape_radius
    ev_escape.terminal = True
    ev_escape.direction = 1

    event_funcs = [ev_min, ev_max, ev_eta, ev_origin, ev_yfloor, ev_escape]

    while True:
        sol = solve_ivp(rhs, (s_now, config.s_max), state, method="DOP853",
                        rtol=tol.step_tol, atol=tol.abs_tol,
                        max_step=tol.max_step, dense_output=True,
                        events=event_funcs)
        if sol.status == -1:
            raise IntegrationDomainError(
                f"integrator failed near s = {sol.t[-1]:.6g}, "
                f"state = {sol.y[:, -1]}: {sol.message}")
        segments.append((s_now, sol.t[-1], sol.sol))

        for s_ev in sol.t_events[1]:
            events.horizontal.append((float(s_ev), +1))
            if events.delta is None:
                events.delta = float(s_ev)
        if events.eta is None and len(sol.t_events[2]):
            events.eta = float(sol.t_events[2][0])

        if len(sol.t_events[3]):       # origin proximity: the closing solution
            s_ev = float(sol.t_events[3][0])
            xe, ye, pe = sol.y_events[3][0]
            events.origin = (s_ev, xe, ye, pe)
            if events.beta is None:
                events.beta = events.origin
            termination = "origin"
            endpoint = (xe, ye)
            break
        if len(sol.t_events[4]):       # true axis return (vertical closure)
            s_ev = float(sol.t_events[4][0])
            xe, ye, pe = sol.y_events[4][0]
            ds = ye / max(abs(math.sin(pe)), 1e-6)   # linear extrapolation to y = 0
            events.axis_vertical = (s_ev + ds, xe + ds * math.cos(pe), 0.0, pe)
            if events.beta is None:
                events.beta = events.axis_vertical
            termination = "axis"
            endpoint = (events.axis_vertical[1], 0.0)
            break
        if len(sol.t_events[5]):
            termination = "escape"
            endpoint = tuple(sol.y_events[5][0][:2])
            break
        if len(sol.t_events[0]):       # local minimum of y
            s_ev = float(sol.t_events[0][0])
            xe, ye, pe = sol.y_events[0][0]
            events.minima.append((s_ev, float(xe), float(ye), float(pe)))
            events.horizontal.append((s_ev, -1))
            if events.beta is None:
                events.beta = events.minima[0]
            margin = 10.0 * tol.event_tol
            side = "L" if xe < -margin else ("R" if xe > margin else "0")
            kind = _minimum_tangent_kind(pe)
            if side == "0" or side == kind or \
                    len(events.minima) >= tol.max_minima:
                termination = "bounce"
                endpoint = (float(xe), float(ye))
                break
            # nudge past the minimum so the terminal event cannot refire
            ds = 1e-7
            k1 = rhs(s_ev, (xe, ye, pe))
            half = (xe + 0.5 * ds * k1[0], ye + 0.5 * ds * k1[1],
                    pe + 0.5 * ds * k1[2])
            k2 = rhs(s_ev + 0.5 * ds, half)
            s_now = s_ev + ds
            state = [xe + ds * k2[0], ye + ds * k2[1], pe + ds * k2[2]]
            continue
        termination = "smax"
        endpoint = tuple(sol.y[:2, -1])
        break

    curve = ShotCurve(config=config, s=np.empty(0), x=np.empty(0),
                      y=np.empty(0), phi=np.empty(0), kappa=np.empty(0),
                      lam=np.empty(0), F=np.empty(0), R=np.empty(0),
                      H1=np.empty(0), events=events, termination=termination,
                      endpoint=endpoint, _segments=segments)
    if not lean:
        _fill_samples(curve, samples_per_unit)
    return curve


def _fill_samples(curve: ShotCurve, samples_per_unit: float) -> None:
    config = curve.config
    s_end = curve.s_end
    count = int(min(6000, max(800, samples_per_unit * s_end)))
    grid = np.linspace(0.0, s_end, count)
    special = [e for e in [curve.events.delta, curve.events.eta,
                           curve.events.beta_s] if e is not None]
    grid = np.unique(np.concatenate([grid, np.asarray(special)]))
    st = curve.state_at(grid)
    x, y, phi = st
    # start row is exact; off-axis formulas elsewhere
    lam = np.empty_like(grid)
    H1 = np.empty_like(grid)
    lam[0], H1[0] = config.kappa0, config.density.log_derivative(1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam[1:] = -np.cos(phi[1:]) / y[1:]
        r2 = x * x + y * y
        if config.density.kind == "power":
            H1[1:] = config.density.p * (
                x[1:] * np.sin(phi[1:]) - y[1:] * np.cos(phi[1:])) / r2[1:]
        else:
            r = np.sqrt(r2[1:])
            dg = np.array([config.density.dg(v) for v in r])
            H1[1:] = dg * (x[1:] * np.sin(phi[1:])
                           - y[1:] * np.cos(phi[1:])) / r
        kappa = config.c - (config.n - 2) * lam - H1
        F = x + y * np.tan(phi)
        F[0] = config.F0
        R = np.hypot(x - F, y)
        R[0] = config.R0
    curve.s, curve.x, curve.y, curve.phi = grid, x, y, phi
    curve.kappa, curve.lam, curve.F, curve.R, curve.H1 = kappa, lam, F, R, H1


@dataclass
class Classification:
    """Shot outcome plus the data that determined it."""

    outcome: ShotOutcome
    beta: Optional[Tuple[float, float, float, float]]
    final_tangent: Optional[Tuple[float, float]]
    gamma1_beta: Optional[float]
    margin: float
    deciding_minimum: Optional[int] = None
    structure_warning: Optional[str] = None

    @property
    def label(self) -> str:
        return self.outcome.value


def classify(curve: ShotCurve) -> Classification:
    """Assign the trichotomy outcome to a terminated shot.

    Closed: origin proximity, or a vertical-tangent axis return (the
    p = 0 circles).  Otherwise the deciding y-minimum gives Left/Right:
    at the first minimum where the e2-axis side and the horizontal
    tangent direction agree, both point to the case.  When the first
    minimum is not the deciding one (strong densities bounce off the
    density ridge above the origin before approaching the axis), a
    structure warning records the mismatch.
    """
    events = curve.events
    tol = curve.config.tolerances
    margin = 10.0 * tol.event_tol
    if curve.config.out_of_regime and curve.config.density.p > 0:
        # kappa0 <= 1 puts the start tangent-circle center at or left of
        # the origin; the theory excludes it, so nothing is asserted
        return Classification(ShotOutcome.OUT_OF_REGIME, events.beta, None,
                              None, margin)
    if curve.termination == "origin":
        s_ev, xe, ye, pe = events.origin
        return Classification(ShotOutcome.CLOSED, events.origin,
                              (math.cos(pe), math.sin(pe)), xe, margin)
    if curve.termination == "axis":
        s_ev, xe, ye, pe = events.axis_vertical
        tangent = (math.cos(pe), math.sin(pe))
        if abs(math.cos(pe)) < 1e-2:
            return Classification(ShotOutcome.CLOSED, events.axis_vertical,
                                  tangent, xe, margin)
        side = "L" if xe < -margin else ("R" if xe > margin else "0")
        kind = _minimum_tangent_kind(pe)
        if side == kind:
            outcome = ShotOutcome.LEFT if side == "L" else ShotOutcome.RIGHT
            return Classification(outcome, events.axis_vertical, tangent,
                                  xe, margin)
        return Classification(ShotOutcome.INCONCLUSIVE, events.axis_vertical,
                              tangent, xe, margin)
    if curve.termination in ("escape", "smax") and not events.minima:
        return Classification(ShotOutcome.INCONCLUSIVE, None, None, None,
                              margin)

    for i, (s_ev, xe, ye, pe) in enumerate(events.minima):
        side = "L" if xe < -margin else ("R" if xe > margin else "0")
        kind = _minimum_tangent_kind(pe)
        if side == "0":
            return Classification(ShotOutcome.INCONCLUSIVE, events.beta,
                                  (math.cos(pe), math.sin(pe)), xe, margin,
                                  deciding_minimum=i,
                                  structure_warning="near-closing minimum")
        if side == kind:
            outcome = ShotOutcome.LEFT if side == "L" else ShotOutcome.RIGHT
            warn = None
            if i > 0:
                warn = (f"first {i} minima had mixed side/tangent "
                        f"indicators (density-ridge bounces)")
            b = events.beta
            return Classification(outcome, b,
                                  (math.cos(pe), math.sin(pe)),
                                  b[1], margin, deciding_minimum=i,
                                  structure_warning=warn)
    return Classification(ShotOutcome.INCONCLUSIVE, events.beta, None,
                          events.beta[1] if events.beta else None, margin,
                          structure_warning="no classifiable minimum")


def find_closing_kappa0(n: int, density: RadialDensity,
                        bracket: Tuple[float, float] = (1.1, 5.0),
                        tol: float = 1e-6,
                        tolerances: Optional[ShotTolerances] = None,
                        experimental: bool = False,
                        trace: Optional[list] = None) -> float:
    """Bisect the start curvature to the closing solution.

    The bracket must classify Left at the low end and Right at the high
    end.  Closed (origin proximity) and Inconclusive (indistinguishable
    from closing at working margins) both short-circuit.  The transition
    sits at kappa0 = 2 for every dimension and power: the closing circle
    through the origin forces the start tangent-circle center to 1/2.
    """
    tols = tolerances or LEAN_TOLERANCES

    def outcome_at(k0: float) -> ShotOutcome:
        cfg = init_shot(n, density, k0, tolerances=tols,
                        experimental=experimental)
        res = classify(integrate(cfg, lean=True))
        if trace is not None:
            trace.append((k0, res.label))
        return res.outcome

    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidBracketError("bracket must satisfy lo < hi")
    out_lo, out_hi = outcome_at(lo), outcome_at(hi)
    if out_lo is ShotOutcome.CLOSED:
        return lo
    if out_hi is ShotOutcome.CLOSED:
        return hi
    if out_lo is not ShotOutcome.LEFT or out_hi is not ShotOutcome.RIGHT:
        raise InvalidBracketError(
            f"bracket does not straddle the closing solution: "
            f"{lo} -> {out_lo.value}, {hi} -> {out_hi.value}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        out = outcome_at(mid)
        if out in (ShotOutcome.CLOSED, ShotOutcome.INCONCLUSIVE):
            return mid
        if out is ShotOutcome.LEFT:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class FeatureReport:
    """Structural features of a classified shot, per the case analysis."""

    outcome: ShotOutcome
    delta: Optional[float]
    eta: Optional[float]
    beta: Optional[float]
    horizontal_count: int
    gamma1_beta: Optional[float]
    gamma1_eta: Optional[float]
    final_tangent: Optional[Tuple[float, float]]
    pair_s_lower: np.ndarray
    pair_s_upper: np.ndarray
    pair_kappa_lower: np.ndarray
    pair_kappa_upper: np.ndarray
    upper_F: np.ndarray
    upper_R: np.ndarray
    upper_s: np.ndarray
    tangent_dot_max: float
    tangent_dot_terminal_positive: bool
    kappa_near_beta: float
    kappa_pp0_fd: float


def extract_features(curve: ShotCurve, n_pairs: int = 200) -> FeatureReport:
    """Measure the case-structure features of a shot on [0, beta].

    Matched-height pairs (s, s_bar) use monotone cubic inversion of the
    height on the ascending branch [0, delta] and the descending branch
    [delta, beta]; curvature at paired parameters comes from the dense
    state, so the comparison carries integrator accuracy.
    """
    if curve.s.size == 0:
        raise OutOfDomainError(
            "feature extraction needs a sampled curve (integrate with "
            "lean=False)")
    cls = classify(curve)
    ev = curve.events
    beta_s = ev.beta_s
    delta_s = ev.delta
    horiz = [s for (s, kind) in ev.horizontal
             if beta_s is None or s < beta_s - 1e-12]
    gamma1_eta = None
    if ev.eta is not None and (beta_s is None or ev.eta <= beta_s):
        st = curve.state_at(ev.eta)
        gamma1_eta = float(st[0])

    pair_sl = pair_su = pair_kl = pair_ku = np.empty(0)
    if delta_s is not None and beta_s is not None and beta_s > delta_s:
        mask_up = (curve.s > 0) & (curve.s < delta_s)
        s_up = np.concatenate([[0.0], curve.s[mask_up], [delta_s]])
        y_up = np.concatenate([[0.0], curve.y[mask_up],
                               [float(curve.state_at(delta_s)[1])]])
        s_up, idx = np.unique(s_up, return_index=True)
        y_up = y_up[idx]
        keep = np.concatenate([[True], np.diff(y_up) > 0])
        inv_upper = PchipInterpolator(y_up[keep], s_up[keep], extrapolate=False)
        y_beta = float(curve.state_at(beta_s)[1])
        y_delta = y_up[-1]
        lo = max(y_beta, y_up[keep][0]) + 1e-9
        hi = y_delta - 1e-9
        if hi > lo:
            heights = np.linspace(lo, hi, n_pairs)
            s_lower = _invert_descending(curve, delta_s, beta_s, heights)
            s_upper = inv_upper(heights)
            ok = ~(np.isnan(s_lower) | np.isnan(s_upper))
            pair_sl, pair_su = s_lower[ok], s_upper[ok]
            pair_kl = curve.kappa_at(pair_sl)
            pair_ku = curve.kappa_at(pair_su)

    mask_K = curve.s <= (delta_s if delta_s is not None else curve.s[-1])
    upper_s = curve.s[mask_K]
    upper_F = curve.F[mask_K]
    upper_R = curve.R[mask_K]

    dot = curve.x * np.cos(curve.phi) + curve.y * np.sin(curve.phi)
    if beta_s is not None:
        sel = (curve.s > 0) & (curve.s < beta_s) & \
              (np.hypot(curve.x, curve.y) > 1e-4)
    else:
        sel = curve.s > 0
    dot_max = float(dot[sel].max()) if sel.any() else 0.0
    terminal_pos = bool(sel.any() and dot[sel][-1] > 1e-8)

    kappa_near_beta = math.nan
    if beta_s is not None:
        kappa_near_beta = float(curve.kappa_at(max(beta_s - 1e-3,
                                                   0.9 * beta_s)))

    h = 0.02
    k0 = curve.config.kappa0
    a_h = 2.0 * (curve.kappa_at(h) - k0) / h ** 2
    a_h2 = 2.0 * (curve.kappa_at(h / 2) - k0) / (h / 2) ** 2
    kappa_pp0_fd = float((4.0 * a_h2 - a_h) / 3.0)

    return FeatureReport(
        outcome=cls.outcome, delta=delta_s, eta=ev.eta, beta=beta_s,
        horizontal_count=len(horiz),
        gamma1_beta=cls.gamma1_beta, gamma1_eta=gamma1_eta,
        final_tangent=cls.final_tangent,
        pair_s_lower=pair_sl, pair_s_upper=pair_su,
        pair_kappa_lower=pair_kl, pair_kappa_upper=pair_ku,
        upper_F=upper_F, upper_R=upper_R, upper_s=upper_s,
        tangent_dot_max=dot_max,
        tangent_dot_terminal_positive=terminal_pos,
        kappa_near_beta=kappa_near_beta,
        kappa_pp0_fd=kappa_pp0_fd,
    )


def _invert_descending(curve: ShotCurve, s_from: float, s_to: float,
                       heights: np.ndarray) -> np.ndarray:
    ss = np.linspace(s_from, s_to, 600)
    yy = curve.state_at(ss)[1]
    keep = np.concatenate([[True], np.diff(yy) < 0])
    ss, yy = ss[keep], yy[keep]
    interp = PchipInterpolator(yy[::-1], ss[::-1], extrapolate=False)
    return interp(heights)


def hf_residual(curve: ShotCurve, h: float = 1e-4) -> float:
    """Max residual of the curvature law along the shot.

    The profile curvature is re-measured as dphi/ds by Richardson finite
    differences of the dense output and compared against
    c - (n-2)*lambda - H1; the result reflects integrator fidelity, with
    a finite-difference floor around 1e-9.
    """
    ev = curve.events
    s_hi = curve.s[-1] - 2 * h
    sel = (curve.s > 2 * h) & (curve.s < s_hi) & (curve.y > 1e-3)
    worst = 0.0
    for s0, kap in zip(curve.s[sel][::7], curve.kappa[sel][::7]):
        d1 = (curve.state_at(s0 + h)[2] - curve.state_at(s0 - h)[2]) / (2 * h)
        d2 = (curve.state_at(s0 + h / 2)[2]
              - curve.state_at(s0 - h / 2)[2]) / h
        kappa_fd = (4.0 * d2 - d1) / 3.0
        worst = max(worst, abs(kappa_fd - kap))
    return worst


def curve_to_csv(curve: ShotCurve, path=None) -> Optional[str]:
    """Write the sampled curve as CSV (header s,x,y,phi,kappa,lambda,F,R,H1)."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    cols = (curve.s, curve.x, curve.y, curve.phi, curve.kappa, curve.lam,
            curve.F, curve.R, curve.H1)
    for row in zip(*cols):
        buf.write(",".join("%.17g" % v for v in row) + "\n")
    text = buf.getvalue()
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text)
    return None


def read_curve_csv(path) -> dict:
    """Read a curve CSV back into a dict of numpy columns."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}


def summary_record(curve: ShotCurve) -> str:
    """JSON summary of one shot: configuration, events, outcome, endpoint."""
    cls = classify(curve)
    ev = curve.events
    rec = {
        "n": curve.config.n,
        "p": curve.config.density.p,
        "kappa0": curve.config.kappa0,
        "c": curve.config.c,
        "outcome": cls.label,
        "endpoint": list(curve.endpoint),
        "gamma1_beta": cls.gamma1_beta,
        "final_tangent": list(cls.final_tangent) if cls.final_tangent else None,
        "events": {
            "delta": ev.delta,
            "eta": ev.eta,
            "beta": ev.beta_s,
            "origin_hit": ev.origin is not None,
            "minima": [list(m) for m in ev.minima],
            "horizontal_tangents": len([1 for s, _ in ev.horizontal
                                        if ev.beta_s is None
                                        or s < ev.beta_s - 1e-12]),
        },
        "termination": curve.termination,
        "structure_warning": cls.structure_warning,
    }
    return json.dumps(rec, indent=2, sort_keys=True)
