"""Analysis on osculating circles and same-height curvature comparisons.

An osculating circle (or line, when the curvature vanishes) carries
closed-form expressions for how the axis-centered tangent circle at a
moving point changes: the abscissa of its center, its radius, their
difference, and the normal log-density derivative.  Those derivatives
drive the admissibility predicates, which in turn certify a strict
ordering of the normal density derivative at two points of equal height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    InvalidConfigurationError,
    OutOfDomainError,
    UndefinedCanonicalCircleError,
)
from .geometry import (
    RadialDensity,
    canonical_circle,
    h1_value,
    outward_normal,
    theta,
)

STRICT_QUADRANT_TOL = 1e-9   # "strictly inside a quadrant" margin on components

__all__ = [
    "OsculatingCircle",
    "TildeSample",
    "tilde_quantities",
    "h1_tilde_second_at_top",
    "x_star",
    "AdmissibilityResult",
    "admissible_right",
    "admissible_left",
    "h1_compare",
    "ComparisonReport",
    "curvature_comparison_check",
    "sample_right_admissible",
    "sample_left_admissible",
]


@dataclass(frozen=True)
class OsculatingCircle:
    """Circle (or line) matching a curve's position, tangent and curvature.

    Circle variant: center (a, b), radius r > 0, orientation 'ccw' for
    positive curvature or 'cw' for negative.  Line variant (zero
    curvature): base point and unit direction.
    """

    a: float = 0.0
    b: float = 0.0
    r: float = 0.0
    orientation: str = "ccw"
    line_point: Optional[tuple] = None
    line_direction: Optional[tuple] = None

    def __post_init__(self) -> None:
        if self.is_line:
            dx, dy = self.line_direction
            if abs(math.hypot(dx, dy) - 1.0) > 1e-9:
                raise OutOfDomainError("line direction must be unit norm")
        else:
            if self.r <= 0:
                raise OutOfDomainError("circle radius must be positive")
            if self.orientation not in ("ccw", "cw"):
                raise OutOfDomainError("orientation must be 'ccw' or 'cw'")

    @property
    def is_line(self) -> bool:
        return self.line_point is not None

    def point(self, t: float) -> tuple:
        """Arclength parameterization; t = 0 is the rightmost point for circles."""
        if self.is_line:
            px, py = self.line_point
            dx, dy = self.line_direction
            return (px + t * dx, py + t * dy)
        u = t / self.r
        if self.orientation == "ccw":
            return (self.a + self.r * math.cos(u), self.b + self.r * math.sin(u))
        return (self.a + self.r * math.cos(u), self.b - self.r * math.sin(u))

    def tangent(self, t: float) -> tuple:
        if self.is_line:
            return self.line_direction
        u = t / self.r
        if self.orientation == "ccw":
            return (-math.sin(u), math.cos(u))
        return (-math.sin(u), -math.cos(u))


@dataclass(frozen=True)
class TildeSample:
    """Values and closed-form derivatives of the tangent-circle data at one
    parameter of an osculating circle."""

    t: float
    F: float
    R: float
    G: float
    H1: float
    dF: float
    dR: float
    dG: float
    dH1: float


def tilde_quantities(A: OsculatingCircle, t: float,
                     density: RadialDensity) -> TildeSample:
    """Tangent-circle data along an osculating circle, with derivatives.

    Values come from the generic axis-centered tangent circle at the
    point A(t); derivatives are the closed forms of the three cases
    (counterclockwise circle, clockwise circle, line).  The circle
    branches are valid for t/r in (0, pi) with the sample point strictly
    above the axis.
    """
    q = A.point(t)
    tan = A.tangent(t)
    if q[1] <= 0 and abs(tan[0]) > 1e-15:
        raise UndefinedCanonicalCircleError(
            "tilde quantities need the sample point above the axis")
    circ = canonical_circle(q, tan)
    F = circ.F
    R = circ.R if circ.R is not None else math.inf
    nu = outward_normal(tan)
    H1 = h1_value(q, nu, density)

    if A.is_line:
        vx, vy = A.line_direction
        if abs(vx) < 1e-15:
            raise OutOfDomainError(
                "tilde derivatives are undefined along a vertical line")
        dF = 1.0 / vx
        dG = (1.0 + vy) / vx
        dR = dF - dG
        qx, qy = A.line_point
        qdotnu = qx * nu[0] + qy * nu[1]   # constant along the line
        qdotv = qx * vx + qy * vy
        r2 = (qx + t * vx) ** 2 + (qy + t * vy) ** 2
        dH1 = -2.0 * _density_scale(density) * qdotnu * (qdotv + t) / r2 ** 2
        return TildeSample(t, F, R, F - R, H1, dF, dR, dG, dH1)

    a, b, r = A.a, A.b, A.r
    u = t / r
    s, c = math.sin(u), math.cos(u)
    if not 0.0 < u < math.pi or abs(s) < 1e-15:
        raise OutOfDomainError("circle-branch derivatives need t/r in (0, pi)")
    csc2 = 1.0 / (s * s)
    p_eff = _density_scale(density)
    alen2 = q[0] * q[0] + q[1] * q[1]
    if A.orientation == "ccw":
        dF = (b / r) * csc2
        dR = -(b / r) * csc2 * c
        dH1 = -p_eff * (a * a + b * b - r * r) * (-b * c + a * s) / (r * alen2 ** 2)
    else:
        dF = -(b / r) * csc2
        dR = -(b / r) * csc2 * c
        dH1 = p_eff * (a * a + b * b - r * r) * (a * s + b * c) / (r * alen2 ** 2)
    dG = dF - dR
    return TildeSample(t, F, R, F - R, H1, dF, dR, dG, dH1)


def _density_scale(density: RadialDensity) -> float:
    if density.kind != "power":
        raise OutOfDomainError(
            "closed-form tilde derivatives are specific to the power density")
    return density.p


def h1_tilde_second_at_top(a: float, r: float, density: RadialDensity) -> float:
    """Second derivative of the normal density term at the rightmost point
    of the circle centered (a, 0) with radius r.

    Closed form p / (a+r)^4 * (a / r^2) * (r^2 - a^2); its sign matches
    sign(r - a) for positive a, r, which is what separates the two
    shooting cases at the start of the curve.
    """
    if r <= 0:
        raise OutOfDomainError("radius must be positive")
    p = _density_scale(density)
    return p / (a + r) ** 4 * (a / r ** 2) * (r ** 2 - a ** 2)


def x_star(p2, v2) -> float:
    """Abscissa x* with (x*, y) . v2 = 0 for y = p2.y.

    This is the tangency abscissa of the origin-centered circle touched
    by v2 at height y; it bounds the second point in the left-case
    admissibility test.
    """
    y = float(p2[1])
    vx, vy = float(v2[0]), float(v2[1])
    if y <= 0:
        raise OutOfDomainError("x_star requires a point above the axis")
    if abs(vx) < 1e-15:
        raise OutOfDomainError("x_star is undefined for a vertical direction")
    return -y * vy / vx


@dataclass
class AdmissibilityResult:
    """Outcome of an admissibility predicate with per-condition diagnostics."""

    admissible: bool
    conditions: dict = field(default_factory=dict)
    failed: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.admissible


def _check_pair_preconditions(p1, p2, v1, v2):
    x1, y1 = float(p1[0]), float(p1[1])
    x2, y2 = float(p2[0]), float(p2[1])
    if y1 <= 0 or abs(y1 - y2) > 1e-12 * max(1.0, abs(y1)):
        raise InvalidConfigurationError("points must share a height y > 0")
    v1x, v1y = float(v1[0]), float(v1[1])
    v2x, v2y = float(v2[0]), float(v2[1])
    if not (v1x < -STRICT_QUADRANT_TOL and v1y > STRICT_QUADRANT_TOL):
        raise InvalidConfigurationError("v1 must lie strictly in the second quadrant")
    if not (v2x < -STRICT_QUADRANT_TOL and v2y < -STRICT_QUADRANT_TOL):
        raise InvalidConfigurationError("v2 must lie strictly in the third quadrant")
    return (x1, y1), (x2, y2), (v1x, v1y), (v2x, v2y)


def admissible_right(p1, p2, v1, v2) -> AdmissibilityResult:
    """Right-case admissibility of (v1, v2) with respect to (p1, p2).

    Conditions: (1) the tangent circle at p1 has center abscissa a1
    exceeding its radius R1, (2) theta(v2) >= theta(v1') where v1' is v1
    reflected over the axis, (3) x1 - a1 >= a1 - x2.
    """
    (x1, y1), (x2, _), (v1x, v1y), v2u = _check_pair_preconditions(p1, p2, v1, v2)
    C1 = canonical_circle((x1, y1), (v1x, v1y))
    v1p = (v1x, -v1y)
    conds = {
        "center_right_of_radius": C1.F > C1.R,
        "theta_order": theta(v2u) >= theta(v1p),
        "reflection_reach": (x1 - C1.F) >= (C1.F - x2),
    }
    failed = [k for k, ok in conds.items() if not ok]
    return AdmissibilityResult(not failed, conds, failed)


def admissible_left(p1, p2, v1, v2) -> AdmissibilityResult:
    """Left-case admissibility of (v1, v2) with respect to (p1, p2).

    Conditions: (1) 0 < a1 < R1, (2) theta(v2) <= theta(v1'),
    (3) R2 <= R1, (4) x2 in [x*, x1'] with x1' the reflection of x1 over
    the vertical line through the center of the first tangent circle.
    """
    (x1, y1), (x2, _), (v1x, v1y), v2u = _check_pair_preconditions(p1, p2, v1, v2)
    C1 = canonical_circle((x1, y1), (v1x, v1y))
    C2 = canonical_circle((x2, y1), v2u)
    v1p = (v1x, -v1y)
    xs = x_star((x2, y1), v2u)
    x1p = 2.0 * C1.F - x1
    conds = {
        "center_inside_radius": 0.0 < C1.F < C1.R,
        "theta_order": theta(v2u) <= theta(v1p),
        "radius_order": C2.R <= C1.R,
        "x2_window": xs <= x2 <= x1p,
    }
    failed = [k for k, ok in conds.items() if not ok]
    return AdmissibilityResult(not failed, conds, failed)


def h1_compare(p1, p2, v1, v2, density: RadialDensity):
    """Normal-density-derivative values at two points and their ordering.

    Returns (value1, value2, cmp) where value_i = p * q_i . v_i_perp /
    |q_i|^2 with v_perp the clockwise rotation, and cmp is +1, -1 or 0
    by strict comparison.  Which direction is implied depends on which
    admissibility predicate holds for the configuration.
    """
    a = h1_value(p1, outward_normal(v1), density)
    b = h1_value(p2, outward_normal(v2), density)
    cmp = 0
    if a > b:
        cmp = 1
    elif a < b:
        cmp = -1
    return a, b, cmp


@dataclass
class ComparisonReport:
    """Numeric verdict for the two-graph curvature comparison principle."""

    hypotheses_met: bool
    hypothesis_failures: list
    values_ordered: bool
    angles_ordered: bool
    first_violation: Optional[int]
    phi_gap: Optional[float]


def curvature_comparison_check(f_samples, g_samples, tol: float = 1e-12
                               ) -> ComparisonReport:
    """Check the graph comparison principle on sampled data.

    Each sample set is an array of rows (x, value, derivative,
    upward curvature) on a common strictly increasing grid over (a, b).
    Hypotheses: derivatives nonnegative, right-end value of f below g,
    right-end tangent angle of f above g, curvature of f below g
    everywhere.  Conclusions checked sample-wise: f <= g and
    theta(t_f) >= theta(t_g); if the curvature inequality is strict
    somewhere, a positive angle gap must persist left of that sample.
    """
    f = np.asarray(f_samples, dtype=float)
    g = np.asarray(g_samples, dtype=float)
    if f.shape != g.shape or f.ndim != 2 or f.shape[1] != 4:
        raise OutOfDomainError("expected matching (m, 4) sample arrays")
    if not np.allclose(f[:, 0], g[:, 0], rtol=0, atol=1e-13):
        raise OutOfDomainError("sample grids differ")

    def angles(rows):
        return np.array([theta(_unit_tangent(d)) for d in rows[:, 2]])

    th_f, th_g = angles(f), angles(g)
    failures = []
    if np.any(f[:, 2] < -tol) or np.any(g[:, 2] < -tol):
        failures.append("monotonicity")
    if not f[-1, 1] <= g[-1, 1] + tol:
        failures.append("right_end_values")
    if not th_f[-1] >= th_g[-1] - tol:
        failures.append("right_end_angles")
    if np.any(f[:, 3] > g[:, 3] + tol):
        failures.append("curvature_order")
    if failures:
        return ComparisonReport(False, failures, False, False, None, None)

    bad_vals = np.nonzero(f[:, 1] > g[:, 1] + tol)[0]
    bad_angs = np.nonzero(th_f < th_g - tol)[0]
    first = None
    if bad_vals.size or bad_angs.size:
        first = int(min([i.min() for i in (bad_vals, bad_angs) if i.size]))
    strict = np.nonzero(f[:, 3] < g[:, 3] - tol)[0]
    phi_gap = None
    if strict.size:
        x0 = strict[-1]
        left = slice(0, max(int(x0), 1))
        phi_gap = float(np.min(th_f[left] - th_g[left]))
    return ComparisonReport(True, [], bad_vals.size == 0, bad_angs.size == 0,
                            first, phi_gap)


def _unit_tangent(slope: float) -> tuple:
    norm = math.hypot(1.0, slope)
    return (1.0 / norm, slope / norm)


def sample_right_admissible(rng: np.random.Generator):
    """Draw one right-admissible configuration (p1, p2, v1, v2).

    The first tangent circle and the on-circle point are sampled
    directly; the remaining freedoms are sampled inside the feasible
    windows, with rejection only for numeric strictness margins.
    Returns None on rejection so callers can log the rate.
    """
    a1 = rng.uniform(0.2, 2.0)
    R1 = rng.uniform(0.05, 0.95) * a1
    t1 = rng.uniform(1e-3, math.pi / 2 - 1e-3)
    x1 = a1 + R1 * math.cos(t1)
    y = R1 * math.sin(t1)
    v1 = (-math.sin(t1), math.cos(t1))
    th_low = theta((v1[0], -v1[1]))
    th2 = rng.uniform(th_low, 3 * math.pi / 2 - 1e-3)
    v2 = (math.cos(th2), math.sin(th2))
    x1p = 2 * a1 - x1
    x2 = rng.uniform(x1p, x1)
    if v1[0] > -STRICT_QUADRANT_TOL or v2[0] > -STRICT_QUADRANT_TOL \
            or v2[1] > -STRICT_QUADRANT_TOL:
        return None
    res = admissible_right((x1, y), (x2, y), v1, v2)
    if not res:
        return None
    return (x1, y), (x2, y), v1, v2


def sample_left_admissible(rng: np.random.Generator):
    """Draw one left-admissible configuration (p1, p2, v1, v2), or None."""
    a1 = rng.uniform(0.05, 1.0)
    R1 = rng.uniform(1.05, 3.0) * a1
    t1 = rng.uniform(1e-3, math.pi / 2 - 1e-3)
    x1 = a1 + R1 * math.cos(t1)
    y = R1 * math.sin(t1)
    v1 = (-math.sin(t1), math.cos(t1))
    th_hi = theta((v1[0], -v1[1]))
    th2 = rng.uniform(math.pi + 1e-3, th_hi)
    v2 = (math.cos(th2), math.sin(th2))
    R2 = y / (-v2[0]) if v2[0] < 0 else math.inf
    if not R2 <= R1:
        return None
    xs = x_star((0.0, y), v2)   # x* depends only on y and v2
    x1p = 2 * a1 - x1
    if xs > x1p:
        return None
    x2 = rng.uniform(xs, x1p)
    if v2[0] > -STRICT_QUADRANT_TOL or v2[1] > -STRICT_QUADRANT_TOL:
        return None
    res = admissible_left((x1, y), (x2, y), v1, v2)
    if not res:
        return None
    return (x1, y), (x2, y), v1, v2
