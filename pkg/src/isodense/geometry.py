"""Pointwise geometry for generating curves of hypersurfaces of revolution.

Positions live in the plane that is rotated about the e1-axis; a point
(x, y) with y > 0 sweeps an (n-2)-sphere of radius y.  The ambient weight
is a radial density, r^p by default.  All operations here are exact
formulas on points and unit tangents; nothing integrates.

Orientation conventions, used everywhere in the package:

* generating curves are parameterized counterclockwise, so the outward
  unit normal is the clockwise rotation of the unit tangent;
* an axis-centered circle traversed counterclockwise has positive signed
  curvature (+1/R), clockwise gives -1/R;
* `theta` measures tangent directions counterclockwise from the positive
  e1-axis in the interval (0, 2*pi], so theta((1, 0)) = 2*pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (
    OutOfDomainError,
    SingularPointError,
    UndefinedCanonicalCircleError,
)

UNIT_NORM_TOL = 1e-9        # accepted deviation of |v| from 1 on input
INCIDENCE_TOL = 1e-12       # postcondition tolerance for tangency checks

__all__ = [
    "RadialDensity",
    "CanonicalCircle",
    "theta",
    "h1_value",
    "canonical_circle",
    "lambda_from_state",
    "h0",
    "hf",
    "outward_normal",
    "sphere_area",
]


@dataclass(frozen=True)
class RadialDensity:
    """Radial weight r -> exp(g(r)).

    The power kind has g(r) = log(r^p) and exact log-derivative p/r.
    Other radial profiles are admitted only for falsification experiments
    and carry their own g and g' callables.
    """

    p: float
    kind: str = "power"
    g: Optional[Callable[[float], float]] = None
    dg: Optional[Callable[[float], float]] = None

    def __post_init__(self) -> None:
        if self.kind == "power":
            if self.p < 0:
                raise OutOfDomainError("power density requires p >= 0")
        elif self.kind == "experimental-other":
            if self.g is None or self.dg is None:
                raise OutOfDomainError("experimental density needs g and dg")
        else:
            raise OutOfDomainError(f"unknown density kind {self.kind!r}")

    @staticmethod
    def power(p: float) -> "RadialDensity":
        if p <= 0:
            raise OutOfDomainError("the main regime requires p > 0")
        return RadialDensity(p=p)

    @staticmethod
    def experimental(g, dg, p: float = 0.0) -> "RadialDensity":
        """Non-power radial log-density; only the falsification checks use it."""
        return RadialDensity(p=p, kind="experimental-other", g=g, dg=dg)

    def weight(self, r: float) -> float:
        """Density value at radius r > 0."""
        if r <= 0:
            raise OutOfDomainError("density evaluated at r <= 0")
        if self.kind == "power":
            return r ** self.p
        return math.exp(self.g(r))

    def log_derivative(self, r: float) -> float:
        """g'(r); exactly p/r for the power kind."""
        if r <= 0:
            raise OutOfDomainError("log-derivative evaluated at r <= 0")
        if self.kind == "power":
            return self.p / r
        return self.dg(r)


@dataclass(frozen=True)
class CanonicalCircle:
    """Axis-centered oriented circle tangent to a point-direction pair.

    Non-degenerate: center (F, 0), radius R, signed curvature lam with
    |lam| * R = 1 and lam > 0 iff counterclockwise.  A vertical tangent
    produces the degenerate variant (an oriented vertical line through
    the point): lam = 0, R is None, and F records the line's abscissa.
    """

    F: float
    R: Optional[float]
    lam: float
    degenerate: bool = False


def _check_unit(v) -> tuple:
    ux, uy = float(v[0]), float(v[1])
    if abs(math.hypot(ux, uy) - 1.0) > UNIT_NORM_TOL:
        raise OutOfDomainError(f"not a unit vector: {(ux, uy)}")
    return ux, uy


def theta(v) -> float:
    """Counterclockwise angle of a unit vector from the positive e1-axis.

    Returns the angle in (0, 2*pi]; (1, 0) maps to 2*pi by the interval
    convention, so the map is a bijection from the unit circle.
    """
    ux, uy = _check_unit(v)
    a = math.atan2(uy, ux)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a


def outward_normal(t) -> tuple:
    """Clockwise rotation of the tangent: the outward normal of a ccw curve."""
    return (t[1], -t[0])


def h1_value(q, nu, density: RadialDensity) -> float:
    """Normal derivative of the log-density at q in direction nu.

    For the power density: p * (q . nu) / |q|^2.  The origin is the
    density's singular point and is rejected.
    """
    x, y = float(q[0]), float(q[1])
    nx, ny = _check_unit(nu)
    r2 = x * x + y * y
    if r2 == 0.0:
        raise SingularPointError("h1 is undefined at the origin")
    if density.kind == "power":
        return density.p * (x * nx + y * ny) / r2
    r = math.sqrt(r2)
    return density.dg(r) * (x * nx + y * ny) / r


def canonical_circle(q, t) -> CanonicalCircle:
    """Oriented circle centered on the e1-axis through q with tangent t.

    F = (q . t) / t_x, R = |q - (F, 0)|, and the sign of lam follows the
    traversal direction induced by t.  A vertical tangent yields the
    degenerate vertical-line variant; a non-vertical tangent at a point
    on the axis admits no such circle and raises.
    """
    x, y = float(q[0]), float(q[1])
    tx, ty = _check_unit(t)
    if abs(tx) < 1e-15:
        # vertical line through q, oriented by the sign of ty
        return CanonicalCircle(F=x, R=None, lam=0.0, degenerate=True)
    if y == 0.0:
        raise UndefinedCanonicalCircleError(
            "no axis-centered circle is tangent to a non-vertical direction "
            "at a point on the axis"
        )
    F = (x * tx + y * ty) / tx
    dx = x - F
    R = math.hypot(dx, y)
    # ccw tangent at q on the circle centered (F,0) is the +90 deg rotation
    # of the outward radius direction; match it against t.
    ccw = (-y * tx + dx * ty) > 0.0
    lam = (1.0 if ccw else -1.0) / R
    return CanonicalCircle(F=F, R=R, lam=lam)


def lambda_from_state(y: float, phi: float) -> float:
    """Signed curvature of the canonical circle from height and tangent angle.

    Equals -cos(phi)/y for y > 0; agrees with canonical_circle whenever
    both are defined (and extends it continuously across vertical
    tangents, where the value is 0).
    """
    if y <= 0:
        raise OutOfDomainError("lambda_from_state requires y > 0")
    return -math.cos(phi) / y


def h0(kappa: float, lam: float, n: int, experimental: bool = False) -> float:
    """Unaveraged mean curvature of the revolved surface: kappa + (n-2)*lam.

    The profile curvature contributes one principal curvature and the
    canonical circle supplies the remaining n-2 equal ones.  n >= 3 in
    the main regime; n = 2 (vanishing second term) needs the
    experimental flag.
    """
    _check_dimension(n, experimental)
    return kappa + (n - 2) * lam


def hf(q, t, kappa: float, n: int, density: RadialDensity,
       experimental: bool = False) -> float:
    """Generalized mean curvature at q for profile curvature kappa.

    Sum of h0 and the normal log-density derivative, with the outward
    normal taken as the clockwise rotation of t.  Constant along the
    generating curve of any weighted-area-minimizing surface.
    """
    _check_dimension(n, experimental)
    circ = canonical_circle(q, t)
    lam = circ.lam
    if circ.degenerate and abs(float(q[1])) < 1e-12:
        # on-axis vertical tangent: the canonical circle is a limit and its
        # curvature converges to the profile curvature along any C^2 curve
        lam = kappa
    nu = outward_normal((float(t[0]), float(t[1])))
    return kappa + (n - 2) * lam + h1_value(q, nu, density)


def _check_dimension(n: int, experimental: bool) -> None:
    if int(n) != n:
        raise OutOfDomainError("dimension n must be an integer")
    if n < 2 or (n == 2 and not experimental):
        raise OutOfDomainError("n >= 3 (n = 2 only behind experimental flag)")


def sphere_area(k: int) -> float:
    """Surface area of the unit k-sphere: 2 * pi^((k+1)/2) / Gamma((k+1)/2)."""
    if k < 0:
        raise OutOfDomainError("sphere dimension must be nonnegative")
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)
