import math

import numpy as np
import pytest
from scipy.special import beta as beta_fn

from isodense.errors import OutOfDomainError
from isodense.geometry import RadialDensity, sphere_area
from isodense.measures import (
    centered_sphere_measures,
    isoperimetric_compare,
    origin_sphere_measures,
    revolve_measures,
)
from isodense.shooting import init_shot, integrate

D0 = RadialDensity(p=0.0)
D1 = RadialDensity(p=1)


def origin_sphere_closed_form(a, n, p):
    """Independent oracle via the Euler beta function.

    Substituting the polar equation r = 2a cos(theta) and halving angles
    turns both integrals into beta integrals:
      P = sigma_{n-2} a^{n-1+p} 2^{n-2+p} B((n-1)/2, (n-1+p)/2)
      V = sigma_{n-2} (2a)^{n+p} / (2(n+p)) B((n-1)/2, (n+p+1)/2)
    """
    sig = sphere_area(n - 2)
    P = sig * a ** (n - 1 + p) * 2 ** (n - 2 + p) \
        * beta_fn((n - 1) / 2, (n - 1 + p) / 2)
    V = sig * (2 * a) ** (n + p) / (2 * (n + p)) \
        * beta_fn((n - 1) / 2, (n + p + 1) / 2)
    return P, V


class TestCenteredSphere:
    def test_classical_unit_sphere(self):
        m = centered_sphere_measures(1.0, 3, D0)
        assert m.perimeter == pytest.approx(4 * math.pi)
        assert m.volume == pytest.approx(4 * math.pi / 3)

    def test_weighted_unit_sphere(self):
        m = centered_sphere_measures(1.0, 3, D1)
        assert m.perimeter == pytest.approx(4 * math.pi)
        assert m.volume == pytest.approx(math.pi)

    def test_scaling_degree(self):
        n, p = 4, 2.0
        d = RadialDensity(p=p)
        m1 = centered_sphere_measures(1.0, n, d)
        m2 = centered_sphere_measures(2.0, n, d)
        assert m2.perimeter == pytest.approx(m1.perimeter * 2 ** (n - 1 + p))
        assert m2.volume == pytest.approx(m1.volume * 2 ** (n + p))


class TestOriginSphere:
    def test_reduces_to_centered_at_zero_power(self):
        for a in (0.3, 1.0, 2.2):
            mo = origin_sphere_measures(a, 3, D0)
            mc = centered_sphere_measures(a, 3, D0)
            assert mo.perimeter == pytest.approx(mc.perimeter, rel=1e-11)
            assert mo.volume == pytest.approx(mc.volume, rel=1e-11)

    @pytest.mark.parametrize("n,p,a", [(3, 1.0, 0.5), (4, 0.5, 1.0),
                                       (7, 5.0, 0.25), (3, 2.0, 2.0)])
    def test_against_beta_closed_form(self, n, p, a):
        m = origin_sphere_measures(a, n, RadialDensity(p=p))
        P, V = origin_sphere_closed_form(a, n, p)
        assert m.perimeter == pytest.approx(P, rel=1e-11)
        assert m.volume == pytest.approx(V, rel=1e-11)

    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.0])
    def test_scaling_degree(self, lam):
        n, p = 3, 1.0
        m1 = origin_sphere_measures(1.0, n, D1)
        m2 = origin_sphere_measures(lam, n, D1)
        assert m2.perimeter == pytest.approx(
            m1.perimeter * lam ** (n - 1 + p), rel=1e-10)
        assert m2.volume == pytest.approx(
            m1.volume * lam ** (n + p), rel=1e-10)

    def test_rejects_bad_scale(self):
        with pytest.raises(OutOfDomainError):
            origin_sphere_measures(0.0, 3, D1)


class TestRevolve:
    def test_closing_curve_matches_quadrature(self):
        cv = integrate(init_shot(3, D1, 2.0))
        got = revolve_measures(cv, 3, D1, n_samples=32768, rows=4096)
        want = origin_sphere_measures(0.5, 3, D1)
        assert got.perimeter == pytest.approx(want.perimeter, rel=1e-8)
        assert got.volume == pytest.approx(want.volume, rel=1e-8)

    def test_polyline_circle_classical(self):
        t = np.linspace(0.0, math.pi, 6001)
        pts = np.column_stack([np.cos(t), np.sin(t)])
        m = revolve_measures(pts, 3, D0)
        assert m.perimeter == pytest.approx(4 * math.pi, rel=1e-6)
        assert m.volume == pytest.approx(4 * math.pi / 3, rel=1e-6)

    def test_torus_closed_forms(self):
        # full loop away from the axis: revolved ring with p = 0
        t = np.linspace(0.0, 2 * math.pi, 8001)
        R0, r0 = 1.5, 1.0
        pts = np.column_stack([np.cos(t) * r0, np.sin(t) * r0 + R0])
        m = revolve_measures(pts, 3, D0, rows=4096)
        assert m.perimeter == pytest.approx(4 * math.pi ** 2 * r0 * R0, rel=1e-6)
        # rays grazing the ring create kinks in the angular integrand, so
        # the volume converges slower than for axis-anchored regions
        assert m.volume == pytest.approx(2 * math.pi ** 2 * r0 ** 2 * R0, rel=1e-4)

    def test_tiny_circle_measures_vanish(self):
        eps = 1e-3
        t = np.linspace(0.0, math.pi, 801)
        pts = np.column_stack([0.5 + eps * np.cos(t), eps * np.sin(t)])
        pts[0, 1] = pts[-1, 1] = 0.0
        m = revolve_measures(pts, 3, D1, rows=512)
        assert 0 < m.perimeter < 1e-4
        assert m.volume < 1e-7

    def test_open_curve_rejected(self):
        pts = np.column_stack([np.linspace(0.2, 0.8, 50),
                               np.full(50, 0.3)])
        with pytest.raises(OutOfDomainError):
            revolve_measures(pts, 3, D1)

    def test_lower_half_plane_rejected(self):
        t = np.linspace(0.0, 2 * math.pi, 100)
        pts = np.column_stack([np.cos(t), np.sin(t)])
        with pytest.raises(OutOfDomainError):
            revolve_measures(pts, 3, D1)


class TestIsoperimetricCompare:
    def test_origin_family_wins(self):
        res = isoperimetric_compare(3, D1, 1.0)
        assert res.ratio < 1.0 - 1e-3
        assert res.P_origin == pytest.approx(4.9911, abs=2e-4)

    def test_ratio_tends_to_one_with_vanishing_power(self):
        res = isoperimetric_compare(3, RadialDensity(p=1e-3), 1.0)
        assert abs(res.ratio - 1.0) < 1e-2

    def test_margin_grows_with_power(self):
        r1 = isoperimetric_compare(3, D1, 1.0).ratio
        r5 = isoperimetric_compare(3, RadialDensity(p=5), 1.0).ratio
        assert r5 < r1 < 1.0

    def test_volume_monotonicity(self):
        vols = (0.5, 1.0, 2.0, 4.0)
        peris = [isoperimetric_compare(3, D1, v).P_origin for v in vols]
        assert all(a < b for a, b in zip(peris, peris[1:]))
