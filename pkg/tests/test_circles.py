import math

import numpy as np
import pytest

from isodense.circles import (
    OsculatingCircle,
    admissible_left,
    admissible_right,
    curvature_comparison_check,
    h1_compare,
    h1_tilde_second_at_top,
    sample_left_admissible,
    sample_right_admissible,
    tilde_quantities,
    x_star,
)
from isodense.errors import InvalidConfigurationError, OutOfDomainError
from isodense.geometry import RadialDensity

D1 = RadialDensity(p=1)


def circle_point_config(a1, R1, t1, theta2, x2):
    """Point/vector pair with p1 on the circle centered (a1,0), ccw tangent."""
    p1 = (a1 + R1 * math.cos(t1), R1 * math.sin(t1))
    v1 = (-math.sin(t1), math.cos(t1))
    v2 = (math.cos(theta2), math.sin(theta2))
    p2 = (x2, p1[1])
    return p1, p2, v1, v2


class TestTildeQuantities:
    def test_axis_centered_circle_is_its_own_tangent_circle(self):
        A = OsculatingCircle(a=0.8, b=0.0, r=0.3)
        for t in (0.1, 0.3, 0.7):
            smp = tilde_quantities(A, t, D1)
            assert smp.dF == pytest.approx(0.0, abs=1e-14)
            assert smp.dR == pytest.approx(0.0, abs=1e-14)

    def test_quarter_parameter_closed_form(self):
        A = OsculatingCircle(a=1.0, b=0.5, r=0.25)
        smp = tilde_quantities(A, (math.pi / 2) * 0.25, D1)
        assert smp.dF == pytest.approx(0.5 / 0.25)   # b / r
        assert smp.dR == pytest.approx(0.0, abs=1e-12)

    def test_leftward_line(self):
        L = OsculatingCircle(line_point=(0.5, 0.7), line_direction=(-1.0, 0.0))
        smp = tilde_quantities(L, 0.05, D1)
        assert smp.dF == pytest.approx(-1.0)
        assert smp.dG == pytest.approx(-1.0)

    def test_difference_field_is_exact(self):
        A = OsculatingCircle(a=0.9, b=0.25, r=0.4)
        for t in np.linspace(0.05, 0.9, 7):
            smp = tilde_quantities(A, t, D1)
            assert smp.G == smp.F - smp.R

    @pytest.mark.parametrize("A", [
        OsculatingCircle(a=0.9, b=0.2, r=0.35),
        OsculatingCircle(a=0.6, b=0.9, r=0.25, orientation="cw"),
        OsculatingCircle(line_point=(0.8, 0.6),
                         line_direction=(-0.8, -0.6)),
    ], ids=["ccw", "cw", "line"])
    def test_derivatives_converge_at_second_order(self, A):
        t0 = 0.25
        smp = tilde_quantities(A, t0, D1)

        def fd_errors(h):
            hi = tilde_quantities(A, t0 + h, D1)
            lo = tilde_quantities(A, t0 - h, D1)
            return np.array([
                (hi.F - lo.F) / (2 * h) - smp.dF,
                (hi.R - lo.R) / (2 * h) - smp.dR,
                (hi.G - lo.G) / (2 * h) - smp.dG,
                (hi.H1 - lo.H1) / (2 * h) - smp.dH1,
            ])

        e1 = np.abs(fd_errors(1e-3))
        e2 = np.abs(fd_errors(5e-4))
        for a, b in zip(e1, e2):
            if a < 1e-13:      # derivative exactly linear in t
                assert b < 1e-12
            else:
                assert 3.5 <= a / b <= 4.5

    def test_flat_descent_direction_fields(self):
        # clockwise branch with positive center height: both the center
        # abscissa and the leftmost point move left
        A = OsculatingCircle(a=0.5, b=0.8, r=0.3, orientation="cw")
        for t in np.linspace(0.05, 0.7, 9):
            smp = tilde_quantities(A, t, D1)
            assert smp.dF <= 1e-12
            assert smp.dG <= 1e-12
        # counterclockwise branch with nonpositive center height likewise
        B = OsculatingCircle(a=0.7, b=-0.2, r=0.6)
        for t in np.linspace(0.4, 1.2, 9):
            smp = tilde_quantities(B, t, D1)
            assert smp.dF <= 1e-12
            assert smp.dG <= 1e-12

    def test_vertical_line_rejected(self):
        L = OsculatingCircle(line_point=(0.4, 0.5), line_direction=(0.0, 1.0))
        with pytest.raises(OutOfDomainError):
            tilde_quantities(L, 0.1, D1)


class TestH1TildeSecond:
    def test_circle_through_origin_boundary(self):
        assert h1_tilde_second_at_top(0.5, 0.5, D1) == 0.0

    def test_center_right_of_half_is_negative(self):
        assert h1_tilde_second_at_top(0.7, 0.3, D1) < 0

    def test_closed_form_value_and_fd(self):
        a, r, p = 0.4, 0.6, 1.0
        expected = p / (a + r) ** 4 * (a / r ** 2) * (r ** 2 - a ** 2)
        got = h1_tilde_second_at_top(a, r, RadialDensity(p=p))
        assert got == pytest.approx(expected)
        assert got > 0
        # independent check: second difference of the density term along
        # the circle, measured around the rightmost point
        A = OsculatingCircle(a=a, b=0.0, r=r)
        h = 1e-4
        h1_top = p / (a + r)   # q=(a+r,0), nu=(1,0): p*(a+r)/(a+r)^2
        h1_h = tilde_quantities(A, h, RadialDensity(p=p)).H1
        fd = 2.0 * (h1_h - h1_top) / h ** 2
        assert fd == pytest.approx(got, rel=1e-4)

    def test_sign_matches_radius_center_difference(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            a = rng.uniform(0.05, 2.0)
            r = rng.uniform(0.05, 2.0)
            if abs(r - a) < 1e-9:
                continue
            val = h1_tilde_second_at_top(a, r, D1)
            assert np.sign(val) == np.sign(r - a)

    def test_rejects_bad_radius(self):
        with pytest.raises(OutOfDomainError):
            h1_tilde_second_at_top(0.5, -0.1, D1)


class TestXStar:
    def test_top_of_centered_circle(self):
        assert x_star((0, 1), (-1, 0)) == pytest.approx(0.0)

    def test_diagonal(self):
        assert x_star((0.3, 1.0), (-math.sqrt(2) / 2, -math.sqrt(2) / 2)) \
            == pytest.approx(-1.0)

    def test_formula(self):
        assert x_star((9.0, 0.5), (-0.8, -0.6)) == pytest.approx(-0.375)

    def test_orthogonality_property(self):
        y, v2 = 0.77, (-0.6, -0.8)
        xs = x_star((0.0, y), v2)
        assert xs * v2[0] + y * v2[1] == pytest.approx(0.0, abs=1e-14)

    def test_vertical_rejected(self):
        with pytest.raises(OutOfDomainError):
            x_star((0.3, 1.0), (0.0, -1.0))


class TestAdmissibleRight:
    def base(self):
        return circle_point_config(0.6, 0.3, math.pi / 3, math.radians(240), 0.5)

    def test_reference_configuration_is_admissible(self):
        res = admissible_right(*self.base())
        assert res.admissible and not res.failed

    def test_reflection_reach_violation(self):
        p1, p2, v1, v2 = self.base()
        res = admissible_right(p1, (0.40, p2[1]), v1, v2)
        assert not res.admissible
        assert res.failed == ["reflection_reach"]

    def test_center_radius_boundary(self):
        p1, p2, v1, v2 = circle_point_config(0.3, 0.3, math.pi / 3,
                                             math.radians(240), 0.25)
        res = admissible_right(p1, p2, v1, v2)
        assert not res.admissible
        assert "center_right_of_radius" in res.failed

    def test_wrong_quadrant_rejected(self):
        p1, p2, v1, _ = self.base()
        with pytest.raises(InvalidConfigurationError):
            admissible_right(p1, p2, v1, (0.5, -0.866))

    def test_mismatched_heights_rejected(self):
        p1, p2, v1, v2 = self.base()
        with pytest.raises(InvalidConfigurationError):
            admissible_right(p1, (p2[0], p2[1] + 0.1), v1, v2)

    def test_comparison_direction(self):
        p1, p2, v1, v2 = self.base()
        a, b, cmp = h1_compare(p1, p2, v1, v2, D1)
        assert a == pytest.approx(0.6 / 0.63, abs=1e-12)
        assert b == pytest.approx(-0.3031088913245535 / 0.3175, abs=1e-9)
        assert cmp == 1


class TestAdmissibleLeft:
    def base(self):
        return circle_point_config(0.3, 0.6, math.pi / 3, math.radians(200), -0.1)

    def test_reference_configuration_is_admissible(self):
        res = admissible_left(*self.base())
        assert res.admissible, res.failed

    def test_radius_order_violation(self):
        # steeper second direction inflates the second tangent circle,
        # which also breaks the angle ordering
        p1, p2, v1, _ = self.base()
        res = admissible_left(p1, p2, v1, (math.cos(math.radians(260)),
                                           math.sin(math.radians(260))))
        assert not res.admissible
        assert "radius_order" in res.failed

    def test_window_violation(self):
        p1, p2, v1, v2 = self.base()
        res = admissible_left(p1, (-0.5, p2[1]), v1, v2)
        assert not res.admissible
        assert "x2_window" in res.failed

    def test_comparison_direction(self):
        p1, p2, v1, v2 = self.base()
        a, b, cmp = h1_compare(p1, p2, v1, v2, D1)
        assert b > a
        assert cmp == -1


class TestRandomizedComparisons:
    def test_right_admissible_implies_strict_order(self):
        rng = np.random.default_rng(11)
        accepted = tried = 0
        while accepted < 2000:
            tried += 1
            cfg = sample_right_admissible(rng)
            if cfg is None:
                continue
            accepted += 1
            a, b, _ = h1_compare(*cfg, D1)
            assert a - b > 1e-12 * max(1.0, abs(a))
        assert tried < 10 * 2000

    def test_left_admissible_implies_strict_order(self):
        rng = np.random.default_rng(12)
        accepted = tried = 0
        while accepted < 2000:
            tried += 1
            cfg = sample_left_admissible(rng)
            if cfg is None:
                continue
            accepted += 1
            a, b, _ = h1_compare(*cfg, D1)
            assert b - a > 1e-12 * max(1.0, abs(b))
        assert tried < 10 * 2000


class TestCurvatureComparison:
    @staticmethod
    def arc_samples(xs, radius, x_center, y_shift):
        """Lower circular arc as a graph: value, slope, upward curvature."""
        dx = xs - x_center
        root = np.sqrt(radius ** 2 - dx ** 2)
        val = y_shift - root
        slope = dx / root
        hpp = radius ** 2 / root ** 3
        curv = hpp / (1 + slope ** 2) ** 1.5   # constant 1/radius on an arc
        return np.column_stack([xs, val, slope, curv])

    def test_identical_inputs_conclude_with_equality(self):
        xs = np.linspace(0.0, 0.5, 101)
        f = self.arc_samples(xs, 1.0, 0.0, 1.1)
        rep = curvature_comparison_check(f, f)
        assert rep.hypotheses_met and rep.values_ordered and rep.angles_ordered
        assert rep.first_violation is None

    def test_two_arcs_aligned_at_right_end(self):
        # flatter arc (radius 2) below the tighter one (radius 1), equal
        # value and slope at the right endpoint; slopes stay positive so
        # the angle convention has no wrap at (1, 0)
        xs = np.linspace(0.05, 0.5, 401)
        g = self.arc_samples(xs, 1.0, 0.0, 1.1)
        f = self.arc_samples(xs, 2.0, -0.5, 0.1 + math.sqrt(3.75))
        # alignment: equal slope needs x - x_c = 2 * 0.5 at x = 0.5
        assert f[-1, 2] == pytest.approx(g[-1, 2])
        f[:, 1] += g[-1, 1] - f[-1, 1]
        rep = curvature_comparison_check(f, g)
        assert rep.hypotheses_met
        assert rep.values_ordered and rep.angles_ordered
        assert rep.phi_gap is not None and rep.phi_gap > 0

    def test_curvature_hypothesis_violation_detected(self):
        xs = np.linspace(0.0, 0.5, 101)
        f = self.arc_samples(xs, 1.0, 0.0, 1.1)
        g = self.arc_samples(xs, 2.0, -0.5, 1.2)
        rep = curvature_comparison_check(f, g)   # f curves tighter: hyp fails
        assert not rep.hypotheses_met
        assert "curvature_order" in rep.hypothesis_failures
