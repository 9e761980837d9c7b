import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from poncelet.errors import InvalidOval, NoExitFound, PointInsideOval
from poncelet.ovals import (
    Conic,
    Point2,
    Superellipse,
    boundary_point,
    chord_exit,
    circle,
    evaluate,
    gradient,
    is_star_shaped,
    tangency_points,
    tangency_points_newton,
)

exponents = st.sampled_from([4 / 3, 1.5, 2.0, 3.0, 4.0, 6.0])
angles = st.floats(0.0, 2 * math.pi, allow_nan=False)


def test_evaluate_and_gradient():
    q = Superellipse(4.0)
    assert evaluate(q, (1.0, 0.0)) == 0.0
    assert evaluate(q, (0.0, 0.0)) == -1.0
    assert gradient(q, (1.0, 1.0)) == Point2(4.0, 4.0)
    assert gradient(q, (-1.0, 0.5)) == pytest.approx((-4.0, 0.5))


@pytest.mark.parametrize("bad", [dict(p=1.0), dict(p=0.5), dict(p=4.0, c=0.0), dict(p=4.0, c=-1.0)])
def test_superellipse_validation(bad):
    with pytest.raises(InvalidOval):
        Superellipse(**bad)


def test_conic_validation():
    with pytest.raises(InvalidOval):
        Conic(1.0, 0.0, -1.0, 0.0, 0.0, -1.0)  # hyperbola
    with pytest.raises(InvalidOval):
        Conic(1.0, 0.0, 1.0, 0.0, 0.0, 1.0)  # empty
    with pytest.raises(InvalidOval):
        Conic.from_axes(0.2, 0.1, 1.0, 0.0)  # origin outside
    neg = Conic(-1.0, 0.0, -2.0, 0.0, 0.0, 1.0)
    assert neg.A == 1.0 and neg.F == -1.0


@given(exponents, angles)
def test_boundary_point_lies_on_curve(p, phi):
    o = Superellipse(p, 2.0)
    q = boundary_point(o, phi)
    assert abs(evaluate(o, q)) < 1e-12


def test_boundary_point_formula():
    q = Superellipse(4.0).boundary_point(math.pi / 4)
    assert q == pytest.approx((2 ** -0.25, 2 ** -0.25))


@given(angles)
def test_conic_boundary_and_radial(phi):
    c = Conic.from_axes(0.6, 0.3, 0.1, -0.05, 0.4)
    assert abs(evaluate(c, c.boundary_point(phi))) < 1e-12
    x, y = c.radial_point(phi)
    assert abs(c.value(x, y)) < 1e-12
    assert math.atan2(y, x) == pytest.approx(math.remainder(phi, 2 * math.pi), abs=1e-12)


def test_tangency_example_quartic():
    q1, q2 = tangency_points(Superellipse(4.0), (0.0, 2 ** 0.75))
    a = 2 ** -0.25
    assert q1 == pytest.approx((-a, a), abs=1e-12)
    assert q2 == pytest.approx((a, a), abs=1e-12)


def test_tangency_circle_exact():
    # from (2, 0) the unit circle is touched at (1/2, +-sqrt(3)/2)
    q1, q2 = tangency_points(circle(1.0), (2.0, 0.0))
    assert q1 == pytest.approx((0.5, math.sqrt(3) / 2), abs=1e-14)
    assert q2 == pytest.approx((0.5, -math.sqrt(3) / 2), abs=1e-14)


def test_tangency_inside_raises():
    with pytest.raises(PointInsideOval):
        tangency_points(Superellipse(4.0), (0.5, 0.5))
    with pytest.raises(PointInsideOval):
        tangency_points(Superellipse(4.0), (1.0, 0.0))


@given(exponents, angles, st.floats(1.05, 6.0))
def test_tangency_matches_newton_oracle(p, th, r):
    oval = Superellipse(p, 1.0)
    x, y = oval.radial_point(th)
    pt = (r * float(x), r * float(y))
    fast = np.array(tangency_points(oval, pt))
    slow = np.array(tangency_points_newton(oval, pt))
    assert np.max(np.abs(fast - slow)) < 1e-7


@given(angles, st.floats(1.1, 4.0))
def test_conic_tangency_matches_newton_oracle(th, r):
    oval = Conic.from_axes(0.7, 0.35, 0.1, 0.05, 1.1)
    x, y = oval.radial_point(th)
    pt = (r * float(x), r * float(y))
    fast = np.array(tangency_points(oval, pt))
    slow = np.array(tangency_points_newton(oval, pt))
    assert np.max(np.abs(fast - slow)) < 1e-7


@given(exponents, angles, st.floats(1.05, 6.0))
def test_tangency_orientation(p, th, r):
    oval = Superellipse(p, 1.0)
    x, y = oval.radial_point(th)
    pt = Point2(r * float(x), r * float(y))
    q1, q2 = tangency_points(oval, pt)
    assert pt.x * (q1.y - pt.y) - pt.y * (q1.x - pt.x) > 0
    assert pt.x * (q2.y - pt.y) - pt.y * (q2.x - pt.x) < 0


def test_chord_exit_circle():
    out = chord_exit(circle(1.0), (1.0, 0.0), (-1.0, 1.0))
    assert out == pytest.approx((0.0, 1.0), abs=1e-12)


def test_chord_exit_conic_and_superellipse_agree_on_circle():
    a = chord_exit(circle(2.0), (2.0, 0.0), (-1.0, 0.3))
    b = chord_exit(Conic(1.0, 0.0, 1.0, 0.0, 0.0, -4.0), (2.0, 0.0), (-1.0, 0.3))
    assert a == pytest.approx(b, abs=1e-12)


def test_chord_exit_outward_ray():
    with pytest.raises(NoExitFound):
        chord_exit(circle(1.0), (1.0, 0.0), (1.0, 0.0))


def test_star_shaped():
    assert is_star_shaped(Superellipse(4.0))
    assert is_star_shaped(Conic.from_axes(0.6, 0.2, 0.35, 0.0, 0.3))


def test_star_shaped_rejects_origin_outside():
    class Shifted(Superellipse):
        def value(self, x, y):
            return super().value(x - 3.0, y)

    assert not is_star_shaped(Shifted(2.0, 1.0))
