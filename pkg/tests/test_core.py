import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_ellipse
from poncelet import _kernel_py, kernels
from poncelet.core import (
    ConicClosedForm,
    PonceletPair,
    circle_family_pair,
    conic_closed_form_jacobian,
    conic_closed_form_step,
    iterate,
    jacobian,
    lift_power,
    planar_step,
    poncelet_inverse,
    poncelet_step,
)
from poncelet.errors import DomainViolation, InvalidPair
from poncelet.ovals import Conic, Point2, Superellipse, circle

angles = st.floats(0.0, 2 * math.pi, allow_nan=False)


def test_circles_square_orbit(circles):
    assert poncelet_step(circles(2.0), (1.0, 1.0)) == pytest.approx((-1.0, 1.0), abs=1e-12)


def test_circles_k4_step(circles):
    # chord from (2, 0) tangent to the unit circle ends at angle 2 pi / 3
    out = poncelet_step(circles(4.0), (2.0, 0.0))
    assert out == pytest.approx((-1.0, math.sqrt(3)), abs=1e-12)


def test_quartic_four_cycle(quartic_pair):
    pair = quartic_pair(2.0)
    p = Point2(1.0, 1.0)
    seen = [p]
    for _ in range(4):
        p = poncelet_step(pair, p)
        seen.append(p)
    expected = [(1, 1), (-1, 1), (-1, -1), (1, -1), (1, 1)]
    assert np.allclose(seen, expected, atol=1e-12)


def test_c1_pair_orbits():
    pair = PonceletPair(Superellipse(4.0), Superellipse(4 / 3, 2.0))
    a = 2 ** 0.75
    assert poncelet_step(pair, (1.0, 1.0)) == pytest.approx((-1.0, 1.0), abs=1e-12)
    assert poncelet_step(pair, (0.0, a)) == pytest.approx((-a, 0.0), abs=1e-12)


def test_invalid_pairs():
    with pytest.raises(InvalidPair):
        PonceletPair(Superellipse(4.0, 1.0), Superellipse(4.0, 0.9))
    with pytest.raises(InvalidPair):
        PonceletPair(circle(1.0), Superellipse(4.0, 1.0))  # touches at the axes


def test_step_needs_point_on_outer(quartic_pair):
    with pytest.raises(DomainViolation):
        poncelet_step(quartic_pair(2.0), (1.0, 0.9))
    with pytest.raises(DomainViolation):
        planar_step(quartic_pair(2.0), (0.1, 0.1))


@given(st.sampled_from([1.5, 2.0, 5.0, 20.2]), angles)
def test_inverse_undoes_step(k, th):
    pair = PonceletPair(Superellipse(4.0), Superellipse(4.0, k))
    p = pair.seed(th)
    back = poncelet_inverse(pair, poncelet_step(pair, p))
    assert back == pytest.approx(p, abs=1e-10)


@given(st.sampled_from([1.5, 2.0, 5.0, 20.2]), angles)
def test_step_stays_on_outer(k, th):
    pair = PonceletPair(Superellipse(4.0), Superellipse(4.0, k))
    q = poncelet_step(pair, pair.seed(th))
    assert abs(pair.outer.value(q.x, q.y)) <= 1e-12 * k


@given(angles)
def test_chord_is_tangent_to_inner(th):
    # the chord p -> P(p) touches the inner oval: min of g along it is ~0
    pair = PonceletPair(Superellipse(4.0), Superellipse(4.0, 5.0))
    p = pair.seed(th)
    q = poncelet_step(pair, p)
    t = np.linspace(0.0, 1.0, 20001)
    xs, ys = p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)
    g = pair.inner.value(xs, ys)
    assert g.min() > -1e-6 and g.min() < 1e-6


def test_iterate_lift(quartic_pair):
    rec = iterate(quartic_pair(2.0), (1.0, 1.0), 8)
    assert rec.points.shape == (9, 2)
    assert rec.advance == pytest.approx(4 * math.pi, abs=1e-12)
    assert np.all(np.diff(rec.lifted_angles) > 0)


def test_iterate_inverse_lift(quartic_pair):
    rec = iterate(quartic_pair(2.0), (1.0, 1.0), 4, forward=False)
    assert rec.advance == pytest.approx(-2 * math.pi, abs=1e-12)
    assert rec.points[1] == pytest.approx((1.0, -1.0), abs=1e-12)


def test_lift_power_matches_iterate(quartic_pair):
    pair = quartic_pair(7.3)
    p = pair.seed(0.4)
    end, total = lift_power(pair, p, 50)
    rec = iterate(pair, p, 50)
    assert end == pytest.approx(rec.last, abs=1e-13)
    assert total == pytest.approx(rec.advance, abs=1e-12)


def test_conic_outer_uses_generic_path():
    pair = PonceletPair(circle(1.0), Conic(1.0, 0.0, 1.0, 0.0, 0.0, -4.0))
    out = poncelet_step(pair, (2.0, 0.0))
    assert out == pytest.approx((-1.0, math.sqrt(3)), abs=1e-10)


# --- explicit formula for an ellipse inside circles, against the geometry ---


def test_closed_form_matches_geometry():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        ell = random_ellipse(rng)
        cf = ConicClosedForm(ell)
        pair = circle_family_pair(ell)
        for th in rng.uniform(0, 2 * math.pi, 16):
            p = pair.seed(th)
            worst = max(worst, np.max(np.abs(np.subtract(conic_closed_form_step(cf, p),
                                                         poncelet_step(pair, p)))))
    assert worst < 1e-9


def test_closed_form_off_unit_circle():
    ell = Conic.from_axes(0.5, 0.3, 0.1, 0.0, 0.2)
    cf = ConicClosedForm(ell)
    pair = circle_family_pair(ell, 4.0)
    p = pair.seed(1.0)
    assert conic_closed_form_step(cf, p) == pytest.approx(poncelet_step(pair, p), abs=1e-10)


def test_closed_form_domain():
    cf = ConicClosedForm(Conic.from_axes(0.5, 0.3))
    with pytest.raises(DomainViolation):
        conic_closed_form_step(cf, (0.1, 0.0))


def test_closed_form_jacobian_matches_fd():
    ell = Conic.from_axes(0.5, 0.3, 0.1, -0.05, 0.7)
    cf = ConicClosedForm(ell)
    pair = circle_family_pair(ell)
    for th in np.linspace(0, 2 * math.pi, 7, endpoint=False):
        p = pair.seed(th)
        assert np.allclose(conic_closed_form_jacobian(cf, p), jacobian(pair, p), atol=1e-6)


def test_jacobian_rotation_for_circles(circles):
    # concentric circles: P is a radius-dependent rotation, so det DP = 1
    pair = circles(2.0)
    for th in (0.0, 1.0, 2.5):
        assert np.linalg.det(jacobian(pair, pair.seed(th))) == pytest.approx(1.0, abs=1e-8)


def test_det_positive_quartic(quartic_pair):
    pair = quartic_pair(5.0)
    for th in np.linspace(0, 2 * math.pi, 24, endpoint=False):
        assert np.linalg.det(jacobian(pair, pair.seed(th))) > 0


# --- the two kernel backends ---


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled kernel not built")
@pytest.mark.parametrize("inner,q,k", [
    (Superellipse(4.0), 4.0, 20.2),
    (circle(1.0), 4.0, 2.0),
    (Conic.from_axes(0.55, 0.3, 0.1, -0.05, 0.6), 2.0, 1.0),
])
def test_backends_agree(inner, q, k):
    from poncelet import _kernel

    args = (*inner.kernel_params(), q, k)
    x, y = Superellipse(q, k).radial_point(0.3)
    a = _kernel.lift_map(*args, float(x), float(y), 500, True)
    b = _kernel_py.lift_map(*args, float(x), float(y), 500, True)
    assert np.allclose(a, b, rtol=0, atol=1e-12)
    ra = _kernel.rotation_bracket(*args, float(x), float(y), 300, 1e-11, 64)
    rb = _kernel_py.rotation_bracket(*args, float(x), float(y), 300, 1e-11, 64)
    assert ra[:4] == rb[:4] and ra[5] == rb[5]


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = dict(os.environ, PONCELET_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import poncelet; print(poncelet.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
