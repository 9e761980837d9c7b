import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from poncelet.core import PonceletPair
from poncelet.ovals import Superellipse, circle
from poncelet.rotation import (
    rational_identify,
    rational_side,
    rho_concentric_printed,
    rho_concentric_reference,
    rotation_number,
    rotation_number_inverse,
    simplest_rational,
)


def brute_simplest(lo: Fraction, hi: Fraction, closed=True) -> Fraction:
    """Smallest denominator first, then smallest numerator: the naive oracle."""
    q = 1
    while True:
        p = math.ceil(lo * q)
        for num in range(p, math.floor(hi * q) + 1):
            f = Fraction(num, q)
            if closed or lo < f < hi:
                return f
        q += 1


fractions = st.fractions(min_value=0, max_value=2, max_denominator=60)


@given(fractions, fractions)
def test_simplest_rational_closed(a, b):
    lo, hi = min(a, b), max(a, b)
    assert simplest_rational(lo, hi) == brute_simplest(lo, hi)


@given(fractions, fractions)
def test_simplest_rational_open(a, b):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        with pytest.raises(ValueError):
            simplest_rational(lo, hi, closed=False)
        return
    assert simplest_rational(lo, hi, closed=False) == brute_simplest(lo, hi, closed=False)


@pytest.mark.parametrize("value,err,cap,expected", [
    (0.2500000001, 1e-8, 100, (1, 4)),
    (0.1666667, 1e-5, 100, (1, 6)),
    (0.3183098, 1e-9, 1000, None),
    (1 / 3, 1e-16, 64, (1, 3)),
    (1 / 3, 0.0, 64, None),  # the double nearest 1/3 is not 1/3
])
def test_rational_identify(value, err, cap, expected):
    assert rational_identify(value, err, cap) == expected


def test_rational_identify_domain():
    with pytest.raises(ValueError):
        rational_identify(1.2, 1e-3, 10)


def circles(k):
    return PonceletPair(circle(1.0), Superellipse(2.0, k))


def brute_concentric(k, n=4000):
    # the oracle: iterate the geometric map directly and average the lift
    from poncelet.core import lift_power

    pair = circles(k)
    _, total = lift_power(pair, pair.seed(0.0), n)
    return total / (2 * math.pi * n)


@pytest.mark.parametrize("k", [1.5, 4.0, 9.0])
def test_concentric_reference_matches_iteration(k):
    assert brute_concentric(k) == pytest.approx(rho_concentric_reference(k), abs=1e-9)


def test_printed_formula_disagrees():
    assert rho_concentric_printed(2.0) == pytest.approx(0.25)
    assert abs(rho_concentric_printed(4.0) - brute_concentric(4.0)) > 0.06


def test_concentric_reference_shape():
    ks = [1.0001, 1.5, 2.0, 4.0, 9.0, 1e6]
    vals = [rho_concentric_reference(k) for k in ks]
    assert all(0 < v < 0.5 for v in vals)
    assert vals == sorted(vals)
    assert vals[0] < 0.01
    with pytest.raises(ValueError):
        rho_concentric_reference(1.0)


@pytest.mark.parametrize("pair,expected", [
    (circles(2.0), (1, 4)),
    (circles(4.0), (1, 3)),
    (PonceletPair(Superellipse(4.0), Superellipse(4.0, 2.0)), (1, 4)),
    (PonceletPair(Superellipse(4.0), Superellipse(4.0, 20.0)), (1, 3)),
])
def test_certified_rationals(pair, expected):
    est = rotation_number(pair)
    assert est.certified and est.error_bound == 0.0
    assert est.rational_id == expected
    assert est.value == pytest.approx(expected[0] / expected[1], abs=1e-15)


def test_irrational_concentric_converges():
    est = rotation_number(circles(3.0), tol=1e-10)
    assert est.converged and not est.certified
    assert est.error_bound <= 1e-10
    assert abs(est.value - rho_concentric_reference(3.0)) <= est.error_bound + 1e-12
    assert est.lower <= rho_concentric_reference(3.0) <= est.upper


def test_budget_exhaustion_is_honest():
    est = rotation_number(circles(3.0), max_iters=256, tol=1e-14)
    assert not est.converged
    assert abs(est.value - rho_concentric_reference(3.0)) <= est.error_bound


def test_near_one_is_small():
    est = rotation_number(circles(1.01), tol=1e-8)
    assert 0 < est.value < 0.05


def test_seed_independence(quartic_pair):
    pair = quartic_pair(11.0)
    a = rotation_number(pair, pair.seed(0.1), tol=1e-9)
    b = rotation_number(pair, pair.seed(2.0), tol=1e-9)
    assert abs(a.value - b.value) <= a.error_bound + b.error_bound


def test_inverse_estimate_agrees(quartic_pair):
    pair = quartic_pair(11.0)
    fwd = rotation_number(pair, tol=1e-9)
    inv = rotation_number_inverse(pair, n=4096)
    assert abs(fwd.value - inv.value) <= fwd.error_bound + inv.error_bound


def test_rational_side(quartic_pair):
    assert rational_side(quartic_pair(5.0), 1, 4) == 0
    assert rational_side(quartic_pair(1.5), 1, 4) == -1
    assert rational_side(quartic_pair(12.0), 1, 4) == +1
