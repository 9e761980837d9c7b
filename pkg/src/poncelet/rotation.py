"""Rotation numbers of Poncelet maps.

The estimator combines two rigorous facts about an orientation preserving
circle homeomorphism with lift ``F``:

* for any point ``x`` and any ``n``, ``m = floor((F^n(x) - x) / 2 pi)``
  gives ``m / n <= rho <= (m + 1) / n``; intersecting these brackets along
  one orbit converges like the continued-fraction convergents of ``rho``;
* ``rho = j / n`` exactly iff ``F^n(x) - x - 2 pi j`` changes sign (or
  vanishes) on the circle, and otherwise its sign says on which side of
  ``j / n`` the rotation number lies.

The second test turns a bracket into an exact rational whenever a small
denominator candidate is confirmed, which is what makes plateau detection
cheap and sharp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .core import PonceletPair, lift_power
from .errors import KernelError, TangencySolveFailed
from .ovals import Point2, Superellipse

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RotationEstimate:
    """Rotation number in ``(0, 1/2)`` with a bound on its error.

    ``rational_id`` is ``(j, n)`` when a rational within ``error_bound`` of
    ``value`` was identified; ``certified`` means ``value == j / n`` was
    proven by the sign test (``error_bound == 0``).
    """

    value: float
    error_bound: float
    iterations: int
    rational_id: tuple[int, int] | None = None
    converged: bool = True
    certified: bool = False
    lower: float = 0.0
    upper: float = 0.5

    def as_dict(self) -> dict:
        j, n = self.rational_id if self.rational_id else (None, None)
        return {"rho": self.value, "err": self.error_bound, "j": j, "n": n,
                "iterations": self.iterations, "converged": self.converged,
                "certified": self.certified}


# --- simplest rationals (Stern-Brocot descent written as continued fractions) ---


def _simplest_closed(lo: Fraction, hi: Fraction) -> Fraction:
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    return fl + 1 / _simplest_closed(1 / (hi - fl), 1 / (lo - fl))


def _simplest_open(lo: Fraction, hi: Fraction | None) -> Fraction:
    """Simplest rational in ``(lo, hi)``; ``hi is None`` means infinity."""
    fl = math.floor(lo)
    if hi is None or fl + 1 < hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl (hi may equal fl + 1)
    inner_hi = None if lo == fl else 1 / (lo - fl)
    return fl + 1 / _simplest_open(1 / (hi - fl), inner_hi)


def simplest_rational(lo, hi, closed: bool = True) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    if closed:
        return _simplest_closed(lo, hi)
    if lo == hi:
        raise ValueError("empty open interval")
    return _simplest_open(lo, hi)


def rational_identify(value: float, error_bound: float, max_denominator: int) -> tuple[int, int] | None:
    """Smallest-denominator ``j/n`` with ``|value - j/n| <= error_bound``.

    Returns ``None`` when that denominator exceeds ``max_denominator``.
    """
    if not 0.0 < value < 1.0:
        raise ValueError(f"value must lie in (0, 1), got {value}")
    lo = Fraction(value) - Fraction(error_bound)
    hi = Fraction(value) + Fraction(error_bound)
    q = _simplest_closed(max(lo, Fraction(0)), hi)
    if q.denominator > max_denominator or q <= 0:
        return None
    return q.numerator, q.denominator


# --- exact rational test ---


def _radial_seed(pair: PonceletPair, theta: float) -> Point2:
    x, y = pair.outer.radial_point(theta)
    return Point2(float(x), float(y))


def _lift_excess(pair: PonceletPair, j: int, n: int, theta: float) -> float:
    _, total = lift_power(pair, _radial_seed(pair, theta), n)
    return total - TWO_PI * j


def rational_side(pair: PonceletPair, j: int, n: int, samples: int | None = None,
                  zero_tol: float = 1e-11) -> int:
    """Compare ``rho(P)`` with ``j / n``: returns -1, 0 or +1.

    Samples ``F^n(theta) - theta - 2 pi j`` on a uniform grid and polishes
    the extremum on the sign-deciding side with a bounded scalar search.
    """
    if samples is None:
        samples = max(128, 48 * n)
    th = np.linspace(0.0, TWO_PI, samples, endpoint=False)
    g = np.array([_lift_excess(pair, j, n, t) for t in th])
    tol = zero_tol * max(1, n)
    if g.min() <= tol and g.max() >= -tol:
        return 0
    sign = 1 if g.min() > 0.0 else -1
    # polish the extremum closest to zero, and a few runners-up
    order = np.argsort(sign * g)[:3]
    h = th[1] - th[0]
    for i in order:
        res = minimize_scalar(lambda t: sign * _lift_excess(pair, j, n, t),
                              bounds=(th[i] - h, th[i] + h), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun <= tol:
            return 0
    return sign


# --- estimator ---


def _bracket_run(pair: PonceletPair, p0, n: int, return_tol: float, max_return: int):
    if isinstance(pair.outer, Superellipse):
        try:
            return kernels.rotation_bracket(*pair.inner.kernel_params(), pair.outer.p, pair.k,
                                            float(p0[0]), float(p0[1]), int(n),
                                            return_tol, int(max_return))
        except KernelError as exc:
            raise TangencySolveFailed(str(exc)) from exc
    from .core import iterate

    rec = iterate(pair, p0, n)
    lifts = rec.lifted_angles - rec.lifted_angles[0]
    lo, hi = Fraction(0), Fraction(1)
    first_return = 0
    for j in range(1, n + 1):
        m = math.floor(lifts[j] / TWO_PI)
        lo = max(lo, Fraction(m, j))
        hi = min(hi, Fraction(m + 1, j))
        if j <= max_return and math.hypot(*(rec.points[j] - rec.points[0])) <= return_tol:
            first_return = j
            break
    return lo.numerator, lo.denominator, hi.numerator, hi.denominator, float(lifts[j]), first_return


def rotation_number(pair: PonceletPair, p0=None, max_iters: int = 1 << 20, tol: float = 1e-10,
                    max_denominator: int = 64, certify: bool = True,
                    return_tol: float = 1e-11, start_iters: int = 1024) -> RotationEstimate:
    """Estimate ``rho(P)`` from the orbit of ``p0`` on the outer oval.

    The bracket from the orbit is tightened by exact sign tests on the
    simplest rationals it contains (denominator at most
    ``max_denominator``).  Stops when the half-width is at most ``tol`` or
    ``max_iters`` steps have been spent; ``converged`` reports which.
    """
    if p0 is None:
        p0 = pair.seed(0.3)
    lo, hi = Fraction(0), Fraction(1, 2)
    tested: dict[Fraction, int] = {}
    iterations = 0
    n = min(start_iters, max_iters)
    while True:
        lo_n, lo_d, hi_n, hi_d, total, ret = _bracket_run(pair, p0, n, return_tol, max_denominator)
        iterations += ret or n
        if ret:
            q = Fraction(round(total / TWO_PI), ret)
            return RotationEstimate(float(q), 0.0, iterations, (q.numerator, q.denominator),
                                    True, True, float(q), float(q))
        run_lo, run_hi = Fraction(lo_n, lo_d), Fraction(hi_n, hi_d)
        if run_lo > run_hi:
            # rounding at an exact rational: the two bounds cross by ~1e-16
            run_lo, run_hi = run_hi, run_lo
        lo, hi = max(lo, run_lo), min(hi, run_hi)
        if lo > hi:
            lo, hi = hi, lo
        if certify:
            for _ in range(8):
                cands = []
                if lo < hi:
                    cands.append(_simplest_open(lo, hi))
                cands += [e for e in (lo, hi) if e not in tested]
                cands = [c for c in cands if 0 < c and c.denominator <= max_denominator
                         and c not in tested]
                if not cands:
                    break
                c = min(cands, key=lambda f: (f.denominator, f))
                side = rational_side(pair, c.numerator, c.denominator)
                tested[c] = side
                if side == 0:
                    return RotationEstimate(float(c), 0.0, iterations,
                                            (c.numerator, c.denominator), True, True,
                                            float(c), float(c))
                if side < 0:
                    hi = min(hi, c)
                else:
                    lo = max(lo, c)
        half = (hi - lo) / 2
        if half <= Fraction(tol) or n >= max_iters:
            value = float((lo + hi) / 2)
            err = float(half)
            rid = None
            if 0.0 < value < 1.0:
                rid = rational_identify(value, err, max_denominator)
            return RotationEstimate(value, err, iterations, rid, half <= Fraction(tol), False,
                                    float(lo), float(hi))
        n = min(2 * n, max_iters)


def rotation_number_inverse(pair: PonceletPair, p0=None, n: int = 1 << 14) -> RotationEstimate:
    """Rotation number of P read off the clockwise lift of ``P^-1``.

    Plain Birkhoff average; ``|F^n(x) - x - 2 pi n rho| < 2 pi`` gives the
    error bound ``1/n``.
    """
    if p0 is None:
        p0 = pair.seed(0.3)
    _, total = lift_power(pair, p0, n, forward=False)
    return RotationEstimate(-total / (TWO_PI * n), 1.0 / n, n, None, True)


def rho_concentric_reference(k: float) -> float:
    """Rotation number for the unit circle inside the circle ``x^2 + y^2 = k``.

    The tangent from radius ``sqrt(k)`` to the unit circle subtends
    ``arccos(1 / sqrt(k))`` at the centre, so each step advances by
    ``2 arctan(sqrt(k - 1))``.
    """
    if not k > 1.0:
        raise ValueError("k must exceed 1")
    return math.atan(math.sqrt(k - 1.0)) / math.pi


def rho_concentric_printed(k: float) -> float:
    """``arctan(k - 1) / pi``; agrees with the reference only at ``k = 2``."""
    return math.atan(k - 1.0) / math.pi
