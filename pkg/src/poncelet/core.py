"""The Poncelet map of a pair of nested ovals and its planar extension."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    DomainViolation,
    InvalidPair,
    KernelError,
    NegativeDiscriminant,
    PonceletError,
    TangencySolveFailed,
    ZeroDenominator,
)
from .ovals import (
    Conic,
    ImplicitOval,
    Point2,
    Superellipse,
    chord_exit,
    evaluate,
    is_star_shaped,
    tangency_points,
)

ON_CURVE_TOL = 1e-8


@dataclass(frozen=True)
class PonceletPair:
    """Inner oval ``inner`` strictly surrounded by ``outer``.

    ``d0`` is the largest distance from the origin to a point of ``inner``;
    the planar extension of the map is defined outside that radius.
    """

    inner: ImplicitOval
    outer: ImplicitOval
    d0: float = field(default=None)
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.validate:
            for name, oval in (("inner", self.inner), ("outer", self.outer)):
                if not is_star_shaped(oval):
                    raise InvalidPair(f"{name} oval is not star-shaped about the origin")
            th = np.linspace(0.0, 2.0 * math.pi, 256, endpoint=False)
            for t in th:
                q = self.inner.boundary_point(t)
                if not self.outer.value(q.x, q.y) < 0.0:
                    raise InvalidPair("inner oval is not strictly inside the outer one")
        if self.d0 is None:
            object.__setattr__(self, "d0", self.inner.max_radius(2048))

    @property
    def k(self) -> float:
        """Level of the outer oval within its family."""
        return self.outer.level

    def at_level(self, k: float) -> "PonceletPair":
        return PonceletPair(self.inner, self.outer.with_level(k), self.d0)

    def inner_level_max(self, samples: int = 2048) -> float:
        """Largest family value ``V`` attained on the inner oval."""
        th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        x, y = self.inner.radial_point(th)
        return float(np.max(self.outer.family_value(x, y)))

    def seed(self, theta: float = 0.0) -> Point2:
        """Point of the outer oval at polar angle ``theta``."""
        x, y = self.outer.radial_point(theta)
        return Point2(float(x), float(y))


@dataclass(frozen=True)
class OrbitRecord:
    """Orbit points on the outer oval with a continuous angular lift."""

    points: np.ndarray
    lifted_angles: np.ndarray

    def __len__(self):
        return len(self.lifted_angles)

    @property
    def last(self) -> Point2:
        return Point2(float(self.points[-1, 0]), float(self.points[-1, 1]))

    @property
    def advance(self) -> float:
        return float(self.lifted_angles[-1] - self.lifted_angles[0])


def _on_level(oval: ImplicitOval, x: float, y: float, k: float) -> tuple[float, float]:
    """Rescale ``(x, y)`` along its origin ray onto ``{V = k}`` of the family."""
    if isinstance(oval, Superellipse):
        v = abs(x) ** oval.p + abs(y) ** oval.p
        s = (k / v) ** (1.0 / oval.p)
        return x * s, y * s
    px, py = oval.with_level(k).radial_point(math.atan2(y, x))
    return float(px), float(py)


def _leaf_step(pair: PonceletPair, k: float, x: float, y: float, forward: bool) -> tuple[float, float]:
    outer = pair.outer
    if isinstance(outer, Superellipse):
        try:
            return kernels.step(*pair.inner.kernel_params(), outer.p, k, x, y, forward)
        except KernelError as exc:
            raise TangencySolveFailed(str(exc)) from exc
    leaf = outer.with_level(k)
    q1, q2 = tangency_points(pair.inner, (x, y))
    q = q1 if forward else q2
    out = chord_exit(leaf, (x, y), (q.x - x, q.y - y))
    return _on_level(outer, out.x, out.y, k)


def _check_admissible(pair: PonceletPair, p, tol: float) -> None:
    if not evaluate(pair.inner, p) > 0.0:
        raise DomainViolation(f"{tuple(p)} is not outside the inner oval")
    v = float(pair.outer.family_value(p[0], p[1]))
    if abs(v - pair.k) > tol * max(abs(pair.k), 1.0):
        raise DomainViolation(f"{tuple(p)} is not on the outer oval (V = {v}, level {pair.k})")


def poncelet_step(pair: PonceletPair, p, tol: float = ON_CURVE_TOL) -> Point2:
    """``P(p)``: the far end of the counterclockwise tangent chord through ``p``."""
    _check_admissible(pair, p, tol)
    return Point2(*_leaf_step(pair, pair.k, float(p[0]), float(p[1]), True))


def poncelet_inverse(pair: PonceletPair, p, tol: float = ON_CURVE_TOL) -> Point2:
    """``P^-1(p)``, built from the clockwise tangency branch."""
    _check_admissible(pair, p, tol)
    return Point2(*_leaf_step(pair, pair.k, float(p[0]), float(p[1]), False))


def planar_step(pair: PonceletPair, p, forward: bool = True) -> Point2:
    """Leafwise extension of P: map ``p`` with the outer level through ``p``."""
    x, y = float(p[0]), float(p[1])
    if not pair.inner.value(x, y) > 0.0:
        raise DomainViolation(f"{(x, y)} is not outside the inner oval")
    k = float(pair.outer.family_value(x, y))
    return Point2(*_leaf_step(pair, k, x, y, forward))


def iterate(pair: PonceletPair, p0, count: int, forward: bool = True) -> OrbitRecord:
    """``count`` steps of P (or P^-1) from ``p0`` with the lifted polar angle.

    Lift increments are taken in ``(0, 2 pi)`` (forward) and are in
    practice below ``pi`` since the rotation number is below 1/2.
    """
    _check_admissible(pair, p0, ON_CURVE_TOL)
    count = int(count)
    xs = np.empty(count + 1)
    ys = np.empty(count + 1)
    lifts = np.empty(count + 1)
    x, y = float(p0[0]), float(p0[1])
    if isinstance(pair.outer, Superellipse):
        try:
            kernels.orbit(*pair.inner.kernel_params(), pair.outer.p, pair.k,
                          x, y, count, forward, xs, ys, lifts)
        except KernelError as exc:
            raise TangencySolveFailed(str(exc)) from exc
    else:
        theta = math.atan2(y, x)
        xs[0], ys[0], lifts[0] = x, y, theta
        for i in range(1, count + 1):
            x, y = _leaf_step(pair, pair.k, x, y, forward)
            d = (math.atan2(y, x) - theta) % (2.0 * math.pi)
            if not forward:
                d -= 2.0 * math.pi
            theta += d
            xs[i], ys[i], lifts[i] = x, y, theta
    return OrbitRecord(np.column_stack([xs, ys]), lifts)


def lift_power(pair: PonceletPair, p, n: int, forward: bool = True) -> tuple[Point2, float]:
    """``(P^n(p), lift(P^n(p)) - lift(p))`` without storing the orbit."""
    x, y = float(p[0]), float(p[1])
    if isinstance(pair.outer, Superellipse):
        try:
            x, y, total = kernels.lift_map(*pair.inner.kernel_params(), pair.outer.p,
                                           pair.k, x, y, int(n), forward)
        except KernelError as exc:
            raise TangencySolveFailed(str(exc)) from exc
        return Point2(x, y), total
    rec = iterate(pair, p, n, forward)
    return rec.last, rec.advance


def jacobian(pair: PonceletPair, p, h: float | None = None, forward: bool = True) -> np.ndarray:
    """Central finite-difference Jacobian of the planar extension of P."""
    x, y = float(p[0]), float(p[1])
    if h is None:
        h = 1e-6 * (1.0 + math.hypot(x, y))
    jac = np.empty((2, 2))
    for col, (ex, ey) in enumerate(((h, 0.0), (0.0, h))):
        fp = planar_step(pair, (x + ex, y + ey), forward)
        fm = planar_step(pair, (x - ex, y - ey), forward)
        jac[0, col] = (fp.x - fm.x) / (2.0 * h)
        jac[1, col] = (fp.y - fm.y) / (2.0 * h)
    return jac


# --- closed form for an ellipse inside the circle family x^2 + y^2 = k ---


class _Poly(dict):
    """Sparse bivariate polynomial ``{(i, j): coefficient}`` for x^i y^j."""

    def __add__(self, other):
        out = _Poly(self)
        for key, v in other.items():
            out[key] = out.get(key, 0.0) + v
        return out

    def __mul__(self, other):
        if not isinstance(other, _Poly):
            return _Poly({key: v * other for key, v in self.items()})
        out = _Poly()
        for (i, j), a in self.items():
            for (k, m), b in other.items():
                out[(i + k, j + m)] = out.get((i + k, j + m), 0.0) + a * b
        return out

    __rmul__ = __mul__

    def __call__(self, x, y):
        return sum(c * x ** i * y ** j for (i, j), c in self.items())

    def dx(self):
        return _Poly({(i - 1, j): i * c for (i, j), c in self.items() if i > 0})

    def dy(self):
        return _Poly({(i, j - 1): j * c for (i, j), c in self.items() if j > 0})


_ONE = _Poly({(0, 0): 1.0})
_X = _Poly({(1, 0): 1.0})
_Y = _Poly({(0, 1): 1.0})
_R2 = _Poly({(2, 0): 1.0, (0, 2): 1.0})


@dataclass(frozen=True)
class ConicClosedForm:
    """Explicit P for an ellipse ``g = 0`` inside the circles ``x^2 + y^2 = k``.

    ``P(x, y) = ((-N1 N2 - 4 N3 sqrt(Delta)) / M, (-N1 N3 + 4 N2 sqrt(Delta)) / M)``
    with ``Delta = (A E^2 - B D E + C D^2 + F (B^2 - 4AC)) g(x, y)``.  The
    polynomials are tabulated once from the coefficients.
    """

    conic: Conic
    N1: _Poly = field(init=False, repr=False)
    N2: _Poly = field(init=False, repr=False)
    N3: _Poly = field(init=False, repr=False)
    M: _Poly = field(init=False, repr=False)
    delta_factor: float = field(init=False)
    d0: float = field(init=False)

    def __post_init__(self):
        A, B, C, D, E, F = self.conic.coefficients
        q = 4 * A * C - B ** 2
        u = 2 * C * D - B * E
        v = 2 * A * E - B * D
        n1 = (4 * A * F + 4 * C * F - D ** 2 - E ** 2) * _ONE + 2 * u * _X + 2 * v * _Y + q * _R2
        n2 = ((4 * C * F + D ** 2 - 4 * A * F - E ** 2) * _X + 2 * (D * E - 2 * B * F) * _Y
              + (2 * u * _ONE + q * _X) * _R2)
        n3 = (2 * (D * E - 2 * B * F) * _X + (E ** 2 - D ** 2 - 4 * C * F + 4 * A * F) * _Y
              + (2 * v * _ONE + q * _Y) * _R2)
        m0 = (E ** 4 + D ** 4 + 16 * F ** 2 * A ** 2 - 16 * E * F * B * D + 16 * F ** 2 * C ** 2
              + 16 * F ** 2 * B ** 2 + 2 * D ** 2 * E ** 2 - 8 * F * A * D ** 2
              + 8 * F * A * E ** 2 - 8 * F * E ** 2 * C + 8 * F * C * D ** 2 - 32 * F ** 2 * A * C)
        mx = (-12 * D ** 2 * E * B - 16 * A * E * F * B - 32 * F * C * A * D + 4 * B * E ** 3
              + 16 * D * A * E ** 2 + 8 * C * D ** 3 - 8 * C * D * E ** 2 - 16 * F * E * B * C
              + 32 * F * C ** 2 * D + 16 * D * B ** 2 * F)
        my = (-32 * F * A * C * E - 8 * A * D ** 2 * E + 16 * C * D ** 2 * E + 16 * B ** 2 * E * F
              + 32 * F * A ** 2 * E + 4 * B * D ** 3 + 8 * E ** 3 * A - 16 * F * A * D * B
              - 16 * B * C * D * F - 12 * B * D * E ** 2)
        mxx = (16 * C ** 2 * D ** 2 + 6 * E ** 2 * B ** 2 + 8 * F * A * B ** 2 - 8 * F * B ** 2 * C
               - 32 * F * A ** 2 * C + 32 * F * C ** 2 * A + 2 * B ** 2 * D ** 2 + 16 * A ** 2 * E ** 2
               - 16 * D * B * E * C - 8 * A * E ** 2 * C + 8 * A * C * D ** 2 - 16 * A * B * D * E)
        mxy = 32 * A * C * D * E - 8 * D * B ** 2 * E - 64 * B * C * A * F + 16 * B ** 3 * F
        myy = (-16 * D * B * E * C + 16 * A ** 2 * E ** 2 + 2 * E ** 2 * B ** 2 - 8 * F * A * B ** 2
               - 32 * F * C ** 2 * A + 6 * B ** 2 * D ** 2 + 16 * C ** 2 * D ** 2 + 8 * A * E ** 2 * C
               - 16 * A * B * D * E + 8 * F * B ** 2 * C + 32 * F * A ** 2 * C - 8 * A * C * D ** 2)
        m = (m0 * _ONE + mx * _X + my * _Y + mxx * _X * _X + mxy * _X * _Y + myy * _Y * _Y
             + 4 * q * (u * _X + v * _Y) * _R2 + q ** 2 * _R2 * _R2)
        for name, poly in (("N1", n1), ("N2", n2), ("N3", n3), ("M", m)):
            object.__setattr__(self, name, poly)
        object.__setattr__(self, "delta_factor",
                           A * E ** 2 - B * D * E + C * D ** 2 + F * (B ** 2 - 4 * A * C))
        th = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        gx, gy = self.conic.radial_point(th)
        object.__setattr__(self, "d0", float(np.max(np.hypot(gx, gy))))

    def delta(self, x, y):
        return self.delta_factor * self.conic.value(x, y)


def conic_closed_form_step(cf: ConicClosedForm, p) -> Point2:
    """Evaluate the explicit two-conic Poncelet map at ``p``."""
    x, y = float(p[0]), float(p[1])
    if not math.hypot(x, y) > cf.d0:
        raise DomainViolation(f"|p| = {math.hypot(x, y)} does not exceed d0 = {cf.d0}")
    dl = cf.delta(x, y)
    if dl < 0.0:
        raise NegativeDiscriminant(f"Delta = {dl} < 0 at {(x, y)}")
    m = cf.M(x, y)
    if abs(m) < 1e-300:
        raise ZeroDenominator(f"M vanishes at {(x, y)}")
    n1, n2, n3 = cf.N1(x, y), cf.N2(x, y), cf.N3(x, y)
    s = math.sqrt(dl)
    return Point2((-n1 * n2 - 4.0 * n3 * s) / m, (-n1 * n3 + 4.0 * n2 * s) / m)


def conic_closed_form_jacobian(cf: ConicClosedForm, p) -> np.ndarray:
    """Analytic derivative of :func:`conic_closed_form_step`."""
    x, y = float(p[0]), float(p[1])
    s = math.sqrt(cf.delta(x, y))
    n1, n2, n3, m = cf.N1(x, y), cf.N2(x, y), cf.N3(x, y), cf.M(x, y)
    gx, gy = cf.conic.grad(x, y)
    jac = np.empty((2, 2))
    for col, (d, dg) in enumerate((("dx", gx), ("dy", gy))):
        dn1 = getattr(cf.N1, d)()(x, y)
        dn2 = getattr(cf.N2, d)()(x, y)
        dn3 = getattr(cf.N3, d)()(x, y)
        dm = getattr(cf.M, d)()(x, y)
        ds = cf.delta_factor * dg / (2.0 * s)
        top_x = -n1 * n2 - 4.0 * n3 * s
        top_y = -n1 * n3 + 4.0 * n2 * s
        dtop_x = -dn1 * n2 - n1 * dn2 - 4.0 * (dn3 * s + n3 * ds)
        dtop_y = -dn1 * n3 - n1 * dn3 + 4.0 * (dn2 * s + n2 * ds)
        jac[0, col] = (dtop_x * m - top_x * dm) / (m * m)
        jac[1, col] = (dtop_y * m - top_y * dm) / (m * m)
    return jac


def circle_family_pair(conic: Conic, k: float = 1.0) -> PonceletPair:
    """The two-conic configuration: ``conic`` inside the circle ``x^2 + y^2 = k``."""
    return PonceletPair(conic, Superellipse(2.0, k))


__all__ = [
    "PonceletPair",
    "OrbitRecord",
    "ConicClosedForm",
    "PonceletError",
    "poncelet_step",
    "poncelet_inverse",
    "planar_step",
    "iterate",
    "lift_power",
    "jacobian",
    "conic_closed_form_step",
    "conic_closed_form_jacobian",
    "circle_family_pair",
]
