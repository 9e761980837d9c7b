"""Implicit convex ovals: superellipse level sets and ellipses.

Every oval is the zero set of a convex function ``g`` that is negative
inside, zero on the curve and positive outside, and is star-shaped about
the origin.  Each oval also defines a one-parameter family of nested
curves ``{V = k}`` where ``V = g + level``; the Poncelet map of a pair is
extended to the plane leaf by leaf along this family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    InvalidOval,
    KernelError,
    NoExitFound,
    PointInsideOval,
    TangencySolveFailed,
)

TANGENCY_TOL = 1e-10
CHORD_TOL = 1e-12
MAX_NEWTON = 50


class Point2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # vector addition instead of tuple concat
        return Point2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point2(self.x - other[0], self.y - other[1])

    def __mul__(self, s):
        return Point2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def det(a, b) -> float:
    return a[0] * b[1] - a[1] * b[0]


class ImplicitOval:
    """Common interface; see :class:`Superellipse` and :class:`Conic`."""

    def value(self, x, y):
        raise NotImplementedError

    def grad(self, x, y):
        raise NotImplementedError

    def hessian(self, x, y):
        raise NotImplementedError

    @property
    def level(self) -> float:
        raise NotImplementedError

    def with_level(self, k: float) -> "ImplicitOval":
        raise NotImplementedError

    def family_value(self, x, y):
        """``V(x, y)``; the oval itself is ``{V = level}``."""
        return self.value(x, y) + self.level

    def boundary_point(self, phi: float) -> Point2:
        raise NotImplementedError

    def radial_point(self, theta):
        """Point of the curve on the ray from the origin at polar angle ``theta``."""
        raise NotImplementedError

    def kernel_params(self) -> tuple:
        raise NotImplementedError

    def max_radius(self, samples: int = 512) -> float:
        th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
        x, y = self.radial_point(th)
        return float(np.max(np.hypot(x, y)))


@dataclass(frozen=True)
class Superellipse(ImplicitOval):
    """The curve ``|x|^p + |y|^p = c`` with ``p > 1`` and ``c > 0``."""

    p: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.p > 1.0 and math.isfinite(self.p)):
            raise InvalidOval(f"superellipse exponent must exceed 1, got {self.p}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise InvalidOval(f"superellipse level must be positive, got {self.c}")

    def value(self, x, y):
        return np.abs(x) ** self.p + np.abs(y) ** self.p - self.c

    def grad(self, x, y):
        p = self.p
        return (p * np.sign(x) * np.abs(x) ** (p - 1.0),
                p * np.sign(y) * np.abs(y) ** (p - 1.0))

    def hessian(self, x, y):
        p = self.p
        # |x|^(p-2) blows up on the axes when p < 2
        fx = p * (p - 1.0) * max(abs(x), 1e-300) ** (p - 2.0)
        fy = p * (p - 1.0) * max(abs(y), 1e-300) ** (p - 2.0)
        return np.array([[fx, 0.0], [0.0, fy]])

    @property
    def level(self) -> float:
        return self.c

    def with_level(self, k: float) -> "Superellipse":
        return Superellipse(self.p, k)

    def boundary_point(self, phi: float) -> Point2:
        s = self.c ** (1.0 / self.p)
        e = 2.0 / self.p
        co, si = math.cos(phi), math.sin(phi)
        return Point2(s * math.copysign(abs(co) ** e, co),
                      s * math.copysign(abs(si) ** e, si))

    def radial_point(self, theta):
        co, si = np.cos(theta), np.sin(theta)
        r = (self.c / (np.abs(co) ** self.p + np.abs(si) ** self.p)) ** (1.0 / self.p)
        return r * co, r * si

    def kernel_params(self) -> tuple:
        return (0, float(self.p), float(self.c), 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Conic(ImplicitOval):
    """The ellipse ``A x^2 + B xy + C y^2 + D x + E y + F = 0``.

    Coefficients are rescaled by -1 when needed so that the polynomial is
    positive outside.  The origin must lie strictly inside.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def __post_init__(self):
        coeffs = (self.A, self.B, self.C, self.D, self.E, self.F)
        if not all(math.isfinite(v) for v in coeffs):
            raise InvalidOval("conic coefficients must be finite")
        if self.B * self.B - 4.0 * self.A * self.C >= 0.0:
            raise InvalidOval("conic is not an ellipse (B^2 - 4AC >= 0)")
        if self.A < 0.0:
            for name, v in zip("ABCDEF", coeffs):
                object.__setattr__(self, name, -v)
        cx, cy = self.center
        if self.value(cx, cy) >= 0.0:
            raise InvalidOval("conic has no real points")
        if self.F >= 0.0:
            raise InvalidOval("the origin must lie strictly inside the ellipse")

    @classmethod
    def from_axes(cls, a: float, b: float, cx: float = 0.0, cy: float = 0.0,
                  angle: float = 0.0) -> "Conic":
        """Ellipse with semi-axes ``a, b`` centred at ``(cx, cy)``, rotated by ``angle``."""
        co, si = math.cos(angle), math.sin(angle)
        ia, ib = 1.0 / (a * a), 1.0 / (b * b)
        A = co * co * ia + si * si * ib
        C = si * si * ia + co * co * ib
        B = 2.0 * co * si * (ia - ib)
        D = -2.0 * A * cx - B * cy
        E = -B * cx - 2.0 * C * cy
        F = A * cx * cx + B * cx * cy + C * cy * cy - 1.0
        return cls(A, B, C, D, E, F)

    @property
    def coefficients(self) -> tuple:
        return (self.A, self.B, self.C, self.D, self.E, self.F)

    @property
    def center(self) -> Point2:
        m = np.array([[2.0 * self.A, self.B], [self.B, 2.0 * self.C]])
        cx, cy = np.linalg.solve(m, [-self.D, -self.E])
        return Point2(float(cx), float(cy))

    def value(self, x, y):
        return (self.A * x * x + self.B * x * y + self.C * y * y
                + self.D * x + self.E * y + self.F)

    def grad(self, x, y):
        return (2.0 * self.A * x + self.B * y + self.D,
                self.B * x + 2.0 * self.C * y + self.E)

    def hessian(self, x, y):
        return np.array([[2.0 * self.A, self.B], [self.B, 2.0 * self.C]])

    @property
    def level(self) -> float:
        return -self.F

    def with_level(self, k: float) -> "Conic":
        return Conic(self.A, self.B, self.C, self.D, self.E, -k)

    def _ray(self, ox, oy, theta):
        dx, dy = np.cos(theta), np.sin(theta)
        qa = self.A * dx * dx + self.B * dx * dy + self.C * dy * dy
        qb = (2.0 * self.A * ox * dx + self.B * (ox * dy + oy * dx)
              + 2.0 * self.C * oy * dy + self.D * dx + self.E * dy)
        qc = self.value(ox, oy)
        t = (-qb + np.sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa)
        return ox + t * dx, oy + t * dy

    def boundary_point(self, phi: float) -> Point2:
        cx, cy = self.center
        x, y = self._ray(cx, cy, phi)
        return Point2(float(x), float(y))

    def radial_point(self, theta):
        return self._ray(0.0, 0.0, theta)

    def kernel_params(self) -> tuple:
        return (1,) + tuple(float(v) for v in self.coefficients)


def circle(radius: float) -> Superellipse:
    return Superellipse(2.0, radius * radius)


def evaluate(oval: ImplicitOval, pt) -> float:
    """``g(pt)``: negative inside, zero on the curve, positive outside."""
    return float(oval.value(pt[0], pt[1]))


def gradient(oval: ImplicitOval, pt) -> Point2:
    gx, gy = oval.grad(pt[0], pt[1])
    return Point2(float(gx), float(gy))


def boundary_point(oval: ImplicitOval, phi: float) -> Point2:
    """Counterclockwise parametrisation of the curve by ``phi in [0, 2 pi)``.

    Superellipses use ``c^(1/p) (sgn cos|cos|^(2/p), sgn sin|sin|^(2/p))``;
    ellipses use the ray from their centre at angle ``phi``.
    """
    return oval.boundary_point(phi)


def _scale(oval: ImplicitOval) -> float:
    return max(abs(oval.level), 1.0)


def tangency_points(oval: ImplicitOval, p, tol: float = TANGENCY_TOL) -> tuple[Point2, Point2]:
    """Tangency points of the two lines through ``p`` tangent to ``oval``.

    The first returned point ``q`` satisfies ``det(p, q - p) > 0`` (the
    counterclockwise branch, used by the forward Poncelet map), the second
    ``det(p, q - p) < 0``.
    """
    if evaluate(oval, p) <= 0.0:
        raise PointInsideOval(f"{tuple(p)} is not strictly outside the oval")
    try:
        x1, y1, x2, y2 = kernels.tangency(*oval.kernel_params(), float(p[0]), float(p[1]))
    except KernelError as exc:
        raise TangencySolveFailed(str(exc)) from exc
    q1, q2 = Point2(x1, y1), Point2(x2, y2)
    for q in (q1, q2):
        if not _tangency_ok(oval, p, q, tol):
            raise TangencySolveFailed(f"tangency residual too large at {tuple(q)}")
    return q1, q2


def _tangency_residuals(oval, p, q):
    gx, gy = oval.grad(q[0], q[1])
    dx, dy = p[0] - q[0], p[1] - q[1]
    return float(oval.value(q[0], q[1])), float(gx * dx + gy * dy), math.hypot(gx, gy) * math.hypot(dx, dy)


def _tangency_ok(oval, p, q, tol):
    r0, r1, scale = _tangency_residuals(oval, p, q)
    return abs(r0) <= tol * _scale(oval) and abs(r1) <= tol * scale


def tangency_points_newton(oval: ImplicitOval, p, seeds: int = 16,
                           tol: float = TANGENCY_TOL,
                           max_iter: int = MAX_NEWTON) -> tuple[Point2, Point2]:
    """Same contract as :func:`tangency_points`, solved directly.

    Damped Newton on ``{g(q) = 0, grad g(q) . (p - q) = 0}`` started from
    ``seeds`` equally spaced boundary points, with step halving.  Distinct
    solutions are merged at distance ``1e-6``.  Slower than the dual-curve
    kernel; kept as an independent check.
    """
    if evaluate(oval, p) <= 0.0:
        raise PointInsideOval(f"{tuple(p)} is not strictly outside the oval")
    px, py = float(p[0]), float(p[1])

    def residual(q):
        gx, gy = oval.grad(q[0], q[1])
        return np.array([oval.value(q[0], q[1]), gx * (px - q[0]) + gy * (py - q[1])], dtype=float)

    found: list[np.ndarray] = []
    with np.errstate(all="ignore"):
        for i in range(seeds):
            q = _newton_seed(oval, p, residual, 2.0 * math.pi * i / seeds, tol, max_iter)
            if q is not None and all(np.linalg.norm(q - f) > 1e-6 for f in found):
                found.append(q)
    if len(found) != 2:
        raise TangencySolveFailed(f"expected 2 tangency points, found {len(found)}")
    a, b = (Point2(float(f[0]), float(f[1])) for f in found)
    if det(p, a - p) < 0.0:
        a, b = b, a
    return a, b


def _newton_seed(oval, p, residual, phi, tol, max_iter):
    px, py = float(p[0]), float(p[1])
    q = np.array(oval.boundary_point(phi), dtype=float)
    r = residual(q)
    for _ in range(max_iter):
        g = np.array(oval.grad(q[0], q[1]), dtype=float)
        h = oval.hessian(q[0], q[1])
        jac = np.vstack([g, h @ np.array([px - q[0], py - q[1]]) - g])
        try:
            dq = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-6:
            trial = q + lam * dq
            rt = residual(trial)
            if np.linalg.norm(rt) < np.linalg.norm(r):
                break
            lam *= 0.5
        if not np.all(np.isfinite(rt)):
            return None
        q, r = trial, rt
        if _tangency_ok(oval, p, q, tol * 1e-2):
            break
    return q if _tangency_ok(oval, p, q, tol) else None


def chord_exit(oval: ImplicitOval, p, d, tol: float = CHORD_TOL) -> Point2:
    """Second intersection of the line ``p + t d`` (``t > 0``) with the oval.

    ``p`` lies on the oval and the ray must enter its interior.
    """
    px, py, dx, dy = float(p[0]), float(p[1]), float(d[0]), float(d[1])
    gx, gy = oval.grad(px, py)
    if gx * dx + gy * dy >= 0.0:
        raise NoExitFound("the ray does not enter the oval")
    if isinstance(oval, Superellipse):
        try:
            t = kernels.chord_exit_superellipse(oval.p, oval.c, px, py, dx, dy, 0.0)
        except KernelError as exc:
            raise NoExitFound(str(exc)) from exc
    else:
        qa = oval.A * dx * dx + oval.B * dx * dy + oval.C * dy * dy
        qb = (2.0 * oval.A * px * dx + oval.B * (px * dy + py * dx)
              + 2.0 * oval.C * py * dy + oval.D * dx + oval.E * dy)
        qc = float(oval.value(px, py))
        disc = qb * qb - 4.0 * qa * qc
        if disc < 0.0:
            raise NoExitFound("the line misses the oval")
        t = (-qb + math.sqrt(disc)) / (2.0 * qa)
    if not t > 0.0:
        raise NoExitFound("no intersection beyond the starting point")
    out = Point2(px + t * dx, py + t * dy)
    if abs(evaluate(oval, out)) > 1e3 * tol * _scale(oval):
        raise NoExitFound("chord root did not converge")
    return out


def is_star_shaped(oval: ImplicitOval, samples: int = 256) -> bool:
    """Sampled check that each ray from the origin crosses the curve once."""
    th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    if oval.value(0.0, 0.0) >= 0.0:
        return False
    x, y = oval.radial_point(th)
    if not np.all(np.isfinite(x)):
        return False
    # outside beyond the crossing, inside before it
    return bool(np.all(oval.value(1.01 * x, 1.01 * y) > 0.0)
                and np.all(oval.value(0.99 * x, 0.99 * y) < 0.0))
