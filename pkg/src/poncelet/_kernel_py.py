"""Pure-Python hot loop for the Poncelet step.

This module mirrors ``_kernel.pyx`` line for line and is used when the
compiled extension is unavailable.  Both expose the same functions with
the same argument order:

``inner`` is a 7-tuple ``(kind, a0, ..., a5)``.  For ``kind == 0`` the
inner oval is the superellipse ``|x|**a0 + |y|**a0 = a1``; for
``kind == 1`` it is the conic ``a0 x^2 + a1 xy + a2 y^2 + a3 x + a4 y + a5 = 0``
(sign normalised so the conic polynomial is positive outside).  The outer
oval is always the superellipse ``|x|**q + |y|**q = k``.
"""

from math import atan2, copysign, fabs, floor, hypot, pi, sqrt

from .errors import KernelError

TWO_PI = 2.0 * pi
_MAX_NEWTON = 200


def _power_line(ax, ay, bx, by, a, c, t):
    # h(t) = |ax + t bx|^a + |ay + t by|^a - c and its derivative
    ux = ax + t * bx
    uy = ay + t * by
    fx = fabs(ux)
    fy = fabs(uy)
    px = fx ** (a - 1.0)
    py = fy ** (a - 1.0)
    val = px * fx + py * fy - c
    der = a * (copysign(px, ux) * bx + copysign(py, uy) * by)
    return val, der


def _convex_root(ax, ay, bx, by, a, c, t0, scale):
    """Newton from ``t0`` (where h > 0) towards the nearest root of the convex h."""
    t = t0
    for _ in range(_MAX_NEWTON):
        val, der = _power_line(ax, ay, bx, by, a, c, t)
        if val <= 0.0 or der == 0.0:
            return t
        dt = val / der
        t_new = t - dt
        # monotone convergence from the outside; a non-shrinking step means
        # floating point has run out of room
        if (t0 > 0.0 and t_new >= t) or (t0 < 0.0 and t_new <= t):
            return t
        t = t_new
        if fabs(dt) <= 4e-16 * (fabs(t) + scale):
            return t
    raise KernelError("Newton iteration did not converge on a convex line section")


def tangency_superellipse(p, c, x, y):
    """Two tangency points from (x, y) to ``|X|^p + |Y|^p = c``.

    Works in the dual: tangent lines are ``u . X = c`` with ``u`` on the
    dual superellipse of exponent ``p/(p-1)``, so the tangency condition
    becomes the intersection of a line with a convex curve.
    Returns ``(x1, y1, x2, y2)`` with ``det((x,y), q1) > 0``.
    """
    a = p / (p - 1.0)
    r2 = x * x + y * y
    r = sqrt(r2)
    u0x = c * x / r2
    u0y = c * y / r2
    tx = -y / r
    ty = x / r
    dual_radius = sqrt(2.0) * c ** (1.0 / a)
    s0 = sqrt(u0x * u0x + u0y * u0y) + dual_radius + 1.0
    s_hi = _convex_root(u0x, u0y, tx, ty, a, c, s0, dual_radius)
    s_lo = _convex_root(u0x, u0y, tx, ty, a, c, -s0, dual_radius)
    e = 1.0 / (p - 1.0)
    ux = u0x + s_hi * tx
    uy = u0y + s_hi * ty
    x1 = copysign(fabs(ux) ** e, ux)
    y1 = copysign(fabs(uy) ** e, uy)
    ux = u0x + s_lo * tx
    uy = u0y + s_lo * ty
    x2 = copysign(fabs(ux) ** e, ux)
    y2 = copysign(fabs(uy) ** e, uy)
    if x * y1 - y * x1 < 0.0:
        return x2, y2, x1, y1
    return x1, y1, x2, y2


def tangency_conic(A, B, C, D, E, F, x, y):
    """Tangency points from (x, y) to a conic: the polar line cut with the conic."""
    la = A * x + 0.5 * B * y + 0.5 * D
    lb = 0.5 * B * x + C * y + 0.5 * E
    lc = 0.5 * D * x + 0.5 * E * y + F
    nn = la * la + lb * lb
    if nn == 0.0:
        raise KernelError("degenerate polar line")
    x0 = -lc * la / nn
    y0 = -lc * lb / nn
    n = sqrt(nn)
    dx = -lb / n
    dy = la / n
    qa = A * dx * dx + B * dx * dy + C * dy * dy
    qb = 2.0 * A * x0 * dx + B * (x0 * dy + y0 * dx) + 2.0 * C * y0 * dy + D * dx + E * dy
    qc = A * x0 * x0 + B * x0 * y0 + C * y0 * y0 + D * x0 + E * y0 + F
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        raise KernelError("point is not outside the conic")
    sq = sqrt(disc)
    w = -0.5 * (qb + copysign(sq, qb))
    if w == 0.0:
        s1 = 0.0
        s2 = 0.0
    else:
        s1 = w / qa
        s2 = qc / w
    x1 = x0 + s1 * dx
    y1 = y0 + s1 * dy
    x2 = x0 + s2 * dx
    y2 = y0 + s2 * dy
    if x * y1 - y * x1 < 0.0:
        return x2, y2, x1, y1
    return x1, y1, x2, y2


def tangency(kind, a0, a1, a2, a3, a4, a5, x, y):
    if kind == 0:
        return tangency_superellipse(a0, a1, x, y)
    return tangency_conic(a0, a1, a2, a3, a4, a5, x, y)


def chord_exit_superellipse(q, k, px, py, dx, dy, t_inside):
    """Far intersection of ``p + t d`` with ``|X|^q + |Y|^q = k`` beyond ``t_inside``.

    ``p + t_inside d`` must lie strictly inside the curve.
    """
    dn = hypot(dx, dy)
    box = sqrt(2.0) * k ** (1.0 / q)
    t0 = t_inside + (hypot(px, py) + box) / dn + 1.0
    return _convex_root(px, py, dx, dy, q, k, t0, t0)


def _reproject(q, k, x, y):
    v = fabs(x) ** q + fabs(y) ** q
    s = (k / v) ** (1.0 / q)
    return x * s, y * s


def step(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, forward):
    """One application of P (``forward``) or of P^-1 on the level ``k``."""
    x1, y1, x2, y2 = tangency(kind, a0, a1, a2, a3, a4, a5, x, y)
    if forward:
        dx = x1 - x
        dy = y1 - y
    else:
        dx = x2 - x
        dy = y2 - y
    t = chord_exit_superellipse(q, k, x, y, dx, dy, 1.0)
    return _reproject(q, k, x + t * dx, y + t * dy)


def orbit(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, n, forward, xs, ys, lifts):
    """Fill ``xs, ys, lifts`` (length ``n + 1``) with an orbit and its lift.

    The lift follows the ``(prev, prev + pi)`` rule for the forward map and
    ``(prev - pi, prev)`` for the inverse.
    """
    theta = atan2(y, x)
    xs[0] = x
    ys[0] = y
    lifts[0] = theta
    for i in range(1, n + 1):
        x, y = step(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, forward)
        a = atan2(y, x)
        d = (a - theta) % TWO_PI
        if not forward:
            d -= TWO_PI
        theta += d
        xs[i] = x
        ys[i] = y
        lifts[i] = theta


def lift_map(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, n, forward):
    """Return ``(x_n, y_n, total_lift_advance)`` after ``n`` steps."""
    theta = atan2(y, x)
    total = 0.0
    for _ in range(n):
        x, y = step(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, forward)
        a = atan2(y, x)
        d = (a - theta) % TWO_PI
        if not forward:
            d -= TWO_PI
        total += d
        theta = a
    return x, y, total


def rotation_bracket(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, n, return_tol, max_return):
    """Birkhoff lift of an ``n``-step orbit with rational bounds.

    For every ``j <= n`` with ``m_j = floor(lift_j / 2 pi)`` the rotation
    number satisfies ``m_j / j <= rho <= (m_j + 1) / j``.  Returns
    ``(lo_num, lo_den, hi_num, hi_den, total, first_return)`` where
    ``first_return`` is the smallest ``j <= max_return`` with the orbit back
    within ``return_tol`` of the seed (0 when none).
    """
    x0 = x
    y0 = y
    theta = atan2(y, x)
    total = 0.0
    lo_num = 0
    lo_den = 1
    hi_num = 1
    hi_den = 1
    first_return = 0
    for j in range(1, n + 1):
        x, y = step(kind, a0, a1, a2, a3, a4, a5, q, k, x, y, True)
        a = atan2(y, x)
        d = (a - theta) % TWO_PI
        total += d
        theta = a
        m = int(floor(total / TWO_PI))
        if m * lo_den > lo_num * j:
            lo_num = m
            lo_den = j
        if (m + 1) * hi_den < hi_num * j:
            hi_num = m + 1
            hi_den = j
        if first_return == 0 and j <= max_return and hypot(x - x0, y - y0) <= return_tol:
            first_return = j
            break
    return lo_num, lo_den, hi_num, hi_den, total, first_return
