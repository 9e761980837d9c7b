# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop for the Poncelet step.

Mirrors ``_kernel_py`` exactly; see that module for the argument
conventions.  Only scalar C arithmetic is used, so no numpy headers are
needed at build time.
"""

from libc.math cimport atan2, copysign, fabs, floor, hypot, pow, sqrt, fmod, M_PI

from poncelet.errors import KernelError

cdef double TWO_PI = 2.0 * M_PI
cdef int _MAX_NEWTON = 200


cdef inline void _power_line(double ax, double ay, double bx, double by,
                             double a, double c, double t,
                             double* val, double* der) noexcept nogil:
    cdef double ux = ax + t * bx
    cdef double uy = ay + t * by
    cdef double fx = fabs(ux)
    cdef double fy = fabs(uy)
    cdef double px = pow(fx, a - 1.0)
    cdef double py = pow(fy, a - 1.0)
    val[0] = px * fx + py * fy - c
    der[0] = a * (copysign(px, ux) * bx + copysign(py, uy) * by)


cdef int _convex_root(double ax, double ay, double bx, double by, double a,
                      double c, double t0, double scale, double* out) noexcept nogil:
    cdef double t = t0
    cdef double val, der, dt, t_new
    cdef int i
    for i in range(_MAX_NEWTON):
        _power_line(ax, ay, bx, by, a, c, t, &val, &der)
        if val <= 0.0 or der == 0.0:
            out[0] = t
            return 0
        dt = val / der
        t_new = t - dt
        if (t0 > 0.0 and t_new >= t) or (t0 < 0.0 and t_new <= t):
            out[0] = t
            return 0
        t = t_new
        if fabs(dt) <= 4e-16 * (fabs(t) + scale):
            out[0] = t
            return 0
    out[0] = t
    return 1


cdef int _tangency_se(double p, double c, double x, double y, double* q) noexcept nogil:
    cdef double a = p / (p - 1.0)
    cdef double r2 = x * x + y * y
    cdef double r = sqrt(r2)
    cdef double u0x = c * x / r2
    cdef double u0y = c * y / r2
    cdef double tx = -y / r
    cdef double ty = x / r
    cdef double dual_radius = sqrt(2.0) * pow(c, 1.0 / a)
    cdef double s0 = sqrt(u0x * u0x + u0y * u0y) + dual_radius + 1.0
    cdef double s_hi, s_lo, ux, uy, e
    cdef double x1, y1, x2, y2
    if _convex_root(u0x, u0y, tx, ty, a, c, s0, dual_radius, &s_hi):
        return 1
    if _convex_root(u0x, u0y, tx, ty, a, c, -s0, dual_radius, &s_lo):
        return 1
    e = 1.0 / (p - 1.0)
    ux = u0x + s_hi * tx
    uy = u0y + s_hi * ty
    x1 = copysign(pow(fabs(ux), e), ux)
    y1 = copysign(pow(fabs(uy), e), uy)
    ux = u0x + s_lo * tx
    uy = u0y + s_lo * ty
    x2 = copysign(pow(fabs(ux), e), ux)
    y2 = copysign(pow(fabs(uy), e), uy)
    if x * y1 - y * x1 < 0.0:
        q[0] = x2; q[1] = y2; q[2] = x1; q[3] = y1
    else:
        q[0] = x1; q[1] = y1; q[2] = x2; q[3] = y2
    return 0


cdef int _tangency_conic(double A, double B, double C, double D, double E,
                         double F, double x, double y, double* q) noexcept nogil:
    cdef double la = A * x + 0.5 * B * y + 0.5 * D
    cdef double lb = 0.5 * B * x + C * y + 0.5 * E
    cdef double lc = 0.5 * D * x + 0.5 * E * y + F
    cdef double nn = la * la + lb * lb
    cdef double x0, y0, n, dx, dy, qa, qb, qc, disc, sq, w, s1, s2
    cdef double x1, y1, x2, y2
    if nn == 0.0:
        return 1
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
        return 1
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
        q[0] = x2; q[1] = y2; q[2] = x1; q[3] = y1
    else:
        q[0] = x1; q[1] = y1; q[2] = x2; q[3] = y2
    return 0


cdef inline int _tangency(int kind, double a0, double a1, double a2, double a3,
                          double a4, double a5, double x, double y, double* q) noexcept nogil:
    if kind == 0:
        return _tangency_se(a0, a1, x, y, q)
    return _tangency_conic(a0, a1, a2, a3, a4, a5, x, y, q)


cdef int _chord_exit(double qe, double k, double px, double py, double dx,
                     double dy, double t_inside, double* t) noexcept nogil:
    cdef double dn = hypot(dx, dy)
    cdef double box = sqrt(2.0) * pow(k, 1.0 / qe)
    cdef double t0 = t_inside + (hypot(px, py) + box) / dn + 1.0
    return _convex_root(px, py, dx, dy, qe, k, t0, t0, t)


cdef int _step(int kind, double a0, double a1, double a2, double a3, double a4,
               double a5, double qe, double k, double* x, double* y,
               bint forward) noexcept nogil:
    cdef double q[4]
    cdef double dx, dy, t, nx, ny, v, s
    if _tangency(kind, a0, a1, a2, a3, a4, a5, x[0], y[0], q):
        return 1
    if forward:
        dx = q[0] - x[0]
        dy = q[1] - y[0]
    else:
        dx = q[2] - x[0]
        dy = q[3] - y[0]
    if _chord_exit(qe, k, x[0], y[0], dx, dy, 1.0, &t):
        return 1
    nx = x[0] + t * dx
    ny = y[0] + t * dy
    v = pow(fabs(nx), qe) + pow(fabs(ny), qe)
    s = pow(k / v, 1.0 / qe)
    x[0] = nx * s
    y[0] = ny * s
    return 0


cdef inline double _mod_two_pi(double d) noexcept nogil:
    d = fmod(d, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d


def tangency_superellipse(double p, double c, double x, double y):
    cdef double q[4]
    if _tangency_se(p, c, x, y, q):
        raise KernelError("Newton iteration did not converge on a convex line section")
    return q[0], q[1], q[2], q[3]


def tangency_conic(double A, double B, double C, double D, double E, double F,
                   double x, double y):
    cdef double q[4]
    if _tangency_conic(A, B, C, D, E, F, x, y, q):
        raise KernelError("point is not outside the conic")
    return q[0], q[1], q[2], q[3]


def tangency(int kind, double a0, double a1, double a2, double a3, double a4,
             double a5, double x, double y):
    cdef double q[4]
    if _tangency(kind, a0, a1, a2, a3, a4, a5, x, y, q):
        raise KernelError("tangency solve failed")
    return q[0], q[1], q[2], q[3]


def chord_exit_superellipse(double qe, double k, double px, double py,
                            double dx, double dy, double t_inside):
    cdef double t
    if _chord_exit(qe, k, px, py, dx, dy, t_inside, &t):
        raise KernelError("Newton iteration did not converge on a convex line section")
    return t


def step(int kind, double a0, double a1, double a2, double a3, double a4,
         double a5, double qe, double k, double x, double y, bint forward):
    if _step(kind, a0, a1, a2, a3, a4, a5, qe, k, &x, &y, forward):
        raise KernelError("Poncelet step failed")
    return x, y


def orbit(int kind, double a0, double a1, double a2, double a3, double a4,
          double a5, double qe, double k, double x, double y, Py_ssize_t n,
          bint forward, double[:] xs, double[:] ys, double[:] lifts):
    cdef double theta = atan2(y, x)
    cdef double d
    cdef Py_ssize_t i
    cdef int fail = 0
    xs[0] = x
    ys[0] = y
    lifts[0] = theta
    with nogil:
        for i in range(1, n + 1):
            if _step(kind, a0, a1, a2, a3, a4, a5, qe, k, &x, &y, forward):
                fail = 1
                break
            d = _mod_two_pi(atan2(y, x) - theta)
            if not forward:
                d -= TWO_PI
            theta += d
            xs[i] = x
            ys[i] = y
            lifts[i] = theta
    if fail:
        raise KernelError("Poncelet step failed")


def lift_map(int kind, double a0, double a1, double a2, double a3, double a4,
             double a5, double qe, double k, double x, double y, Py_ssize_t n,
             bint forward):
    cdef double theta = atan2(y, x)
    cdef double total = 0.0
    cdef double a, d
    cdef Py_ssize_t i
    cdef int fail = 0
    with nogil:
        for i in range(n):
            if _step(kind, a0, a1, a2, a3, a4, a5, qe, k, &x, &y, forward):
                fail = 1
                break
            a = atan2(y, x)
            d = _mod_two_pi(a - theta)
            if not forward:
                d -= TWO_PI
            total += d
            theta = a
    if fail:
        raise KernelError("Poncelet step failed")
    return x, y, total


def rotation_bracket(int kind, double a0, double a1, double a2, double a3,
                     double a4, double a5, double qe, double k, double x,
                     double y, Py_ssize_t n, double return_tol,
                     Py_ssize_t max_return):
    cdef double x0 = x
    cdef double y0 = y
    cdef double theta = atan2(y, x)
    cdef double total = 0.0
    cdef double a, d
    cdef long long lo_num = 0, lo_den = 1, hi_num = 1, hi_den = 1, m
    cdef Py_ssize_t j
    cdef Py_ssize_t first_return = 0
    cdef int fail = 0
    with nogil:
        for j in range(1, n + 1):
            if _step(kind, a0, a1, a2, a3, a4, a5, qe, k, &x, &y, True):
                fail = 1
                break
            a = atan2(y, x)
            d = _mod_two_pi(a - theta)
            total += d
            theta = a
            m = <long long>floor(total / TWO_PI)
            if m * lo_den > lo_num * j:
                lo_num = m
                lo_den = j
            if (m + 1) * hi_den < hi_num * j:
                hi_num = m + 1
                hi_den = j
            if first_return == 0 and j <= max_return and hypot(x - x0, y - y0) <= return_tol:
                first_return = j
                break
    if fail:
        raise KernelError("Poncelet step failed")
    return lo_num, lo_den, hi_num, hi_den, total, first_return
