"""Periodic orbits from tangent-polygon closure conditions.

An ``n``-periodic orbit with rotation number ``1/n`` is a convex polygon
whose sides touch the inner oval at ``n`` counterclockwise points and whose
vertices lie on one level curve ``{G = k}`` of the outer family.  The
unknowns are the polar angles ``phi_i`` of the tangency points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .core import PonceletPair, lift_power, poncelet_step
from .errors import NoConvergence, ParallelTangents, PonceletError
from .ovals import ImplicitOval, Point2, Superellipse

TWO_PI = 2.0 * math.pi
RESIDUAL_TOL = 1e-9
SYMMETRY_TOL = 1e-7
DEDUP_TOL = 1e-6

SYMMETRY_TAGS = ("None", "Axes", "Diagonals", "All")


@dataclass(frozen=True)
class ClosureProblem:
    """Find ``period``-periodic orbits between ``inner`` and ``{G = k}``.

    ``family`` supplies ``G`` through its ``family_value``.  ``k = None``
    leaves the level free.
    """

    period: int
    inner: ImplicitOval
    family: ImplicitOval
    k: float | None = None

    def __post_init__(self):
        if self.period < 2:
            raise ValueError("period must be at least 2")

    @property
    def free(self) -> bool:
        return self.k is None

    def at(self, k: float | None) -> "ClosureProblem":
        return replace(self, k=k)

    def pair(self, k: float) -> PonceletPair:
        return PonceletPair(self.inner, self.family.with_level(k), validate=False)


@dataclass(frozen=True)
class PeriodicOrbitSolution:
    phis: np.ndarray
    k: float
    residual: float
    symmetry: str = "None"
    points: np.ndarray = field(default=None, repr=False)

    @property
    def period(self) -> int:
        return len(self.phis)

    def as_dict(self) -> dict:
        return {"k": self.k, "residual": self.residual, "symmetry": self.symmetry,
                "phis": [float(p) for p in self.phis],
                "points": [[float(a), float(b)] for a, b in self.points]}


def tangent_lines(inner: ImplicitOval, phis) -> tuple[np.ndarray, np.ndarray]:
    """Normals ``n_i`` and offsets ``b_i`` of the lines ``n_i . X = b_i``."""
    phis = np.asarray(phis, dtype=float)
    qx, qy = inner.radial_point(phis)
    gx, gy = inner.grad(qx, qy)
    normals = np.column_stack([gx, gy])
    return normals, gx * qx + gy * qy


def closure_points(problem: ClosureProblem, phis) -> np.ndarray:
    """Vertices ``q_{i,i+1}`` of the tangent polygon (row ``i`` meets line ``i+1``)."""
    normals, b = tangent_lines(problem.inner, phis)
    n1, n2 = normals, np.roll(normals, -1, axis=0)
    b1, b2 = b, np.roll(b, -1)
    det = n1[:, 0] * n2[:, 1] - n1[:, 1] * n2[:, 0]
    scale = np.hypot(*n1.T) * np.hypot(*n2.T)
    if np.any(np.abs(det) <= 1e-12 * scale):
        raise ParallelTangents("consecutive tangent lines are parallel")
    x = (b1 * n2[:, 1] - b2 * n1[:, 1]) / det
    y = (n1[:, 0] * b2 - n2[:, 0] * b1) / det
    return np.column_stack([x, y])


def closure_residual(problem: ClosureProblem, phis, k: float | None = None) -> np.ndarray:
    """Fixed level: ``G(q_{i,i+1}) - k`` (``n`` values).  Free level: the
    ``n - 1`` differences ``G(q_{i,i+1}) - G(q_{i+1,i+2})``."""
    pts = closure_points(problem, phis)
    vals = problem.family.family_value(pts[:, 0], pts[:, 1])
    if k is None:
        k = problem.k
    if k is None:
        return vals[:-1] - vals[1:]
    return vals - k


# --- Newton machinery ---


def _fd_jacobian(fun, z: np.ndarray, h: float = 1e-7) -> np.ndarray:
    f0 = fun(z)
    jac = np.empty((len(f0), len(z)))
    for i in range(len(z)):
        e = np.zeros_like(z)
        e[i] = h
        jac[:, i] = (fun(z + e) - fun(z - e)) / (2.0 * h)
    return jac


def _newton(fun, z0: np.ndarray, tol: float, max_iter: int = 60, extra=None):
    """Damped Newton for square ``fun``; ``extra(z)`` may append equations."""
    z = np.array(z0, dtype=float)
    try:
        r = fun(z)
    except PonceletError:
        raise NoConvergence("seed outside the domain") from None
    for _ in range(max_iter):
        if np.max(np.abs(r)) <= tol:
            return z, r
        jac = _fd_jacobian(fun, z)
        try:
            dz = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            dz = np.linalg.lstsq(jac, -r, rcond=None)[0]
        lam = 1.0
        norm0 = np.linalg.norm(r)
        while lam >= 1.0 / 1024:
            trial = z + lam * dz
            try:
                rt = fun(trial)
            except PonceletError:
                rt = None
            if rt is not None and np.all(np.isfinite(rt)) and np.linalg.norm(rt) < norm0:
                break
            lam *= 0.5
        else:
            raise NoConvergence("line search failed")
        z, r = trial, rt
    if np.max(np.abs(r)) <= tol:
        return z, r
    raise NoConvergence(f"residual {np.max(np.abs(r)):.3e} after {max_iter} iterations")


def _normalise(phis: np.ndarray, relabel: bool = True) -> np.ndarray:
    """Wrap into ``[0, 2 pi)`` and unwrap forward from the first angle.

    With ``relabel`` the labels are first rotated so the smallest angle
    comes first.
    """
    phis = np.mod(np.asarray(phis, dtype=float), TWO_PI)
    if relabel:
        phis = np.roll(phis, -int(np.argmin(phis)))
    gaps = np.mod(np.diff(phis), TWO_PI)
    return np.concatenate([[phis[0]], phis[0] + np.cumsum(gaps)])


def _ordered(phis: np.ndarray) -> bool:
    gaps = np.mod(np.diff(np.append(phis, phis[0])), TWO_PI)
    return bool(np.all(gaps > 1e-6) and np.all(gaps < math.pi - 1e-9)
                and abs(gaps.sum() - TWO_PI) < 1e-9)


def symmetry_tag(points: np.ndarray, tol: float = SYMMETRY_TOL) -> str:
    """Reflection symmetries of a point set: axes, diagonals, both or none."""

    def invariant(f):
        img = f(points)
        d = np.hypot(img[:, None, 0] - points[None, :, 0], img[:, None, 1] - points[None, :, 1])
        return bool(np.all(d.min(axis=1) <= tol))

    axes = invariant(lambda p: p * [1, -1]) or invariant(lambda p: p * [-1, 1])
    diag = invariant(lambda p: p[:, ::-1]) or invariant(lambda p: -p[:, ::-1])
    if axes and diag:
        return "All"
    if axes:
        return "Axes"
    if diag:
        return "Diagonals"
    return "None"


def verify_dynamically(problem: ClosureProblem, sol: PeriodicOrbitSolution, tol: float = 1e-7) -> float:
    """Distance between the start vertex and its image after ``n`` Poncelet steps."""
    pair = problem.pair(sol.k)
    p0 = sol.points[-1]
    x, y = pair.outer.radial_point(math.atan2(p0[1], p0[0]))
    end, total = lift_power(pair, (float(x), float(y)), sol.period)
    err = math.hypot(end.x - x, end.y - y)
    if abs(total - TWO_PI) > 1e-6:
        return math.inf
    return err


def _finish(problem: ClosureProblem, phis: np.ndarray, k: float,
            relabel: bool = True) -> PeriodicOrbitSolution:
    phis = _normalise(phis, relabel)
    if not _ordered(phis):
        raise NoConvergence("solution is not a counterclockwise tangent polygon")
    res = float(np.max(np.abs(closure_residual(problem, phis, k))))
    if res > RESIDUAL_TOL:
        raise NoConvergence(f"residual {res:.3e} above {RESIDUAL_TOL}")
    pts = closure_points(problem, phis)
    sol = PeriodicOrbitSolution(phis, float(k), res, symmetry_tag(pts), pts)
    if verify_dynamically(problem, sol) > 1e-7:
        raise NoConvergence("closure solution is not a periodic orbit of the map")
    return sol


def solve_fixed_k(problem: ClosureProblem, seed_phis, tol: float = 1e-12) -> PeriodicOrbitSolution:
    """Newton on the ``n`` fixed-level closure equations from ``seed_phis``."""
    if problem.free:
        raise ValueError("solve_fixed_k needs a problem with a fixed level")
    k = problem.k
    scale = max(1.0, abs(k))
    z, _ = _newton(lambda z: closure_residual(problem, z, k) / scale,
                   np.asarray(seed_phis, dtype=float), tol)
    return _finish(problem, z, k)


def solve_free_k(problem: ClosureProblem, seed_phis, seed_k: float, phase_fix: float,
                 tol: float = 1e-12) -> PeriodicOrbitSolution:
    """Solve with the level as an unknown and ``phi_1 = phase_fix``.

    Unknowns ``(phi_1..phi_n, k)``; equations: the ``n`` fixed-level
    residuals plus the phase condition.  Sweeping ``phase_fix`` traces the
    one-parameter family of orbits and the interval of levels it covers.
    """
    n = problem.period

    def fun(z):
        r = closure_residual(problem, z[:n], z[n]) / max(1.0, abs(z[n]))
        return np.append(r, z[0] - phase_fix)

    z0 = np.append(np.asarray(seed_phis, dtype=float), seed_k)
    z0[:n] += phase_fix - z0[0]
    z, _ = _newton(fun, z0, tol)
    # keep the phase-fixed point first so sweeps stay on one labelling
    return _finish(problem, z[:n], z[n], relabel=False)


def uniform_seeds(period: int, count: int = 24) -> list[np.ndarray]:
    """Equally spaced tangency angles, rotated through ``count`` offsets."""
    base = TWO_PI * np.arange(period) / period
    return [base + TWO_PI * s / (count * period) for s in range(count)]


def rotation_seeds(pair: PonceletPair, period: int, count: int = 8) -> list[np.ndarray]:
    """Tangency angles read off actual orbits of the map.

    For each starting angle, the polar angles of the ``period`` tangency
    points along a forward orbit are used as a seed.
    """
    from .ovals import tangency_points

    seeds = []
    for s in range(count):
        p = pair.seed(TWO_PI * s / (count * period))
        phis = []
        for _ in range(period):
            q, _ = tangency_points(pair.inner, p)
            phis.append(math.atan2(q.y, q.x))
            p = poncelet_step(pair, p)
        seeds.append(np.unwrap(phis))
    return seeds


def distinct(solutions, tol: float = DEDUP_TOL) -> list[PeriodicOrbitSolution]:
    """Merge solutions whose vertex sets are within ``tol`` (Hausdorff)."""
    out: list[PeriodicOrbitSolution] = []
    for s in solutions:
        if not any(_same_orbit(s, t, tol) for t in out):
            out.append(s)
    return out


def _same_orbit(a: PeriodicOrbitSolution, b: PeriodicOrbitSolution, tol: float) -> bool:
    if a.period != b.period or abs(a.k - b.k) > tol * max(1.0, abs(a.k)):
        return False
    d = np.hypot(a.points[:, None, 0] - b.points[None, :, 0],
                 a.points[:, None, 1] - b.points[None, :, 1])
    return bool(max(d.min(axis=0).max(), d.min(axis=1).max()) <= tol)


def find_orbits_fixed_k(problem: ClosureProblem, seeds=None) -> list[PeriodicOrbitSolution]:
    """All distinct orbits reached from ``seeds``.

    The default seeds are tangency angles read off orbits of the map at the
    fixed level, followed by a uniform grid.
    """
    if seeds is None:
        seeds = []
        try:
            seeds += rotation_seeds(problem.pair(problem.k), problem.period, 48)
        except PonceletError:
            pass
        seeds += uniform_seeds(problem.period)
    found = []
    for s in seeds:
        try:
            found.append(solve_fixed_k(problem, s))
        except (NoConvergence, ParallelTangents):
            continue
    return distinct(found)


# --- symmetry images under the square's symmetry group ---


def _rotation(alpha):
    return lambda phis: (np.asarray(phis) + alpha, False)


def _diagonal(offset):
    # reflection in the line at angle offset/2 maps phi -> offset - phi
    return lambda phis: (offset - np.asarray(phis), True)


IMAGE_MAPS = {
    "rot0": _rotation(0.0),
    "rot90": _rotation(math.pi / 2),
    "rot180": _rotation(math.pi),
    "rot270": _rotation(3 * math.pi / 2),
    "diag": _diagonal(math.pi / 2),
    "antidiag": _diagonal(-math.pi / 2),
}

AXIS_MAPS = {
    "xaxis": _diagonal(0.0),
    "yaxis": _diagonal(math.pi),
}


def _dihedral_ok(problem: ClosureProblem) -> bool:
    ovals = (problem.inner, problem.family)
    return all(isinstance(o, Superellipse) for o in ovals)


def symmetry_images(problem: ClosureProblem, sol: PeriodicOrbitSolution,
                    include_axes: bool = False) -> list[PeriodicOrbitSolution]:
    """Images of ``sol`` under the rotations by multiples of ``pi/2`` and the
    two diagonal reflections, merged when they coincide.

    ``include_axes`` adds the two axis reflections (the remaining elements
    of the square's symmetry group).
    """
    if not _dihedral_ok(problem):
        raise ValueError("symmetry images need ovals invariant under the square's symmetries")
    maps = dict(IMAGE_MAPS)
    if include_axes:
        maps.update(AXIS_MAPS)
    fixed = problem.at(sol.k)
    images = []
    for f in maps.values():
        phis, reverse = f(sol.phis)
        if reverse:
            phis = phis[::-1]
        phis = _normalise(phis)
        res = float(np.max(np.abs(closure_residual(fixed, phis, sol.k))))
        if res > RESIDUAL_TOL:
            raise NoConvergence("symmetry image failed to re-verify")
        pts = closure_points(fixed, phis)
        images.append(PeriodicOrbitSolution(phis, sol.k, res, symmetry_tag(pts), pts))
    return distinct(images)


# --- continuation of the free-level family ---


def _branch_fun(problem: ClosureProblem):
    n = problem.period

    def fun(z):
        return closure_residual(problem, z[:n], z[n]) / max(1.0, abs(z[n]))

    return fun


def _tangent(jac: np.ndarray, prev: np.ndarray | None) -> np.ndarray:
    t = np.linalg.svd(jac)[2][-1]
    if prev is not None and t @ prev < 0.0:
        t = -t
    elif prev is None and t[0] < 0.0:
        t = -t
    return t


def _solution(problem: ClosureProblem, z: np.ndarray) -> PeriodicOrbitSolution:
    n = problem.period
    phis = _normalise(z[:n])
    pts = closure_points(problem, phis)
    res = float(np.max(np.abs(closure_residual(problem, phis, z[n]))))
    return PeriodicOrbitSolution(phis, float(z[n]), res, symmetry_tag(pts), pts)


def _arclength_step(fun, z: np.ndarray, t: np.ndarray, ds: float, tol: float):
    pred = z + ds * t

    def full(w):
        return np.append(fun(w), t @ (w - pred))

    z_new, _ = _newton(full, pred, tol, max_iter=12)
    return z_new, _tangent(_fd_jacobian(fun, z_new), t)


def pseudo_arclength(problem: ClosureProblem, sol: PeriodicOrbitSolution, ds: float = 1e-3,
                     steps: int = 100, direction: np.ndarray | None = None,
                     tol: float = 1e-12) -> list[PeriodicOrbitSolution]:
    """Follow the solution curve of the ``n`` closure equations in ``(phi, k)``.

    Predictor along the kernel of the Jacobian, corrector by Newton on the
    closure equations plus the arclength condition.  Passes through folds in
    ``k`` (the plateau endpoints) where fixed-level Newton degenerates.
    """
    fun = _branch_fun(problem.at(None))
    z = np.append(sol.phis, sol.k)
    t = _tangent(_fd_jacobian(fun, z), direction)
    out = []
    for _ in range(steps):
        z, t = _arclength_step(fun, z, t, ds, tol)
        out.append(_solution(problem, z))
    return out


def trace_branch(problem: ClosureProblem, start: PeriodicOrbitSolution, ds: float = 1e-2,
                 max_steps: int = 20000, tol: float = 1e-12) -> list[PeriodicOrbitSolution]:
    """Pseudo-arclength around the closed curve of orbits through ``start``.

    Stops when the branch returns to ``start``.  Steps are halved on
    corrector failure and regrown afterwards.
    """
    fun = _branch_fun(problem.at(None))
    # angles stay unwrapped during continuation; only the output is relabelled
    z = np.append(start.phis, start.k)
    t = _tangent(_fd_jacobian(fun, z), None)
    out = [start]
    travelled = 0.0
    h = ds
    for i in range(max_steps):
        try:
            z, t = _arclength_step(fun, z, t, h, tol)
        except (NoConvergence, ParallelTangents):
            h *= 0.5
            if h < 1e-6 * ds:
                raise
            continue
        travelled += h
        h = min(ds, 2.0 * h)
        sol = _solution(problem, z)
        out.append(sol)
        if (travelled > 20 * ds and abs(sol.k - start.k) <= ds
                and _same_orbit(sol, start, 5 * ds)):
            break
    else:
        raise NoConvergence("branch did not close within max_steps")
    return out


def refine_extremum(problem: ClosureProblem, sol: PeriodicOrbitSolution, kind: str,
                    width: float = 0.02, xatol: float = 1e-11) -> PeriodicOrbitSolution:
    """Polish a local extremum of ``k`` along the family in the phase ``phi_1``.

    At a fold in ``k`` the phase is still a regular parameter, so ``k``
    is a smooth function of ``phi_1`` near ``sol`` and a bounded scalar
    search over ``[phi_1 - width, phi_1 + width]`` applies.
    """
    from scipy.optimize import minimize_scalar

    free = problem.at(None)
    sign = 1.0 if kind == "min" else -1.0
    cache = {}

    def k_of(ph):
        try:
            s = solve_free_k(free, sol.phis - sol.phis[0] + ph, sol.k, ph)
        except (NoConvergence, ParallelTangents):
            # finite penalty: Brent's parabola step cannot take inf
            return sign * sol.k + 1.0
        cache[ph] = s
        return sign * s.k

    ph0 = sol.phis[0]
    res = minimize_scalar(k_of, bounds=(ph0 - width, ph0 + width), method="bounded",
                          options={"xatol": xatol})
    best = cache.get(res.x)
    if best is None or sign * best.k > sign * sol.k:
        best = sol
    return _symmetrize(problem, best)


def _branch_extremum(problem, branch, kind):
    ks = np.array([s.k for s in branch])
    i = int(np.argmin(ks) if kind == "min" else np.argmax(ks))
    steps = [abs(math.remainder(branch[j].phis[0] - branch[i].phis[0], TWO_PI))
             for j in (i - 1, (i + 1) % len(branch))]
    return refine_extremum(problem, branch[i], kind, width=max(steps + [1e-6]))


_REFLECTION_OFFSETS = (0.0, math.pi, math.pi / 2, -math.pi / 2)


def _symmetrize(problem: ClosureProblem, sol: PeriodicOrbitSolution,
                near: float = 1e-3) -> PeriodicOrbitSolution:
    """Snap a nearly reflection-symmetric orbit onto the symmetric one.

    Averaging the angles with those of the mirror image cancels the
    asymmetric part to first order; one free-level solve at the averaged
    phase then lands on the symmetric orbit.
    """
    if sol.symmetry != "None" or not _dihedral_ok(problem):
        return sol
    n = sol.period
    for off in _REFLECTION_OFFSETS:
        img = _normalise((off - sol.phis)[::-1])
        for shift in range(n):
            d = np.remainder(np.roll(img, shift) - sol.phis + math.pi, TWO_PI) - math.pi
            if np.max(np.abs(d)) < near:
                avg = sol.phis + 0.5 * d
                try:
                    snapped = solve_free_k(problem.at(None), avg, sol.k, avg[0])
                except (NoConvergence, ParallelTangents):
                    continue
                if snapped.symmetry != "None":
                    return snapped
    return sol


def _mirror_gap(sol: PeriodicOrbitSolution, offset: float) -> float:
    img = _normalise((offset - sol.phis)[::-1])
    return min(float(np.max(np.abs(np.remainder(np.roll(img, sh) - sol.phis + math.pi, TWO_PI)
                                   - math.pi)))
               for sh in range(sol.period))


def symmetric_orbits(problem: ClosureProblem, branch,
                     near: float = 0.05) -> list[PeriodicOrbitSolution]:
    """Reflection-symmetric orbits along a traced branch.

    Local minima of the distance between an orbit and its mirror image
    (for each of the four reflection lines) are snapped onto the exact
    symmetric orbit; duplicates are merged and results sorted by level.
    """
    found = []
    for off in _REFLECTION_OFFSETS:
        gaps = np.array([_mirror_gap(s, off) for s in branch])
        m = len(gaps)
        for i in range(m):
            if gaps[i] < near and gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[(i + 1) % m]:
                snapped = _symmetrize(problem, branch[i], near)
                if snapped.symmetry != "None":
                    found.append(snapped)
    return sorted(distinct(found), key=lambda s: s.k)


def level_range(problem: ClosureProblem, start: PeriodicOrbitSolution,
                ds: float = 1e-2) -> tuple[PeriodicOrbitSolution, PeriodicOrbitSolution]:
    """Orbits at the smallest and largest level reached by the family of ``start``."""
    branch = trace_branch(problem, start, ds)
    return _branch_extremum(problem, branch, "min"), _branch_extremum(problem, branch, "max")


def free_k_sweep(problem: ClosureProblem, start: PeriodicOrbitSolution, phases,
                 cond_limit: float = 1e10, ds: float = 1e-3) -> list[PeriodicOrbitSolution]:
    """Natural continuation in the phase ``phi_1`` over ``phases``.

    Each solve is seeded by the previous solution.  A phase whose solve
    fails, or whose Jacobian condition number exceeds ``cond_limit``, is
    retried from the nearest point of a pseudo-arclength trace of the
    branch; phases that still fail are skipped.
    """
    free = problem.at(None)
    n = problem.period
    out = []
    cur = start
    branch = None
    for ph in phases:
        try:
            sol = solve_free_k(free, cur.phis - cur.phis[0] + ph, cur.k, ph)
            jac = _fd_jacobian(_branch_fun(free), np.append(sol.phis, sol.k))
            if np.linalg.cond(np.vstack([jac, np.eye(n + 1)[0]])) > cond_limit:
                raise NoConvergence("ill-conditioned phase parametrisation")
        except (NoConvergence, ParallelTangents):
            if branch is None:
                branch = trace_branch(problem, start, max(ds, 1e-2))
            near = min(branch, key=lambda s: abs(math.remainder(s.phis[0] - ph, TWO_PI))
                       + abs(s.k - cur.k))
            try:
                sol = solve_free_k(free, near.phis - near.phis[0] + ph, near.k, ph)
            except (NoConvergence, ParallelTangents):
                continue
        out.append(sol)
        cur = sol
    return out


def level_interval(solutions) -> tuple[float, float]:
    ks = [s.k for s in solutions]
    return min(ks), max(ks)


# --- the axis-symmetric 3-periodic orbit of x^4 + y^4 through (0, 1) ---

# R(y) = y^12 (1 - y^4)^3 + y^12 (1 - y^3)^4 - (1 - y^4)^3, highest degree first
R_COEFFS = (-4, 3, 0, 6, 0, -3, -4, 0, 0, 3, 0, 0, 0, -3, 0, 0, 0, 3, 0, 0, 0, -1)


def poly_mul(a, b):
    """Product of integer polynomials given highest degree first."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_divmod(num, den):
    """Exact polynomial long division over the rationals."""
    num = [Fraction(c) for c in num]
    q = []
    while len(num) >= len(den):
        c = num[0] / den[0]
        q.append(c)
        for i, d in enumerate(den):
            num[i] -= c * d
        num.pop(0)
    return q, num


def poly_eval(coeffs, y):
    acc = 0
    for c in coeffs:
        acc = acc * y + c
    return acc


# -(y - 1)^4 (y^2 + y + 1)
_R_FACTOR = [-c for c in poly_mul(poly_mul(poly_mul([1, -1], [1, -1]),
                                           poly_mul([1, -1], [1, -1])), [1, 1, 1])]


def r15_coefficients() -> list[int]:
    q, rem = poly_divmod(R_COEFFS, _R_FACTOR)
    if any(rem):
        raise ArithmeticError("R is not divisible by (y - 1)^4 (y^2 + y + 1)")
    if any(c.denominator != 1 for c in q):
        raise ArithmeticError("quotient is not an integer polynomial")
    return [int(c) for c in q]


def r_polynomial_eval(y) -> float:
    """``R(y)`` from its integer coefficients (exact for int/Fraction input)."""
    return poly_eval(R_COEFFS, y)


def r_polynomial_roots(tol: float = 1e-15) -> tuple[float, float]:
    """Unique real root ``y1*`` of ``R_15`` and the level ``k* = y1*^-12``.

    Sign bisection on ``[-1, 0]`` followed by Newton polishing.
    """
    r15 = r15_coefficients()
    dr15 = [c * (len(r15) - 1 - i) for i, c in enumerate(r15[:-1])]
    a, b = -1.0, 0.0
    fa = poly_eval(r15, a)
    if fa * poly_eval(r15, b) > 0:
        raise ArithmeticError("no sign change of R15 on [-1, 0]")
    while b - a > 1e-12:
        m = 0.5 * (a + b)
        fm = poly_eval(r15, m)
        if fm * fa <= 0:
            b = m
        else:
            a, fa = m, fm
    y = 0.5 * (a + b)
    for _ in range(5):
        step = poly_eval(r15, y) / poly_eval(dr15, y)
        y -= step
        if abs(step) < tol:
            break
    return y, 1.0 / y ** 12


def sturm_count(coeffs, a, b) -> int:
    """Number of distinct real roots in ``(a, b]`` by a Sturm sequence (exact)."""
    p0 = [Fraction(c) for c in coeffs]
    p1 = [c * (len(p0) - 1 - i) for i, c in enumerate(p0[:-1])]
    seq = [p0, p1]
    while len(seq[-1]) > 1 or (seq[-1] and seq[-1][0] != 0):
        _, rem = poly_divmod(seq[-2], seq[-1])
        while rem and rem[0] == 0:
            rem.pop(0)
        if not rem:
            break
        seq.append([-c for c in rem])
        if len(rem) == 1:
            break

    def changes(x):
        vals = [poly_eval(p, Fraction(x)) for p in seq]
        vals = [v for v in vals if v != 0]
        return sum(1 for u, v in zip(vals, vals[1:]) if (u < 0) != (v < 0))

    return changes(a) - changes(b)


def axis_symmetric_triangle(y1: float) -> np.ndarray:
    """Tangency angles on ``x^4 + y^4 = 1`` at ``(x1, y1), (0, 1), (-x1, y1)``."""
    x1 = (1.0 - y1 ** 4) ** 0.25
    return np.array([math.atan2(y1, x1), math.pi / 2, math.atan2(y1, -x1)])


def kstar_orbit() -> tuple[ClosureProblem, PeriodicOrbitSolution]:
    """The 3-periodic orbit built from the root of ``R_15`` at ``k = k*``."""
    y1, kstar = r_polynomial_roots()
    problem = ClosureProblem(3, Superellipse(4.0, 1.0), Superellipse(4.0, 1.0), kstar)
    return problem, _finish(problem, axis_symmetric_triangle(y1), kstar)


def verify_condition_2n(n: float, m: float) -> bool:
    """``2n (2m - 1) = 2m``: the tangency system has a real solution."""
    if not (n > 0.5 and m > 0.5):
        raise ValueError("n and m must exceed 1/2")
    return math.isclose(2.0 * n * (2.0 * m - 1.0), 2.0 * m, rel_tol=1e-12, abs_tol=1e-12)


def periodic_points_check(pair: PonceletPair, points, period: int, tol: float = 1e-9) -> float:
    """Max on-curve and return residual of an explicit candidate orbit."""
    worst = 0.0
    for p in points:
        p = Point2(float(p[0]), float(p[1]))
        worst = max(worst, abs(float(pair.outer.value(p.x, p.y))))
        q = p
        for _ in range(period):
            q = poncelet_step(pair, q)
            worst = max(worst, abs(float(pair.outer.value(q.x, q.y))))
        worst = max(worst, math.hypot(q.x - p.x, q.y - p.y))
    return worst
