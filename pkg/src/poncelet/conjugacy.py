"""Invariant densities, flow times and conjugacy verdicts.

If ``mu > 0`` solves ``mu(P(p)) = det DP(p) mu(p)`` on a neighbourhood of
the outer oval, the flow ``p' = mu(p) (-V_y, V_x)`` commutes with the
planar map and ``P`` is conjugate to the rotation by ``tau / T`` where
``T`` is the period of the level curve and ``tau`` the flow time from
``q`` to ``P(q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .core import PonceletPair, jacobian, lift_power, planar_step, poncelet_step
from .errors import EventMissed, PonceletError
from .ovals import Superellipse
from .rotation import RotationEstimate, rotation_number

TWO_PI = 2.0 * math.pi
FUNCTIONAL_EQ_TOL = 1e-6
WITNESS_THRESHOLD = 1e-4


@dataclass(frozen=True)
class DensityCandidate:
    """Candidate invariant density ``mu(x, y)``.

    ``provenance`` is one of ``"Constant"``, ``"EllipseClosedForm"``,
    ``"UserSupplied"``.
    """

    evaluator: Callable[[float, float], float]
    provenance: str = "UserSupplied"

    def __call__(self, x, y):
        return self.evaluator(x, y)


def constant_density(c: float = 1.0) -> DensityCandidate:
    if not c > 0:
        raise ValueError("density must be positive")
    return DensityCandidate(lambda x, y: c + 0.0 * x, "Constant")


def ellipse_density(pair: PonceletPair) -> DensityCandidate:
    """``sqrt((x^2 + y^2) g(x, y))`` for an inner oval ``g = 0`` in circles."""
    g = pair.inner.value
    return DensityCandidate(lambda x, y: np.sqrt((x * x + y * y) * g(x, y)),
                            "EllipseClosedForm")


def default_candidates(pair: PonceletPair) -> list[DensityCandidate]:
    cands = [constant_density()]
    if isinstance(pair.outer, Superellipse) and pair.outer.p == 2.0:
        cands.append(ellipse_density(pair))
    return cands


def functional_eq_residual(pair: PonceletPair, mu: DensityCandidate, p) -> float:
    """``|mu(P(p)) - det DP(p) mu(p)| / mu(p)`` for the planar extension of P."""
    x, y = float(p[0]), float(p[1])
    m0 = float(mu(x, y))
    if not m0 > 0.0:
        raise ValueError(f"density is not positive at {(x, y)}")
    img = planar_step(pair, (x, y))
    d = float(np.linalg.det(jacobian(pair, (x, y))))
    return abs(float(mu(img.x, img.y)) - d * m0) / m0


def annulus_samples(pair: PonceletPair, count: int, rng: np.random.Generator,
                    width: float = 0.05) -> np.ndarray:
    """Random points on levels near ``k`` (kept clear of the inner oval)."""
    k = pair.k
    floor = pair.inner_level_max()
    half = min(width * k, 0.5 * (k - floor))
    levels = k + half * rng.uniform(-1.0, 1.0, count)
    theta = rng.uniform(0.0, TWO_PI, count)
    pts = np.empty((count, 2))
    for i, (lv, th) in enumerate(zip(levels, theta)):
        x, y = pair.outer.with_level(lv).radial_point(th)
        pts[i] = float(x), float(y)
    return pts


def max_functional_eq_residual(pair: PonceletPair, mu: DensityCandidate, points) -> float:
    return max(functional_eq_residual(pair, mu, p) for p in points)


# --- flow times ---


def _flow_field(pair: PonceletPair, mu: DensityCandidate):
    grad = pair.outer.grad

    def rhs(_t, s):
        x, y = s[0], s[1]
        gx, gy = grad(x, y)
        m = mu(x, y)
        dx, dy = -m * gy, m * gx
        return [dx, dy, (x * dy - y * dx) / (x * x + y * y)]

    return rhs


def flow_times(pair: PonceletPair, mu: DensityCandidate, q, target, rtol: float = 1e-12,
               drift_tol: float = 1e-7) -> tuple[float, float]:
    """Return ``(T, tau)``: period of ``{V = k}`` and time from ``q`` to ``target``.

    Integrates the flow with an 8th order Runge-Kutta scheme, tracking the
    lifted polar angle as a third state so both times are angle events.
    """
    q = np.asarray(q, dtype=float)
    target = np.asarray(target, dtype=float)
    k = pair.k
    th0 = math.atan2(q[1], q[0])
    th_target = th0 + (math.atan2(target[1], target[0]) - th0) % TWO_PI

    def full_turn(_t, s):
        return s[2] - th0 - TWO_PI

    def reach(_t, s):
        return s[2] - th_target

    full_turn.terminal = True
    full_turn.direction = 1
    reach.direction = 1
    rhs = _flow_field(pair, mu)
    # rough period bound from the angular speed at q
    speed = abs(rhs(0.0, [q[0], q[1], th0])[2])
    t_max = 50.0 * TWO_PI / speed
    sol = solve_ivp(rhs, (0.0, t_max), [q[0], q[1], th0], method="DOP853", rtol=rtol,
                    atol=rtol * 1e-2, events=(full_turn, reach), dense_output=True)
    if not sol.t_events[0].size or not sol.t_events[1].size:
        raise EventMissed("flow did not complete a turn")
    T = float(sol.t_events[0][0])
    tau = float(sol.t_events[1][0])
    drift = np.abs(pair.outer.family_value(sol.y[0], sol.y[1]) - k).max()
    if drift > drift_tol * max(1.0, abs(k)):
        raise EventMissed(f"flow drifted {drift:.2e} off the level curve")
    hit = sol.y_events[1][0]
    if math.hypot(hit[0] - target[0], hit[1] - target[1]) > 1e-7 * max(1.0, np.hypot(*target)):
        raise EventMissed("angle event does not land on the target point")
    return T, tau


def flow_times_quadrature(pair: PonceletPair, mu: DensityCandidate, q, target) -> tuple[float, float]:
    """Same times as :func:`flow_times` by quadrature in the polar angle.

    Along the level curve ``dt = r^2 / (mu p . grad V) d theta``.
    """
    outer = pair.outer

    def dt(theta):
        x, y = outer.radial_point(theta)
        gx, gy = outer.grad(x, y)
        return (x * x + y * y) / (float(mu(x, y)) * (x * gx + y * gy))

    th0 = math.atan2(q[1], q[0])
    th1 = th0 + (math.atan2(target[1], target[0]) - th0) % TWO_PI
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
    tau = quad(dt, th0, th1, **opts)[0]
    T = tau + quad(dt, th1, th0 + TWO_PI, **opts)[0]
    return T, tau


# --- verdict ---


@dataclass
class ConjugacyReport:
    functional_eq_max_residual: float
    verdict: str
    T_k: float | None = None
    tau_k: float | None = None
    tau_spread: float | None = None
    rho_flow: float | None = None
    displacement: float | None = None
    candidate: str | None = None
    rotation: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "functional_eq_max_residual": self.functional_eq_max_residual,
            "verdict": self.verdict,
            "T_k": self.T_k,
            "tau_k": self.tau_k,
            "tau_spread": self.tau_spread,
            "rho_flow": self.rho_flow,
            "displacement": self.displacement,
            "candidate": self.candidate,
            "rotation": self.rotation,
        }


def power_displacement(pair: PonceletPair, j: int, n: int, seeds: int = 64) -> float:
    """``max |lift(P^n p) - lift(p) - 2 pi j|`` over ``seeds`` equally spaced points."""
    worst = 0.0
    for th in np.linspace(0.0, TWO_PI, seeds, endpoint=False):
        _, total = lift_power(pair, pair.seed(th), n)
        worst = max(worst, abs(total - TWO_PI * j))
    return worst


def conjugacy_verdict(pair: PonceletPair, candidates=None, samples: int = 64,
                      flow_seeds: int = 8, seed: int = 0,
                      rotation: RotationEstimate | None = None) -> ConjugacyReport:
    """Certify conjugacy to a rotation or produce a non-conjugacy witness.

    ``CertifiedRotation`` is certified at sampling resolution only: the
    functional equation is checked on ``samples`` random points near the
    outer oval.
    """
    rng = np.random.default_rng(seed)
    if candidates is None:
        candidates = default_candidates(pair)
    pts = annulus_samples(pair, samples, rng)
    if rotation is None:
        rotation = rotation_number(pair)
    best = math.inf
    for mu in candidates:
        try:
            res = max_functional_eq_residual(pair, mu, pts)
        except (PonceletError, ArithmeticError, ValueError):
            continue
        best = min(best, res)
        if res <= FUNCTIONAL_EQ_TOL:
            T, taus = _flow_stats(pair, mu, flow_seeds)
            tau = float(np.mean(taus))
            return ConjugacyReport(res, "CertifiedRotation", T, tau,
                                   float(np.ptp(taus)), tau / T, None, mu.provenance,
                                   rotation.as_dict())
    if rotation.rational_id is not None:
        j, n = rotation.rational_id
        delta = power_displacement(pair, j, n)
        if delta > WITNESS_THRESHOLD:
            return ConjugacyReport(best, "NonConjugacyWitness", displacement=delta,
                                   rotation=rotation.as_dict())
    return ConjugacyReport(best, "Inconclusive", rotation=rotation.as_dict())


def _flow_stats(pair: PonceletPair, mu: DensityCandidate, seeds: int):
    Ts, taus = [], []
    for th in np.linspace(0.0, TWO_PI, seeds, endpoint=False) + 0.1:
        q = pair.seed(th)
        T, tau = flow_times(pair, mu, q, poncelet_step(pair, q))
        Ts.append(T)
        taus.append(tau)
    return float(np.mean(Ts)), np.array(taus)


# --- invariant measure ---


def invariant_measure_check(pair: PonceletPair, mu: DensityCandidate, boxes: int = 10,
                            samples: int = 100_000, half: float = 0.05,
                            seed: int = 0) -> list[tuple[float, float, float]]:
    """Monte Carlo ``(nu(B), nu(P^-1 B), standard error)`` for random boxes.

    ``nu`` has density ``1 / mu``.  ``P^-1(B)`` is sampled as
    ``{z : P(z) in B}`` inside the bounding box of the inverse image of
    the boundary of ``B``.
    """
    rng = np.random.default_rng(seed)
    floor = pair.inner_level_max()
    out = []
    while len(out) < boxes:
        c = annulus_samples(pair, 1, rng)[0]
        lo, hi = c - half, c + half
        edge = _box_edge(lo, hi, 64)
        if np.min(pair.outer.family_value(edge[:, 0], edge[:, 1])) <= floor + 0.1 * (pair.k - floor):
            continue
        pre = np.array([planar_step(pair, p, forward=False) for p in edge])
        plo, phi = pre.min(axis=0), pre.max(axis=0)
        margin = 0.05 * (phi - plo)
        plo, phi = plo - margin, phi + margin
        w = rng.uniform(lo, hi, (samples, 2))
        fb = 1.0 / mu(w[:, 0], w[:, 1])
        area = np.prod(hi - lo)
        nu_b, se_b = area * fb.mean(), area * fb.std(ddof=1) / math.sqrt(samples)
        z = rng.uniform(plo, phi, (samples, 2))
        vals = np.zeros(samples)
        for i, p in enumerate(z):
            try:
                img = planar_step(pair, p)
            except PonceletError:
                continue
            if lo[0] <= img.x <= hi[0] and lo[1] <= img.y <= hi[1]:
                vals[i] = 1.0 / float(mu(p[0], p[1]))
        parea = np.prod(phi - plo)
        nu_p, se_p = parea * vals.mean(), parea * vals.std(ddof=1) / math.sqrt(samples)
        out.append((float(nu_b), float(nu_p), float(math.hypot(se_b, se_p))))
    return out


def _box_edge(lo, hi, per_side: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, per_side, endpoint=False)
    (x0, y0), (x1, y1) = lo, hi
    sides = [np.column_stack([x0 + (x1 - x0) * t, np.full_like(t, y0)]),
             np.column_stack([np.full_like(t, x1), y0 + (y1 - y0) * t]),
             np.column_stack([x1 - (x1 - x0) * t, np.full_like(t, y1)]),
             np.column_stack([np.full_like(t, x0), y1 - (y1 - y0) * t])]
    return np.vstack(sides)


# --- the parabolic 4-cycle of the circle inside x^4 + y^4 = 2 ---


def power_lift_excess(pair: PonceletPair, j: int, n: int, grid: int = 1024) -> np.ndarray:
    """``lift(P^n(theta)) - theta - 2 pi j`` on a uniform grid of polar angles."""
    out = np.empty(grid)
    for i, th in enumerate(np.linspace(0.0, TWO_PI, grid, endpoint=False)):
        _, total = lift_power(pair, pair.seed(th), n)
        out[i] = total - TWO_PI * j
    return out


def omega_limit_distance(pair: PonceletPair, seeds, iterations: int, targets) -> np.ndarray:
    """Distance from ``P^iterations(seed)`` to the nearest of ``targets``."""
    targets = np.asarray(targets, dtype=float)
    out = []
    for s in seeds:
        end, _ = lift_power(pair, s, iterations)
        out.append(np.min(np.hypot(targets[:, 0] - end.x, targets[:, 1] - end.y)))
    return np.array(out)


def square_corners() -> np.ndarray:
    return np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


__all__ = [
    "DensityCandidate",
    "ConjugacyReport",
    "constant_density",
    "ellipse_density",
    "functional_eq_residual",
    "flow_times",
    "flow_times_quadrature",
    "conjugacy_verdict",
    "invariant_measure_check",
    "power_displacement",
    "power_lift_excess",
    "omega_limit_distance",
    "square_corners",
    "annulus_samples",
    "max_functional_eq_residual",
    "default_candidates",
]
