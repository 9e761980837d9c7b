"""Rotation function sweeps and rational plateaus."""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import PonceletPair
from .errors import PonceletError
from .ovals import ImplicitOval, Superellipse, circle
from .rotation import RotationEstimate, rational_side, rotation_number


@dataclass(frozen=True)
class OvalFamily:
    """Inner oval plus the outer levels ``{G = k}`` of ``family``."""

    inner: ImplicitOval
    family: ImplicitOval
    name: str = ""

    def pair(self, k: float) -> PonceletPair:
        return PonceletPair(self.inner, self.family.with_level(k))


def quartic_family() -> OvalFamily:
    return OvalFamily(Superellipse(4.0, 1.0), Superellipse(4.0, 1.0), "quartic")


def circle_family() -> OvalFamily:
    return OvalFamily(circle(1.0), circle(1.0), "circles")


@dataclass
class RhoTable:
    family: OvalFamily | None
    grid: np.ndarray
    estimates: list
    failures: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if len(self.grid) != len(self.estimates):
            raise ValueError("grid and estimates differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")

    def rows(self):
        for k, e in zip(self.grid, self.estimates):
            if e is None:
                yield float(k), math.nan, math.nan, None, None
            else:
                j, n = e.rational_id or (None, None)
                yield float(k), e.value, e.error_bound, j, n

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "rho", "err", "j", "n"])
            for k, rho, err, j, n in self.rows():
                w.writerow([f"{k:.17g}", f"{rho:.17g}", f"{err:.17g}",
                            "" if j is None else j, "" if n is None else n])


@dataclass(frozen=True)
class PlateauInterval:
    """``rho == j/n`` on ``[k_lo, k_hi]``.

    ``k_lo`` and ``k_hi`` are confirmed members of the plateau; the true
    endpoints lie within ``resolution`` outside them (when refined).
    """

    rational: tuple[int, int]
    k_lo: float
    k_hi: float
    confidence: int
    resolution: float | None = None

    def __post_init__(self):
        j, n = self.rational
        if not self.k_lo <= self.k_hi:
            raise ValueError("k_lo must not exceed k_hi")
        if math.gcd(j, n) != 1 or not 0 < j / n < 0.5:
            raise ValueError(f"bad plateau rational {j}/{n}")

    @property
    def width(self) -> float:
        return self.k_hi - self.k_lo

    def as_dict(self) -> dict:
        j, n = self.rational
        return {"j": j, "n": n, "k_lo": self.k_lo, "k_hi": self.k_hi,
                "confidence": self.confidence, "resolution": self.resolution}


def rho_sweep(family: OvalFamily, grid, **estimator) -> RhoTable:
    """Rotation estimates along ``grid``; failed points are recorded and skipped.

    ``estimator`` is passed to :func:`rotation_number` (default
    ``tol=1e-8``; plateau points are certified exactly regardless of
    ``tol``, so sweeps need less than single-point runs).  Decreases beyond
    twice the combined error bounds are reported as a warning and kept in
    ``metadata["monotonicity_violations"]``.
    """
    grid = np.asarray(grid, dtype=float)
    estimator.setdefault("tol", 1e-8)
    ests: list[RotationEstimate | None] = []
    failures = {}
    for k in grid:
        try:
            ests.append(rotation_number(family.pair(float(k)), **estimator))
        except (PonceletError, ArithmeticError) as exc:
            ests.append(None)
            failures[float(k)] = f"{type(exc).__name__}: {exc}"
    table = RhoTable(family, grid, ests, failures)
    table.metadata["monotonicity_violations"] = _monotonicity(table)
    if table.metadata["monotonicity_violations"]:
        warnings.warn("rotation estimates decrease along the grid", RuntimeWarning, stacklevel=2)
    return table


def _monotonicity(table: RhoTable) -> list[float]:
    bad = []
    prev = None
    for k, e in zip(table.grid, table.estimates):
        if e is None:
            continue
        if prev is not None and e.value < prev.value - 2 * (e.error_bound + prev.error_bound) - 1e-12:
            bad.append(float(k))
        prev = e
    return bad


def _runs(table: RhoTable, max_denominator: int):
    ids = []
    for e in table.estimates:
        rid = e.rational_id if e is not None else None
        if rid is not None and (rid[1] > max_denominator or not 0 < rid[0] / rid[1] < 0.5):
            rid = None
        ids.append(rid)
    i = 0
    while i < len(ids):
        if ids[i] is None:
            i += 1
            continue
        j = i
        while j + 1 < len(ids) and ids[j + 1] == ids[i]:
            j += 1
        yield ids[i], i, j
        i = j + 1


def _in_plateau(family: OvalFamily, rid, k: float) -> bool:
    try:
        return rational_side(family.pair(k), *rid) == 0
    except (PonceletError, ArithmeticError):
        return False


def _bisect_edge(family, rid, inside: float, outside: float, resolution: float) -> float:
    while abs(outside - inside) > resolution:
        mid = 0.5 * (inside + outside)
        if _in_plateau(family, rid, mid):
            inside = mid
        else:
            outside = mid
    return inside


def plateau_detect(table: RhoTable, max_denominator: int = 64, min_run: int = 3,
                   resolution: float | None = 1e-3) -> list[PlateauInterval]:
    """Maximal runs of ``min_run`` or more grid points identified to one rational.

    With a family attached and ``resolution`` set, each end is pushed
    outwards by bisection between the last grid point of the run and the
    next grid point, using the exact sign test for ``rho == j/n``.
    """
    out = []
    grid = table.grid
    refine = table.family is not None and resolution is not None
    for rid, i, j in _runs(table, max_denominator):
        if j - i + 1 < min_run:
            continue
        q = Fraction(*rid)
        rid = (q.numerator, q.denominator)
        lo, hi = float(grid[i]), float(grid[j])
        if refine:
            if i > 0:
                lo = _bisect_edge(table.family, rid, lo, float(grid[i - 1]), resolution)
            if j + 1 < len(grid):
                hi = _bisect_edge(table.family, rid, hi, float(grid[j + 1]), resolution)
        out.append(PlateauInterval(rid, lo, hi, j - i + 1, resolution if refine else None))
    return out


def plateaus_json(plateaus, path=None) -> str:
    text = json.dumps([p.as_dict() for p in plateaus], sort_keys=True, indent=2,
                      ensure_ascii=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return text


# grid presets: (start, stop, step)
GRIDS = {
    "coarse": (1.4, 21.0, 0.05),
    "sixth": (1.55, 1.57, 1e-4),
    "quarter": (1.9, 8.1, 0.05),
    "third": (19.5, 20.8, 0.01),
}


def make_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive uniform grid; the count is rounded so float steps do not drop ``stop``."""
    if not step > 0 or not stop > start:
        raise ValueError("need step > 0 and stop > start")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)
