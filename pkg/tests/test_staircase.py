import csv
import json
import math

import numpy as np
import pytest

from poncelet.ovals import Superellipse
from poncelet.periodic import ClosureProblem, find_orbits_fixed_k, level_range
from poncelet.rotation import RotationEstimate, rotation_number
from poncelet.staircase import (
    PlateauInterval,
    RhoTable,
    circle_family,
    make_grid,
    plateau_detect,
    plateaus_json,
    quartic_family,
    rho_sweep,
)


def synthetic(values, err=1e-12, cap=64):
    from poncelet.rotation import rational_identify

    ests = [RotationEstimate(v, err, 1, rational_identify(v, err, cap)) for v in values]
    return RhoTable(None, np.linspace(1.0, 2.0, len(values)), ests)


def test_constant_table_is_one_plateau():
    table = synthetic([0.25] * 10)
    (p,) = plateau_detect(table)
    assert p.rational == (1, 4)
    assert (p.k_lo, p.k_hi) == (1.0, 2.0)
    assert p.confidence == 10 and p.resolution is None


def test_short_runs_ignored():
    table = synthetic([0.2, 0.25, 0.25, 0.3, 1 / 3, 1 / 3, 1 / 3, 0.4])
    (p,) = plateau_detect(table)
    assert p.rational == (1, 3)
    assert plateau_detect(table, min_run=2)[0].rational == (1, 4)


def test_denominator_cap():
    table = synthetic([3 / 17] * 5)
    assert plateau_detect(table, max_denominator=16) == []
    assert plateau_detect(table, max_denominator=17)[0].rational == (3, 17)


def test_table_validation():
    with pytest.raises(ValueError):
        RhoTable(None, [1.0, 1.0], [None, None])
    with pytest.raises(ValueError):
        RhoTable(None, [1.0, 2.0], [None])


@pytest.mark.parametrize("rational", [(2, 8), (1, 2), (0, 1)])
def test_plateau_rational_validation(rational):
    with pytest.raises(ValueError):
        PlateauInterval(rational, 1.0, 2.0, 3)


def test_make_grid():
    g = make_grid(1.9, 8.1, 0.05)
    assert len(g) == 125 and g[0] == 1.9 and g[-1] == pytest.approx(8.1)
    with pytest.raises(ValueError):
        make_grid(2.0, 1.0, 0.1)


def test_concentric_has_no_plateau():
    table = rho_sweep(circle_family(), make_grid(1.5, 9.0, 0.25))
    assert plateau_detect(table) == []
    vals = [e.value for e in table.estimates]
    assert vals == sorted(vals)


def test_quarter_interval():
    table = rho_sweep(quartic_family(), make_grid(1.9, 8.1, 0.05))
    interior = [e.rational_id for k, e in zip(table.grid, table.estimates) if 2.0 <= k <= 8.0]
    assert set(interior) == {(1, 4)}
    (p,) = plateau_detect(table)
    assert p.rational == (1, 4)
    assert p.k_lo <= 2.0 + 1e-3 and p.k_hi >= 8.0 - 1e-3
    assert not table.metadata["monotonicity_violations"]


def test_third_at_twenty():
    assert rotation_number(quartic_family().pair(20.0)).rational_id == (1, 3)


def test_bisection_brackets_continuation():
    # two independent routes to the 1/3 plateau: rotation sign tests and orbit continuation
    table = rho_sweep(quartic_family(), make_grid(19.7, 20.7, 0.05))
    (p,) = [q for q in plateau_detect(table) if q.rational == (1, 3)]
    q4 = Superellipse(4.0, 1.0)
    problem = ClosureProblem(3, q4, q4, 20.2)
    lo, hi = level_range(problem, find_orbits_fixed_k(problem)[0])
    assert abs(p.k_lo - lo.k) <= 1e-2
    assert abs(p.k_hi - hi.k) <= 1e-2


def test_csv_and_json(tmp_path):
    table = rho_sweep(quartic_family(), [2.0, 3.0, 9.0])
    path = tmp_path / "rho.csv"
    table.write_csv(path)
    rows = list(csv.reader(open(path, encoding="utf-8")))
    assert rows[0] == ["k", "rho", "err", "j", "n"]
    assert rows[1] == ["2", "0.25", "0", "1", "4"]
    rho = rows[3][1]
    assert len(rho.replace("0.", "", 1).lstrip("0")) == 17
    assert float(rho) == table.estimates[2].value
    assert rows[3][3] == "" and rows[3][4] == ""

    plateaus = [PlateauInterval((1, 4), 2.0, 8.0, 121, 1e-3)]
    text = plateaus_json(plateaus, tmp_path / "p.json")
    assert json.loads(text) == [{"confidence": 121, "j": 1, "k_hi": 8.0, "k_lo": 2.0,
                                 "n": 4, "resolution": 0.001}]
    assert (tmp_path / "p.json").read_text(encoding="utf-8") == text + "\n"


def test_failures_recorded():
    # k below 1 is not a nested pair: recorded, not raised
    table = rho_sweep(quartic_family(), [0.5, 2.0])
    assert table.estimates[0] is None and 0.5 in table.failures
    assert math.isnan(list(table.rows())[0][1])
