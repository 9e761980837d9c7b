import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from poncelet.core import PonceletPair
from poncelet.errors import InvalidOval
from poncelet.ovals import Conic, Superellipse, circle

settings.register_profile(
    "pkg", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("pkg")


@pytest.fixture
def quartic():
    return Superellipse(4.0, 1.0)


@pytest.fixture
def quartic_pair():
    return lambda k: PonceletPair(Superellipse(4.0, 1.0), Superellipse(4.0, k))


@pytest.fixture
def circles():
    return lambda k: PonceletPair(circle(1.0), Superellipse(2.0, k))


def random_ellipse(rng: np.random.Generator) -> Conic:
    """An ellipse strictly inside the unit circle containing the origin."""
    while True:
        a = rng.uniform(0.15, 0.7)
        b = rng.uniform(0.1, a)
        cx, cy = rng.uniform(-0.25, 0.25, 2)
        try:
            c = Conic.from_axes(a, b, cx, cy, rng.uniform(0.0, math.pi))
        except InvalidOval:
            continue
        th = np.linspace(0.0, 2 * math.pi, 512, endpoint=False)
        x, y = c.radial_point(th)
        if c.F < 0 and np.max(np.hypot(x, y)) < 0.9:
            return c


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
