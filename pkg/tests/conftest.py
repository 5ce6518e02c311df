from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from hpwspd.harness import lower_bound_instance, random_unit_cube
from hpwspd.metric import EuclideanMetric
from hpwspd.pipeline import build_pipeline

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def lb_build(s=3.0, eps=0.0, k=None):
    lb = lower_bound_instance(s, eps, k)
    b = build_pipeline(EuclideanMetric(lb.points), s, root_cube=lb.root_cube, tie_break=lb.tie_break)
    return lb, b


def uniform_build(n, d, s, seed=0):
    return build_pipeline(EuclideanMetric(random_unit_cube(n, d, seed)), s)


@pytest.fixture(scope="session")
def lb_default():
    """Lower-bound instance at the default exponent (k = 5 for s = 3)."""
    return lb_build()


@pytest.fixture(scope="session")
def lb_separated():
    """Same instance with α = 1/64, where {S(a), S(b)} is well-separated."""
    return lb_build(k=6)


@pytest.fixture(scope="session")
def small_euclid():
    return uniform_build(64, 2, 4.0, seed=3)


def point_sets(max_n=24, max_d=3):
    """Hypothesis strategy: distinct points in [0,1]^d."""
    from hypothesis import strategies as st
    from hypothesis.extra.numpy import arrays

    @st.composite
    def build(draw):
        d = draw(st.integers(1, max_d))
        n = draw(st.integers(2, max_n))
        pts = draw(
            arrays(np.float64, (n, d), elements=st.floats(0, 1, allow_nan=False, width=32), unique=False)
        )
        pts = np.unique(pts, axis=0)
        if len(pts) < 2:
            pts = np.vstack([pts, pts[:1] + 0.5])
        return pts

    return build()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS):
            terminalreporter.write_line(line)
