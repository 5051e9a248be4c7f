import numpy as np
import pytest

from speedclean.core import SpeedConstraint, TimeSeries, find_violations

# Walk used by most worked examples: 7 points, t = 1..7.
STEP_SERIES = [(1, 1), (1.8, 1.8), (2.6, 1), (3.4, 1), (4.5, 1), (5.5, 1), (6.4, 1)]
# Cluster example: 8 points, t = 0..7.
CLUSTER_SERIES = [(1, 1), (1.8, 1.8), (2.6, 2), (3.5, 1), (4.5, 1), (5.5, 0.5), (6.5, 1), (7.5, 1)]


@pytest.fixture
def step_series():
    return TimeSeries.from_rows(STEP_SERIES)


@pytest.fixture
def cluster_series():
    return TimeSeries(np.arange(8.0), CLUSTER_SERIES)


def random_series(rng, n, dim, dirty_frac=0.3, step=1.0, jitter_t=True):
    """Walk with irregular timestamps and a fraction of wild points."""
    if jitter_t:
        t = np.cumsum(rng.uniform(0.5, 1.5, size=n))
    else:
        t = np.arange(1.0, n + 1)
    v = np.cumsum(rng.normal(scale=step, size=(n, dim)), axis=0)
    bad = rng.random(n) < dirty_frac
    v[bad] += rng.normal(scale=6 * step, size=(bad.sum(), dim))
    return TimeSeries(t, v)


def assert_sound(ts: TimeSeries, c: SpeedConstraint):
    bad = find_violations(ts, c)
    assert not bad, f"{len(bad)} in-window violations, first {bad[:3]}"
