import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speedclean.core import DataPoint, DimensionError, OrderingError, SpeedConstraint, TimeSeries
from speedclean.streaming import LocalCleaner, interpolate, mtcsc_l

from conftest import assert_sound, random_series


@pytest.mark.parametrize("w", [2, 7])
def test_example_local(step_series, w):
    c = SpeedConstraint(1, w)
    res = mtcsc_l(step_series, c)
    assert res.fixed_indices == (1, 4, 5)
    assert res.repair_count == 3
    np.testing.assert_allclose(res.repaired.values[[1, 4, 5]], [[1.8, 1], [4.4, 1], [5.4, 1]], atol=1e-9)
    assert_sound(res.repaired, c)


def test_interpolate_midpoint():
    assert interpolate(0, (0.0, 0.0), 1, 2, (2.0, 4.0)) == (1.0, 2.0)


def test_window_expiry_copies_last_fixed():
    ts = TimeSeries([1, 2, 3, 4], [[0.0], [10.0], [20.0], [30.0]])
    res = mtcsc_l(ts, SpeedConstraint(1, 1.5))
    assert res.repaired.values[1, 0] == 0.0


def test_push_interface_and_ordering():
    cl = LocalCleaner(SpeedConstraint(1, 2))
    assert cl.push(DataPoint(1, (0.0,))) == [DataPoint(1, (0.0,))]
    assert cl.push(DataPoint(2, (5.0,))) == []
    assert cl.pending_key == (2, (5.0,))
    with pytest.raises(OrderingError):
        cl.push(DataPoint(2, (0.0,)))
    with pytest.raises(DimensionError):
        cl.push(DataPoint(3, (0.0, 1.0)))
    out = cl.push(DataPoint(3, (1.0,)))
    # the repaired key makes t=3 compatible at once
    assert [p.timestamp for p in out] == [2, 3]
    assert out[0].values == (0.5,)
    assert cl.flush() == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 60), st.lists(st.integers(1, 10), min_size=1, max_size=8))
def test_chunked_push_matches_batch(seed, n, chunks):
    rng = np.random.default_rng(seed)
    ts = random_series(rng, n, 2)
    c = SpeedConstraint(1.2, 2.5)
    batch = mtcsc_l(ts, c).repaired
    cl = LocalCleaner(c)
    pts = list(ts)
    out, i, k = [], 0, 0
    while i < len(pts):
        for p in pts[i:i + chunks[k % len(chunks)]]:
            out.extend(cl.push(p))
        i += chunks[k % len(chunks)]
        k += 1
    out.extend(cl.flush())
    assert TimeSeries.from_points(out) == batch


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_buffer_bound_and_soundness(seed):
    rng = np.random.default_rng(seed)
    ts = random_series(rng, 80, 2, jitter_t=False)
    c = SpeedConstraint(1.0, 3.0)
    cl = LocalCleaner(c)
    out = []
    for p in ts:
        out.extend(cl.push(p))
    out.extend(cl.flush())
    # unit spacing: key plus at most w later points plus the one that expires it
    assert cl.max_buffered <= c.window + 2
    assert_sound(TimeSeries.from_points(out), c)


@settings(max_examples=60)
@given(st.floats(0, 10), st.floats(0.01, 10), st.floats(0, 1), st.floats(-50, 50), st.floats(-50, 50))
def test_interpolation_stays_on_segment(pt, span, frac, a, b):
    kt = pt + frac * span
    (x,) = interpolate(pt, (a,), kt, pt + span, (b,))
    assert min(a, b) - 1e-9 <= x <= max(a, b) + 1e-9
