import itertools

import numpy as np
import pytest

from speedclean.core import SpeedConstraint, TimeSeries
from speedclean.global_repair import (
    BRUTE_FORCE_LIMIT,
    brute_force_min_fix,
    find_fix_list,
    mtcsc_g,
    repair_by_fix_list,
)

from conftest import assert_sound, random_series


def test_example_fix_list(step_series):
    plan = find_fix_list(step_series, SpeedConstraint(1, 7))
    assert plan.fix_list == (1, 3)
    assert plan.clean_list == (0, 2, 4, 5, 6)
    assert plan.chain_length == 5


def test_example_repair(step_series):
    c = SpeedConstraint(1, 7)
    res = mtcsc_g(step_series, c)
    np.testing.assert_allclose(res.repaired.values[1], (1.8, 1.0), atol=1e-9)
    np.testing.assert_allclose(res.repaired.values[3], (3.55, 1.0), atol=1e-9)
    assert res.fixed_indices == (1, 3)
    assert res.repair_count == 2
    # (|1.8 - 1.8| + 0.8 + |3.55 - 3.4|) / 7 -> 0.95 / 7
    assert res.repair_distance == pytest.approx(0.95 / 7)
    assert_sound(res.repaired, c)


def test_clean_series_untouched():
    ts = TimeSeries([1, 2, 3], [[0.0], [0.5], [1.0]])
    plan = find_fix_list(ts, SpeedConstraint(1, 5))
    assert plan.fix_list == ()
    assert mtcsc_g(ts, SpeedConstraint(1, 5)).repaired == ts


def test_empty_and_single():
    empty = TimeSeries(np.empty(0), np.empty((0, 2)))
    assert find_fix_list(empty, SpeedConstraint(1, 1)).fix_list == ()
    assert mtcsc_g(empty, SpeedConstraint(1, 1)).repair_count == 0
    one = TimeSeries([3.0], [[1.0, 2.0]])
    assert mtcsc_g(one, SpeedConstraint(1, 1)).repaired == one


def test_leading_outlier_copies_neighbour():
    ts = TimeSeries([1, 2, 3, 4], [[50.0], [0.0], [0.5], [1.0]])
    res = mtcsc_g(ts, SpeedConstraint(1, 5))
    assert res.fixed_indices == (0,)
    assert res.repaired.values[0, 0] == 0.0


def test_gap_longer_than_window_splits_chain():
    # the jump at t=10 is beyond the window, so nothing needs fixing
    ts = TimeSeries([1, 2, 10, 11], [[0.0], [0.5], [100.0], [100.5]])
    assert find_fix_list(ts, SpeedConstraint(1, 3)).fix_list == ()


def test_non_interpolable_anchors_split_at_gap():
    # points 1 and 3 are wild, anchors 0 and 4 are 100 apart across a long gap
    ts = TimeSeries([1, 2, 3, 10, 11, 12], [[0.0], [40.0], [0.5], [-60.0], [100.0], [100.5]])
    c = SpeedConstraint(1, 3)
    res = mtcsc_g(ts, c)
    assert_sound(res.repaired, c)
    assert res.repair_count == brute_force_min_fix(ts, c)[0]


def _oracle(ts, c):
    """Plain itertools search, written separately from the bitmask version."""
    t, v, n = ts.timestamps, ts.values, len(ts)

    def ok(a, b):
        return np.linalg.norm(v[b] - v[a]) <= c.s_max * (t[b] - t[a]) * (1 + 1e-9)

    def gap(a, b):
        return bool(np.any(np.diff(t[a:b + 1]) > c.window))

    for size in range(n, 0, -1):
        for keep in itertools.combinations(range(n), size):
            if all(ok(a, b) or t[b] - t[a] > c.window for a, b in itertools.combinations(keep, 2)) and all(
                ok(a, b) or gap(a, b) for a, b in zip(keep, keep[1:])
            ):
                return n - size
    return n


@pytest.mark.parametrize("seed", range(40))
def test_dp_matches_two_brute_forces(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(1, 10))
    ts = random_series(rng, n, int(rng.integers(1, 4)))
    c = SpeedConstraint(float(rng.uniform(0.5, 2.0)), float(rng.uniform(1.0, 4.0)))
    count, keep = brute_force_min_fix(ts, c)
    assert count == _oracle(ts, c)
    plan = find_fix_list(ts, c)
    assert len(plan.fix_list) == count
    assert len(keep) == n - count
    res = repair_by_fix_list(ts, plan, c)
    assert_sound(res.repaired, c)


def test_brute_force_limit():
    ts = TimeSeries(np.arange(BRUTE_FORCE_LIMIT + 1.0), np.zeros((BRUTE_FORCE_LIMIT + 1, 1)))
    with pytest.raises(ValueError):
        brute_force_min_fix(ts, SpeedConstraint(1, 1))


def test_fixed_points_are_only_ones_changed():
    rng = np.random.default_rng(9)
    ts = random_series(rng, 200, 2)
    res = mtcsc_g(ts, SpeedConstraint(1.5, 3))
    changed = np.nonzero(np.any(res.repaired.values != ts.values, axis=1))[0]
    assert set(changed) <= set(find_fix_list(ts, SpeedConstraint(1.5, 3)).fix_list)
    assert_sound(res.repaired, SpeedConstraint(1.5, 3))
