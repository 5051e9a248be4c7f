"""Batch minimum-fix repair (MTCSC-G).

The fix list comes from a longest-compatible-subsequence dynamic program: the
retained points form the longest chain in which each link is repairable, and
every other point is re-placed by interpolating its nearest retained
neighbours.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .core import RTOL, RepairResult, SpeedConstraint, TimeSeries, build_result, require_valid

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True)
class FixPlan:
    fix_list: tuple[int, ...]
    clean_list: tuple[int, ...]
    chain_length: int


def _last_gap_start(t: np.ndarray, window: float) -> np.ndarray:
    """For each i, the largest g <= i with t[g] - t[g-1] > window, else -1."""
    n = len(t)
    idx = np.full(n, -1, dtype=np.int64)
    if n > 1:
        big = np.diff(t) > window
        idx[1:] = np.where(big, np.arange(1, n), -1)
    return np.maximum.accumulate(idx)


def _speeds_ok(t, v, i, js, s_max):
    d = np.sqrt(((v[js] - v[i]) ** 2).sum(axis=1))
    return d <= s_max * np.abs(t[i] - t[js]) * (1.0 + RTOL)


def find_fix_list(ts: TimeSeries, c: SpeedConstraint) -> FixPlan:
    """Indices to repair so that the retained points form a maximum chain.

    A link j -> i between consecutive retained points is accepted when the
    pair respects ``s_max`` or when some consecutive time gap between them
    exceeds the window.  The second case lets repaired points on either side
    of the gap take independent values.  Ties go to the first index reaching
    the best chain length.
    """
    n = len(ts)
    if n == 0:
        return FixPlan((), (), 0)
    require_valid(ts)
    t, v = ts.timestamps, ts.values
    gap = _last_gap_start(t, c.window)
    dp = np.ones(n, dtype=np.int64)
    pre = np.full(n, -1, dtype=np.int64)
    for i in range(1, n):
        ok = _speeds_ok(t, v, i, slice(0, i), c.s_max)
        if gap[i] > 0:
            ok[: gap[i]] = True
        cand = np.where(ok, dp[:i], 0)
        j = int(cand.argmax())
        if cand[j] > 0:
            dp[i] = cand[j] + 1
            pre[i] = j
    end = int(dp.argmax())
    length = int(dp[end])
    clean = []
    while end >= 0:
        clean.append(end)
        end = int(pre[end])
    clean.reverse()
    keep = set(clean)
    fix = tuple(i for i in range(n) if i not in keep)
    return FixPlan(fix, tuple(clean), length)


def brute_force_min_fix(ts: TimeSeries, c: SpeedConstraint) -> tuple[int, tuple[int, ...]]:
    """Exhaustive minimum fix count and one largest feasible keep-set.

    A keep-set is feasible when its points satisfy the constraint pairwise
    within the window and every gap between consecutive kept points can be
    bridged by the dropped points in between.  Exponential; refuses more than
    ``BRUTE_FORCE_LIMIT`` points.
    """
    n = len(ts)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} points, got {n}")
    if n == 0:
        return 0, ()
    t = ts.timestamps.tolist()
    v = ts.values
    s, w = c.s_max, c.window

    def fast(a, b):
        d = float(np.sqrt(((v[a] - v[b]) ** 2).sum()))
        return d <= s * (t[b] - t[a]) * (1.0 + RTOL)

    # compat[a] is a bitmask of points b that may be kept together with a.
    compat = [0] * n
    bridge = [[False] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            ok = fast(a, b)
            if t[b] - t[a] > w or ok:
                compat[a] |= 1 << b
                compat[b] |= 1 << a
            bridge[a][b] = ok or any(t[k + 1] - t[k] > w for k in range(a, b))
    for a in range(n):
        compat[a] |= 1 << a

    for size in range(n, 0, -1):
        for keep in itertools.combinations(range(n), size):
            mask = 0
            for k in keep:
                mask |= 1 << k
            if any(mask & ~compat[k] for k in keep):
                continue
            if all(bridge[a][b] for a, b in zip(keep, keep[1:])):
                return n - size, keep
    raise AssertionError("a single point is always feasible")


def repair_by_fix_list(ts: TimeSeries, plan: FixPlan, c: SpeedConstraint) -> RepairResult:
    """Re-place every fixed point from its nearest clean neighbours.

    Points between two clean anchors are interpolated linearly in time.  When
    only one side has a clean point its value is copied.  If the anchors are
    too far apart in value to interpolate (possible only across a gap longer
    than the window), points before the first such gap copy the left anchor
    and points after it copy the right one.
    """
    start = time.perf_counter()
    t = ts.timestamps
    out = np.array(ts.values, dtype=float)
    clean = np.asarray(plan.clean_list, dtype=np.int64)
    fix = np.asarray(plan.fix_list, dtype=np.int64)
    if len(fix) and len(clean):
        pos = np.searchsorted(clean, fix)
        for p_idx, run in _runs(pos, fix):
            left = int(clean[p_idx - 1]) if p_idx > 0 else None
            right = int(clean[p_idx]) if p_idx < len(clean) else None
            if left is None:
                out[run] = ts.values[right]
            elif right is None:
                out[run] = ts.values[left]
            else:
                _fill_between(t, ts.values, out, left, right, run, c)
    return build_result(ts, out, time.perf_counter() - start)


def _runs(pos: np.ndarray, fix: np.ndarray):
    """Group fixed indices by the clean slot they fall into."""
    bounds = np.nonzero(np.diff(pos))[0] + 1
    for chunk_pos, chunk in zip(np.split(pos, bounds), np.split(fix, bounds)):
        yield int(chunk_pos[0]), chunk


def _fill_between(t, v, out, p, m, run, c):
    d = float(np.sqrt(((v[m] - v[p]) ** 2).sum()))
    span = t[m] - t[p]
    if d <= c.s_max * span * (1.0 + RTOL):
        alpha = (t[run] - t[p]) / span
        out[run] = alpha[:, None] * (v[m] - v[p]) + v[p]
        return
    gaps = np.nonzero(np.diff(t[p:m + 1]) > c.window)[0]
    split = p + int(gaps[0]) + 1 if len(gaps) else m
    out[run[run < split]] = v[p]
    out[run[run >= split]] = v[m]


def mtcsc_g(ts: TimeSeries, c: SpeedConstraint) -> RepairResult:
    """Global minimum-fix repair of a whole series."""
    start = time.perf_counter()
    if len(ts) == 0:
        return build_result(ts, ts.values, 0.0)
    plan = find_fix_list(ts, c)
    res = repair_by_fix_list(ts, plan, c)
    return build_result(ts, res.repaired.values, time.perf_counter() - start)
