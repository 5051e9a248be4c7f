"""Cluster-guided online repair (MTCSC-C).

The points following a key within one window are grouped by a single greedy
pass; the first point of the largest group is taken as the trend and serves
as the interpolation anchor for the key when the key looks inconsistent.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass

from .core import (
    RTOL,
    DataPoint,
    DimensionError,
    OrderingError,
    RepairResult,
    SpeedConstraint,
    TimeSeries,
    build_result,
    require_valid,
)
from .streaming import interpolate

OMITTED = 0
SEED = -1


@dataclass(frozen=True)
class WindowCluster:
    seed_index: int
    members: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


def _build(prev, window, s_max, w):
    """Greedy clustering over ``window`` given the last fixed point ``prev``.

    ``prev`` and window entries are ``(t, values)`` tuples.  Returns the
    clusters in seed order and the flag list: ``OMITTED``, ``SEED``, or
    ``seed + 1`` for a member of the cluster seeded at ``seed``.
    """
    tol = 1.0 + RTOL
    pt, pv = prev
    n = len(window)
    flags = [OMITTED] * n

    def from_prev(i):
        it, iv = window[i]
        return math.dist(iv, pv) <= s_max * (it - pt) * tol

    def pair_ok(i, j):
        (it, iv), (jt, jv) = window[i], window[j]
        dt = it - jt
        return dt > w or math.dist(iv, jv) <= s_max * dt * tol

    first = next((i for i in range(n) if from_prev(i)), None)
    if first is None:
        return [], flags
    flags[first] = SEED
    clusters = {first: [first]}
    for i in range(first + 1, n):
        for j in range(i - 1, first - 1, -1):
            if pair_ok(i, j):
                if flags[j] == SEED:
                    flags[i] = j + 1
                    clusters[j].append(i)
                elif flags[j] > 0:
                    flags[i] = flags[j]
                    clusters[flags[j] - 1].append(i)
                break
            if j == first or flags[j] > 0:
                if from_prev(i):
                    flags[i] = SEED
                    clusters[i] = [i]
                break
    return [WindowCluster(k, tuple(m)) for k, m in clusters.items()], flags


def build_cluster(prev_fixed: DataPoint, window: list[DataPoint], c: SpeedConstraint) -> list[WindowCluster]:
    """Cluster the points after a key; indices are relative to ``window``."""
    win = [(p.timestamp, p.values) for p in window]
    clusters, _ = _build((prev_fixed.timestamp, prev_fixed.values), win, c.s_max, c.window)
    return clusters


def cluster_flags(prev_fixed: DataPoint, window: list[DataPoint], c: SpeedConstraint) -> list[int]:
    win = [(p.timestamp, p.values) for p in window]
    return _build((prev_fixed.timestamp, prev_fixed.values), win, c.s_max, c.window)[1]


def largest(clusters: list[WindowCluster]) -> WindowCluster:
    """Largest cluster; the earliest seed wins ties."""
    best = clusters[0]
    for cl in clusters[1:]:
        if cl.size > best.size:
            best = cl
    return best


class ClusterCleaner:
    """Push-based MTCSC-C state for one stream.

    A key is decided once its whole window has arrived, i.e. when a point
    later than ``t_key + window`` shows up or on :meth:`flush`.  Windows are
    built from original observations; only the last fixed point carries
    repairs forward.  ``monitor`` (see :mod:`speedclean.adaptive`) may replace
    the constraint before each key is decided.
    """

    def __init__(self, constraint: SpeedConstraint, monitor=None):
        self.constraint = constraint
        self.monitor = monitor
        self.last_fixed = None
        self._prev_obs = None
        self._queue: deque = deque()
        self._last_t = None
        self._dim = None
        self.max_buffered = 0

    def push(self, point: DataPoint) -> list[DataPoint]:
        out: list = []
        self._push(point.timestamp, point.values, out)
        return [DataPoint(t, v) for t, v in out]

    def flush(self) -> list[DataPoint]:
        out: list = []
        while self._queue:
            self._decide(out)
        return [DataPoint(t, v) for t, v in out]

    def _push(self, t, values, out):
        if self._last_t is not None and not t > self._last_t:
            raise OrderingError(f"timestamp {t} does not follow {self._last_t}")
        if self._dim is None:
            self._dim = len(values)
        elif len(values) != self._dim:
            raise DimensionError(f"arity {len(values)} differs from {self._dim}")
        self._last_t = t
        self._queue.append((t, tuple(values)))
        if len(self._queue) > self.max_buffered:
            self.max_buffered = len(self._queue)
        w = self.constraint.window
        while self._queue and self._queue[-1][0] > self._queue[0][0] + w:
            self._decide(out)

    def _decide(self, out):
        q = self._queue
        kt, kv = q.popleft()
        prev_obs, self._prev_obs = self._prev_obs, (kt, kv)
        last = self.last_fixed
        if last is None:
            self._emit(kt, kv, out)
            return
        if self.monitor is not None:
            self.constraint = self.monitor.step(prev_obs, (kt, kv))
        c = self.constraint
        s, w = c.s_max, c.window
        tol = 1.0 + RTOL
        window = []
        for item in q:
            if item[0] > kt + w:
                break
            window.append(item)
        lt, lv = last
        dt = kt - lt
        key_ok = dt > w or math.dist(kv, lv) <= s * dt * tol
        clusters, _ = _build(last, window, s, w)
        if not clusters:
            self._emit(kt, kv if key_ok else lv, out)
            return
        it, iv = window[largest(clusters).seed_index]
        rdt = it - kt
        if key_ok and (rdt > w or math.dist(kv, iv) <= s * rdt * tol):
            self._emit(kt, kv, out)
        else:
            self._emit(kt, interpolate(lt, lv, kt, it, iv), out)

    def _emit(self, t, v, out):
        self.last_fixed = (t, v)
        out.append((t, v))


def run_cleaner(cleaner, ts: TimeSeries):
    out: list = []
    for t, v in zip(ts.timestamps.tolist(), ts.values.tolist()):
        cleaner._push(t, v, out)
    while cleaner._queue:
        cleaner._decide(out)
    return [v for _, v in out] if out else ts.values


def mtcsc_c(ts: TimeSeries, c: SpeedConstraint) -> RepairResult:
    """Batch wrapper around :class:`ClusterCleaner`."""
    start = time.perf_counter()
    require_valid(ts)
    values = run_cleaner(ClusterCleaner(c), ts)
    return build_result(ts, values, time.perf_counter() - start)
