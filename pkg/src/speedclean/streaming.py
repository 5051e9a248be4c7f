"""Online local repair (MTCSC-L).

Each point becomes the key exactly once.  A key compatible with the last
finalized point is emitted as is; otherwise it waits, for at most one window,
for the first later observation within speed of that last point and is placed
on the segment between the two.
"""

from __future__ import annotations

import math
import time
from collections import deque

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


def interpolate(prev_t, prev_v, key_t, anchor_t, anchor_v):
    """Place the key on the segment from the last fixed point to an anchor."""
    a = (key_t - prev_t) / (anchor_t - prev_t)
    return tuple(a * (m - p) + p for m, p in zip(anchor_v, prev_v))


class LocalCleaner:
    """Push-based MTCSC-L state for one stream.

    Not safe for concurrent mutation; use one instance per stream.
    """

    def __init__(self, constraint: SpeedConstraint):
        self.constraint = constraint
        self.last_fixed: tuple[float, tuple] | None = None
        # queue[0] is the pending key, the rest is lookahead.
        self._queue: deque = deque()
        self._scan = 1
        self._last_t = None
        self._dim = None
        self.max_buffered = 0

    @property
    def pending_key(self):
        return self._queue[0] if self._queue else None

    @property
    def lookahead(self):
        return list(self._queue)[1:]

    def push(self, point: DataPoint) -> list[DataPoint]:
        out: list = []
        self._push(point.timestamp, point.values, out)
        return [DataPoint(t, v) for t, v in out]

    def flush(self) -> list[DataPoint]:
        out: list = []
        self._drain(out, final=True)
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
        self._drain(out)
        if len(self._queue) > self.max_buffered:
            self.max_buffered = len(self._queue)

    def _drain(self, out, final=False):
        q = self._queue
        s = self.constraint.s_max
        w = self.constraint.window
        tol = 1.0 + RTOL
        while q:
            kt, kv = q[0]
            last = self.last_fixed
            if last is None:
                self._emit(kt, kv, out)
                continue
            lt, lv = last
            dt = kt - lt
            if dt > w or math.dist(kv, lv) <= s * dt * tol:
                self._emit(kt, kv, out)
                continue
            while self._scan < len(q):
                it, iv = q[self._scan]
                if it > kt + w:
                    self._emit(kt, lv, out)
                    break
                if math.dist(iv, lv) <= s * (it - lt) * tol:
                    self._emit(kt, interpolate(lt, lv, kt, it, iv), out)
                    break
                self._scan += 1
            else:
                if not final:
                    return
                # end of stream counts as window expiry
                self._emit(kt, lv, out)

    def _emit(self, t, v, out):
        self._queue.popleft()
        self._scan = 1
        self.last_fixed = (t, v)
        out.append((t, v))


def mtcsc_l(ts: TimeSeries, c: SpeedConstraint) -> RepairResult:
    """Batch wrapper: push every point of ``ts`` through a fresh cleaner."""
    start = time.perf_counter()
    require_valid(ts)
    cleaner = LocalCleaner(c)
    out: list = []
    for t, v in zip(ts.timestamps.tolist(), ts.values.tolist()):
        cleaner._push(t, v, out)
    cleaner._drain(out, final=True)
    values = [v for _, v in out] if out else ts.values
    return build_result(ts, values, time.perf_counter() - start)
