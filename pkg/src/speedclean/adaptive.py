"""Adaptive speed constraint (MTCSC-A).

Speeds between consecutive observations are collected into two adjacent
FIFO windows.  When the bucketed distributions of the two windows drift
apart (KL divergence above ``tau``), the constraint is reset to the 95th
percentile speed of the newer window divided by ``beta``.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterCleaner, run_cleaner
from .core import RepairResult, SpeedConstraint, TimeSeries, build_result, require_valid


@dataclass(frozen=True)
class SpeedHistogram:
    counts: tuple[int, ...]
    bucket_width: float

    @property
    def total(self) -> int:
        return sum(self.counts)

    def probabilities(self) -> np.ndarray:
        c = np.asarray(self.counts, dtype=float)
        return c / c.sum()


@dataclass(frozen=True)
class AdaptiveParams:
    """Monitor settings: bucket count, KL threshold, window capacity, modify factor."""

    b: int = 6
    tau: float = 0.75
    m: int = 150
    beta: float = 0.75

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("b must be at least 2")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")


def bucket_edges(b: int, s: float) -> np.ndarray:
    """Right edges of the b - 1 finite buckets; the last one is exactly ``s``."""
    edges = s / (b - 1) * np.arange(1, b, dtype=float)
    edges[-1] = s
    return edges


def update_distribution(window, b: int, s: float) -> SpeedHistogram:
    """Bucket speeds into ``[0, s/(b-1)], ..., (s, inf)``; edges close on the right."""
    if not s > 0:
        raise ValueError("s must be positive")
    if b < 2:
        raise ValueError("b must be at least 2")
    speeds = np.asarray(list(window), dtype=float)
    if speeds.size and speeds.min() < 0:
        raise ValueError("speeds must be nonnegative")
    idx = np.searchsorted(bucket_edges(b, s), speeds, side="left")
    counts = np.bincount(idx, minlength=b)
    return SpeedHistogram(tuple(int(x) for x in counts), s / (b - 1))


def kl_divergence(h1: SpeedHistogram, h2: SpeedHistogram, eps: float | None = None) -> float:
    """KL(P1 || P2) in nats.

    Buckets empty in ``h1`` contribute nothing.  Buckets empty in ``h2`` but
    not in ``h1`` use probability ``eps``, by default ``1 / (total2 * b)``.
    """
    if len(h1.counts) != len(h2.counts):
        raise ValueError(f"bucket count mismatch: {len(h1.counts)} vs {len(h2.counts)}")
    if h1.total == 0 or h2.total == 0:
        raise ValueError("both histograms must be non-empty")
    if eps is None:
        eps = 1.0 / (h2.total * len(h2.counts))
    p1 = h1.probabilities()
    p2 = h2.probabilities()
    mask = p1 > 0
    q = np.where(p2[mask] > 0, p2[mask], eps)
    return max(0.0, float(np.sum(p1[mask] * np.log(p1[mask] / q))))


def percentile_95(window) -> float:
    """Nearest-rank 95th percentile: the ceil(0.95 n)-th smallest value."""
    xs = sorted(window)
    if not xs:
        raise ValueError("percentile of an empty window")
    rank = (95 * len(xs) + 99) // 100
    return float(xs[rank - 1])


@dataclass
class AdaptiveState:
    current: SpeedConstraint
    b: int
    w1: deque = field(default_factory=deque)
    w2: deque = field(default_factory=deque)
    h1: SpeedHistogram | None = None
    h2: SpeedHistogram | None = None
    trace: list = field(default_factory=list)
    kl_trace: list = field(default_factory=list)

    def __post_init__(self):
        self.rebuild()

    def rebuild(self):
        s = self.current.s_max
        self.h1 = update_distribution(self.w1, self.b, s)
        self.h2 = update_distribution(self.w2, self.b, s)


def adaptive_speed_step(state: AdaptiveState, params: AdaptiveParams, prev, key) -> SpeedConstraint:
    """Feed one observed speed to the monitor and return the constraint in force.

    ``prev`` and ``key`` are :class:`DataPoint` or ``(t, values)`` tuples of
    the original (unrepaired) observations.
    """
    pt, pv = _tv(prev)
    kt, kv = _tv(key)
    if not kt > pt:
        raise ValueError("key must follow prev in time")
    speed = math.dist(kv, pv) / (kt - pt)
    s = state.current.s_max
    if len(state.w1) < params.m:
        state.w1.append(speed)
        state.h1 = update_distribution(state.w1, params.b, s)
    elif len(state.w2) < params.m:
        state.w2.append(speed)
        state.h2 = update_distribution(state.w2, params.b, s)
    else:
        kl = kl_divergence(state.h1, state.h2, eps=1.0 / (params.m * params.b))
        state.kl_trace.append((kt, kl))
        if kl > params.tau:
            new_s = percentile_95(state.w2) / params.beta
            # all-zero speeds give no usable estimate
            if new_s > 0 and new_s != s:
                state.current = SpeedConstraint(new_s, state.current.window)
                state.trace.append((kt, new_s))
        state.w1.append(state.w2.popleft())
        state.w1.popleft()
        state.w2.append(speed)
        state.rebuild()
    return state.current


def _tv(p):
    if hasattr(p, "timestamp"):
        return p.timestamp, p.values
    return p


class AdaptiveMonitor:
    """Adapter that lets :class:`ClusterCleaner` consult the monitor per key."""

    def __init__(self, c0: SpeedConstraint, params: AdaptiveParams):
        self.params = params
        self.state = AdaptiveState(current=c0, b=params.b)

    def step(self, prev, key) -> SpeedConstraint:
        return adaptive_speed_step(self.state, self.params, prev, key)


def mtcsc_a(ts: TimeSeries, c0: SpeedConstraint, params: AdaptiveParams) -> RepairResult:
    """Cluster-guided repair whose constraint follows the observed speed regime."""
    start = time.perf_counter()
    require_valid(ts)
    monitor = AdaptiveMonitor(c0, params)
    values = run_cleaner(ClusterCleaner(c0, monitor=monitor), ts)
    return build_result(
        ts,
        values,
        time.perf_counter() - start,
        constraint_trace=tuple(monitor.state.trace),
        kl_trace=tuple(monitor.state.kl_trace),
    )
