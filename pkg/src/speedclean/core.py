"""Data model and the speed-constraint predicate shared by every cleaner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Relative slack on `dist <= s * dt`. Several worked examples put a pair exactly
# on the boundary (speed == s) where plain double arithmetic lands one ulp over.
RTOL = 1e-9


class DimensionError(ValueError):
    """Two points (or a point and a series) disagree on arity."""


class InvalidPairError(ValueError):
    """A pair of points shares a timestamp, so no speed is defined."""


class OrderingError(ValueError):
    """Timestamps are not strictly increasing."""


@dataclass(frozen=True, slots=True)
class DataPoint:
    timestamp: float
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "timestamp", float(self.timestamp))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True, slots=True)
class SpeedConstraint:
    """Maximum speed ``s_max`` enforced between points at most ``window`` apart.

    The minimum speed is fixed at zero and therefore not stored.
    """

    s_max: float
    window: float

    def __post_init__(self):
        if not (self.s_max > 0 and math.isfinite(self.s_max)):
            raise ValueError(f"s_max must be positive and finite, got {self.s_max}")
        if not (self.window > 0):
            raise ValueError(f"window must be positive, got {self.window}")


class TimeSeries:
    """An ordered multivariate series backed by two read-only numpy arrays.

    ``timestamps`` has shape (n,) and ``values`` has shape (n, D).  Construction
    does not enforce ordering or finiteness; use :func:`validate` or
    :func:`require_valid` for that.
    """

    __slots__ = ("timestamps", "values")

    def __init__(self, timestamps, values):
        t = np.array(timestamps, dtype=float).reshape(-1)
        v = np.array(values, dtype=float)
        if v.ndim == 1:
            v = v.reshape(len(t), -1) if len(t) else v.reshape(0, 1)
        if v.ndim != 2 or v.shape[0] != t.shape[0]:
            raise DimensionError(
                f"values shape {v.shape} does not match {t.shape[0]} timestamps"
            )
        if v.shape[1] < 1:
            raise DimensionError("a series needs at least one dimension")
        t.setflags(write=False)
        v.setflags(write=False)
        self.timestamps = t
        self.values = v

    @classmethod
    def from_points(cls, points: Iterable[DataPoint]) -> "TimeSeries":
        points = list(points)
        if not points:
            raise ValueError("cannot infer dimension of an empty point list")
        dim = points[0].dimension
        for i, p in enumerate(points):
            if p.dimension != dim:
                raise DimensionError(f"point {i} has arity {p.dimension}, expected {dim}")
        return cls([p.timestamp for p in points], [p.values for p in points])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], timestamps=None) -> "TimeSeries":
        """Build a series from value rows, defaulting to timestamps 1..n."""
        if timestamps is None:
            timestamps = np.arange(1, len(rows) + 1, dtype=float)
        return cls(timestamps, rows)

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.timestamps.shape[0]

    def __getitem__(self, i: int) -> DataPoint:
        return DataPoint(self.timestamps[i], self.values[i])

    def __iter__(self):
        for t, v in zip(self.timestamps.tolist(), self.values.tolist()):
            yield DataPoint(t, v)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.values.shape == other.values.shape
            and np.array_equal(self.timestamps, other.timestamps)
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return f"TimeSeries(n={len(self)}, D={self.dimension})"

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.timestamps, values)


@dataclass(frozen=True)
class RepairResult:
    repaired: TimeSeries
    fixed_indices: tuple[int, ...]
    repair_count: int
    repair_distance: float
    elapsed: float
    # (timestamp, s_max) whenever an adaptive run changes its constraint.
    constraint_trace: tuple[tuple[float, float], ...] = ()
    # (timestamp, kl) for each monitoring step where both windows were full.
    kl_trace: tuple[tuple[float, float], ...] = ()


@dataclass(frozen=True)
class Violation:
    index: int
    message: str


def distance(a: DataPoint, b: DataPoint) -> float:
    """Euclidean distance between the value vectors of two points."""
    if len(a.values) != len(b.values):
        raise DimensionError(f"arity mismatch: {len(a.values)} vs {len(b.values)}")
    return math.dist(a.values, b.values)


def speed_ok(dist: float, dt: float, s_max: float) -> bool:
    return dist <= s_max * dt * (1.0 + RTOL)


def satisfies(a: DataPoint, b: DataPoint, c: SpeedConstraint) -> bool:
    """Whether two points respect the speed constraint.

    Pairs further apart than the window are unconstrained and always satisfy.
    """
    dt = abs(b.timestamp - a.timestamp)
    if dt == 0:
        raise InvalidPairError(f"both points are at t={a.timestamp}")
    d = distance(a, b)
    if dt > c.window:
        return True
    return speed_ok(d, dt, c.s_max)


def within_speed(a: DataPoint, b: DataPoint, s_max: float) -> bool:
    """Speed check that ignores the window.

    Interpolation anchors need this stronger form: a repair placed on the
    segment towards an anchor inherits the anchor's speed.
    """
    dt = abs(b.timestamp - a.timestamp)
    if dt == 0:
        raise InvalidPairError(f"both points are at t={a.timestamp}")
    return speed_ok(distance(a, b), dt, s_max)


def validate(ts) -> list[Violation]:
    """Report structural problems in a series.

    Accepts a :class:`TimeSeries` or any iterable of :class:`DataPoint`, so
    that ragged input can be reported instead of rejected.
    """
    points = list(ts)
    out: list[Violation] = []
    if not points:
        return out
    dim = len(points[0].values)
    prev_t = None
    for i, p in enumerate(points):
        if len(p.values) != dim:
            out.append(Violation(i, f"arity {len(p.values)} differs from {dim}"))
        if not math.isfinite(p.timestamp):
            out.append(Violation(i, "non-finite timestamp"))
        elif prev_t is not None and not p.timestamp > prev_t:
            out.append(Violation(i, "timestamp not increasing"))
        if not all(math.isfinite(v) for v in p.values):
            out.append(Violation(i, "non-finite value"))
        if math.isfinite(p.timestamp):
            prev_t = p.timestamp
    return out


def require_valid(ts: TimeSeries) -> None:
    t = ts.timestamps
    if len(t) > 1 and not np.all(np.diff(t) > 0):
        bad = int(np.argmax(~(np.diff(t) > 0))) + 1
        raise OrderingError(f"timestamp not increasing at index {bad}")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(ts.values))):
        bad = int(np.argmax(~np.isfinite(ts.values).all(axis=1) | ~np.isfinite(t)))
        raise ValueError(f"non-finite value at index {bad}")


def find_violations(ts: TimeSeries, c: SpeedConstraint) -> list[tuple[int, int]]:
    """All index pairs (i, j), i < j, within the window whose speed exceeds s_max."""
    t = ts.timestamps
    v = ts.values
    out = []
    n = len(t)
    for i in range(n - 1):
        hi = int(np.searchsorted(t, t[i] + c.window, side="right"))
        if hi <= i + 1:
            continue
        d = np.sqrt(((v[i + 1:hi] - v[i]) ** 2).sum(axis=1))
        dt = t[i + 1:hi] - t[i]
        bad = np.nonzero(d > c.s_max * dt * (1.0 + RTOL))[0]
        out.extend((i, i + 1 + int(k)) for k in bad)
    return out


def build_result(original: TimeSeries, repaired_values, elapsed: float, **extra) -> RepairResult:
    repaired = original.with_values(repaired_values)
    changed = np.any(repaired.values != original.values, axis=1)
    fixed = tuple(int(i) for i in np.nonzero(changed)[0])
    n = len(original)
    dist = float(np.sqrt(((repaired.values - original.values) ** 2).sum(axis=1)).sum() / n) if n else 0.0
    return RepairResult(
        repaired=repaired,
        fixed_indices=fixed,
        repair_count=len(fixed),
        repair_distance=dist,
        elapsed=elapsed,
        **extra,
    )
