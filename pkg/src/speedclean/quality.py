"""Error injection, repair metrics and the EWMA smoothing baseline."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .core import DimensionError, TimeSeries

PATTERNS = ("together", "separate")


@dataclass(frozen=True)
class ErrorSpec:
    rate: float
    pattern: str = "together"
    seed: int = 0
    # per-dimension (min, max); None means "take it from the truth series"
    value_range: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not 0 <= self.rate <= 1:
            raise ValueError(f"error rate must lie in [0, 1], got {self.rate}")
        if self.pattern not in PATTERNS:
            raise ValueError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        for lo, hi in self.value_range or ():
            if lo > hi:
                raise ValueError(f"empty value range ({lo}, {hi})")


@dataclass(frozen=True)
class EvalReport:
    rmse: float
    repair_distance: float
    repair_number: float
    repair_count: int
    time: float

    def as_text(self) -> str:
        return "\n".join(f"{k}={_fmt(v)}" for k, v in asdict(self).items())


def _fmt(v):
    return f"{v:.12g}" if isinstance(v, float) else str(v)


def error_count(rate: float, n: int) -> int:
    # the epsilon keeps e.g. 0.29 * 100 from flooring to 28
    return int(math.floor(rate * n + 1e-9))


def inject_errors(truth: TimeSeries, spec: ErrorSpec) -> tuple[TimeSeries, list[tuple[int, int]]]:
    """Replace randomly chosen values with uniform draws over the value range.

    ``together`` corrupts every dimension of floor(rate * n) points.
    ``separate`` spreads the same budget evenly over the dimensions, earlier
    dimensions taking the remainder, with each point hit in a single
    dimension.  Returns the dirty series and sorted ``(row, dimension)``
    pairs.
    """
    n, dim = truth.values.shape
    if n == 0:
        raise ValueError("cannot inject errors into an empty series")
    rng = np.random.default_rng(spec.seed)
    if spec.value_range is None:
        lo, hi = truth.values.min(axis=0), truth.values.max(axis=0)
    else:
        if len(spec.value_range) != dim:
            raise DimensionError(f"value_range has {len(spec.value_range)} entries for D={dim}")
        lo, hi = (np.array(x, dtype=float) for x in zip(*spec.value_range))
    k = error_count(spec.rate, n)
    dirty = np.array(truth.values, dtype=float)
    cells: list[tuple[int, int]] = []
    rows = rng.choice(n, size=k, replace=False) if k else np.empty(0, dtype=np.int64)
    if spec.pattern == "together":
        rows = np.sort(rows)
        dirty[rows] = rng.uniform(lo, hi, size=(k, dim))
        cells = [(int(r), d) for r in rows for d in range(dim)]
    else:
        share = [k // dim + (1 if d < k % dim else 0) for d in range(dim)]
        start = 0
        for d, cnt in enumerate(share):
            chosen = np.sort(rows[start:start + cnt])
            start += cnt
            dirty[chosen, d] = rng.uniform(lo[d], hi[d], size=cnt)
            cells.extend((int(r), d) for r in chosen)
        cells.sort()
    return truth.with_values(dirty), cells


def _check(a: TimeSeries, b: TimeSeries):
    if a.values.shape != b.values.shape:
        raise DimensionError(f"shape mismatch: {a.values.shape} vs {b.values.shape}")


def _point_dist(a: TimeSeries, b: TimeSeries) -> np.ndarray:
    _check(a, b)
    return np.sqrt(((a.values - b.values) ** 2).sum(axis=1))


def rmse(repaired: TimeSeries, truth: TimeSeries) -> float:
    d = _point_dist(repaired, truth)
    return float(np.sqrt(np.mean(d**2))) if d.size else 0.0


def repair_distance(repaired: TimeSeries, original: TimeSeries) -> float:
    """Mean per-point Euclidean distance between two versions of a series."""
    d = _point_dist(repaired, original)
    return float(d.mean()) if d.size else 0.0


def repair_number(repaired: TimeSeries, original: TimeSeries) -> tuple[float, int]:
    _check(repaired, original)
    n = len(original)
    count = int(np.any(repaired.values != original.values, axis=1).sum())
    return (count / n if n else 0.0), count


def evaluate(repaired: TimeSeries, dirty: TimeSeries, truth: TimeSeries, elapsed: float = 0.0) -> EvalReport:
    frac, count = repair_number(repaired, dirty)
    return EvalReport(
        rmse=rmse(repaired, truth),
        repair_distance=repair_distance(repaired, dirty),
        repair_number=frac,
        repair_count=count,
        time=elapsed,
    )


def ewma(ts: TimeSeries, alpha: float) -> TimeSeries:
    """Exponentially weighted moving average, seeded with the first observation."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if len(ts) == 0:
        raise ValueError("ewma of an empty series")
    x = ts.values
    y = np.empty_like(x)
    y[0] = x[0]
    for i in range(1, len(x)):
        y[i] = alpha * x[i] + (1 - alpha) * y[i - 1]
    return ts.with_values(y)
