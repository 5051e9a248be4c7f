"""Seeded synthetic series for fixtures and benchmarks."""

from __future__ import annotations

import numpy as np

from .core import TimeSeries


def bounded_walk(n: int, dim: int = 2, seed: int = 0, step: float = 1.0, bound: float = 50.0) -> TimeSeries:
    """Random walk with Gaussian steps, reflected into ``[-bound, bound]``.

    Timestamps are 1..n.
    """
    rng = np.random.default_rng(seed)
    steps = rng.normal(scale=step, size=(n, dim))
    steps[0] = 0.0
    pos = np.cumsum(steps, axis=0)
    # fold the unbounded walk back into the box, keeping step lengths
    period = 4 * bound
    pos = np.abs((pos + bound) % period - 2 * bound) - bound
    return TimeSeries(np.arange(1, n + 1, dtype=float), pos)


def two_regime_walk(n: int, dim: int = 2, seed: int = 0, step: float = 1.0, factor: float = 3.0) -> TimeSeries:
    """Random walk whose step scale jumps by ``factor`` at the midpoint."""
    rng = np.random.default_rng(seed)
    scale = np.where(np.arange(n) < n // 2, step, step * factor)
    steps = rng.normal(size=(n, dim)) * scale[:, None]
    steps[0] = 0.0
    return TimeSeries(np.arange(1, n + 1, dtype=float), np.cumsum(steps, axis=0))
