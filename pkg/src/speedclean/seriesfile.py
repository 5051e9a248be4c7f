"""CSV series files: ``timestamp,dim_1,...,dim_D`` with one row per point."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .core import TimeSeries


class SeriesFileError(ValueError):
    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}: line {line}: {message}")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def read_series(path) -> TimeSeries:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SeriesFileError(path, 1, "empty file, expected a header row")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "timestamp":
        raise SeriesFileError(path, 1, "header must be 'timestamp,dim_1,...'")
    width = len(header)
    times, values = [], []
    prev = None
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise SeriesFileError(path, line, f"expected {width} columns, found {len(row)}")
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                x = float(cell)
            except ValueError:
                raise SeriesFileError(path, line, f"column {col}: not a number: {cell!r}") from None
            if not math.isfinite(x):
                raise SeriesFileError(path, line, f"column {col}: non-finite value")
            parsed.append(x)
        if prev is not None and not parsed[0] > prev:
            raise SeriesFileError(path, line, "timestamp not increasing")
        prev = parsed[0]
        times.append(parsed[0])
        values.append(parsed[1:])
    if not times:
        return TimeSeries(np.empty(0), np.empty((0, width - 1)))
    return TimeSeries(times, values)


def write_series(path, ts: TimeSeries) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp"] + [f"dim_{d + 1}" for d in range(ts.dimension)])
        for t, row in zip(ts.timestamps.tolist(), ts.values.tolist()):
            w.writerow([fmt(t)] + [fmt(x) for x in row])
