"""Command line front end.

Exit codes: 0 success, 2 usage or input error, 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .adaptive import AdaptiveParams, mtcsc_a
from .cluster import mtcsc_c
from .core import SpeedConstraint, TimeSeries
from .global_repair import mtcsc_g
from .quality import PATTERNS, ErrorSpec, inject_errors, repair_distance, repair_number, rmse
from .seriesfile import SeriesFileError, fmt, read_series, write_series
from .streaming import mtcsc_l
from .synthetic import bounded_walk

ALGORITHMS = ("global", "local", "cluster", "adaptive")
REPORT_COLUMNS = (
    "algorithm", "n", "D", "error_rate", "pattern", "seed",
    "rmse_dirty", "rmse_repaired", "repair_distance", "repair_number", "elapsed_ms",
)
BENCH_COLUMNS = ("algorithm", "n", "D", "elapsed_ms", "repair_count", "rmse_dirty", "rmse_repaired")


class UsageError(Exception):
    pass


def run_algorithm(name: str, ts: TimeSeries, c: SpeedConstraint, params: AdaptiveParams | None = None):
    if name == "global":
        return mtcsc_g(ts, c)
    if name == "local":
        return mtcsc_l(ts, c)
    if name == "cluster":
        return mtcsc_c(ts, c)
    if name == "adaptive":
        return mtcsc_a(ts, c, params or AdaptiveParams())
    raise UsageError(f"unknown algorithm {name!r}")


def _constraint(args) -> SpeedConstraint:
    try:
        return SpeedConstraint(args.speed, args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params(args) -> AdaptiveParams:
    try:
        return AdaptiveParams(b=args.buckets, tau=args.tau, m=args.interval, beta=args.beta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_clean(args) -> int:
    ts = read_series(args.input)
    c = _constraint(args)
    params = _params(args)
    if len(ts) == 0:
        raise UsageError("input series is empty")
    res = run_algorithm(args.algorithm, ts, c, params)
    write_series(args.output, res.repaired)
    print(f"algorithm={args.algorithm}")
    print(f"n={len(ts)}")
    print(f"repair_count={res.repair_count}")
    print(f"repair_distance={fmt(res.repair_distance)}")
    print(f"elapsed_ms={res.elapsed * 1000:.3f}")
    if args.trace and args.algorithm == "adaptive":
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["timestamp", "s_max"])
            w.writerows([fmt(t), fmt(s)] for t, s in res.constraint_trace)
    if args.figure:
        from .plotting import plot_constraint_trace, plot_repair

        plot_repair(args.figure, ts, res.repaired)
        if args.algorithm == "adaptive":
            fig = Path(args.figure)
            plot_constraint_trace(fig.with_name(fig.stem + "_trace" + fig.suffix),
                                  res.kl_trace, res.constraint_trace, params.tau, c.s_max)
    return 0


def cmd_inject(args) -> int:
    truth = read_series(args.input)
    if len(truth) == 0:
        raise UsageError("input series is empty")
    try:
        spec = ErrorSpec(rate=args.error_rate, pattern=args.pattern, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dirty, cells = inject_errors(truth, spec)
    write_series(args.output, dirty)
    if args.index_output:
        with open(args.index_output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            # both 1-based: data row number and dim_ column number
            w.writerow(["row", "dimension"])
            w.writerows((r + 1, d + 1) for r, d in cells)
    print(f"injected={len(cells)} cells in {len({r for r, _ in cells})} rows")
    return 0


def cmd_evaluate(args) -> int:
    truth = read_series(args.truth)
    dirty = read_series(args.dirty)
    repaired = read_series(args.repaired)
    for name, ts in (("dirty", dirty), ("repaired", repaired)):
        if ts.values.shape != truth.values.shape or (ts.timestamps != truth.timestamps).any():
            raise UsageError(f"{name} file is not aligned with the truth file")
    frac, count = repair_number(repaired, dirty)
    row = {
        "algorithm": args.algorithm,
        "n": len(truth),
        "D": truth.dimension,
        "error_rate": "" if args.error_rate is None else fmt(args.error_rate),
        "pattern": args.pattern or "",
        "seed": "" if args.seed is None else args.seed,
        "rmse_dirty": fmt(rmse(dirty, truth)),
        "rmse_repaired": fmt(rmse(repaired, truth)),
        "repair_distance": fmt(repair_distance(repaired, dirty)),
        "repair_number": fmt(frac),
        "elapsed_ms": fmt(args.elapsed_ms),
    }
    for k in ("rmse_dirty", "rmse_repaired", "repair_distance", "repair_number"):
        print(f"{k}={row[k]}")
    print(f"repair_count={count}")
    if args.csv:
        path = Path(args.csv)
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, lineterminator="\n")
            if new:
                w.writeheader()
            w.writerow(row)
    if args.figure:
        from .plotting import plot_repair

        plot_repair(args.figure, dirty, repaired, truth=truth)
    return 0


def bench_rows(sizes, algorithms, dims, seed, c, error_rate, params, global_max_n, log=None):
    rows = []
    for n in sizes:
        truth = bounded_walk(n, dims, seed=seed)
        dirty, _ = inject_errors(truth, ErrorSpec(error_rate, "together", seed))
        base = rmse(dirty, truth)
        for algo in algorithms:
            if algo == "global" and n > global_max_n:
                if log:
                    log(f"skipping global at n={n} (above --global-max-n={global_max_n})")
                continue
            start = time.perf_counter()
            res = run_algorithm(algo, dirty, c, params)
            ms = (time.perf_counter() - start) * 1000
            rows.append({
                "algorithm": algo, "n": n, "D": dims, "elapsed_ms": ms,
                "repair_count": res.repair_count, "rmse_dirty": base,
                "rmse_repaired": rmse(res.repaired, truth),
            })
    return rows


def cmd_bench(args) -> int:
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --sizes {args.sizes!r}") from None
    algos = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    c = _constraint(args)
    rows = bench_rows(sizes, algos, args.dims, args.seed, c, args.error_rate, _params(args),
                      args.global_max_n, log=lambda m: print(m, file=sys.stderr))
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (fmt(v) if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if out is not sys.stdout:
            out.close()
    if args.figure:
        from .plotting import plot_bench

        plot_bench(args.figure, rows)
    return 0


def _add_constraint_flags(p, speed_required=True):
    p.add_argument("--speed", type=float, required=speed_required, default=None if speed_required else 5.0,
                   help="maximum speed s_max (value units per second)")
    p.add_argument("--window", type=float, required=speed_required, default=None if speed_required else 5.0,
                   help="window length w in seconds")
    p.add_argument("--buckets", type=int, default=6, help="adaptive: bucket count b")
    p.add_argument("--tau", type=float, default=0.75, help="adaptive: KL threshold")
    p.add_argument("--interval", type=int, default=150, help="adaptive: monitoring interval m")
    p.add_argument("--beta", type=float, default=0.75, help="adaptive: modify factor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speedclean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="repair a series file")
    p.add_argument("input")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="cluster")
    _add_constraint_flags(p)
    p.add_argument("--output", required=True)
    p.add_argument("--trace", help="adaptive: write (timestamp, s_max) changes here")
    p.add_argument("--figure", help="write a PNG of observed vs repaired values")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("inject", help="inject synthetic errors into a clean series")
    p.add_argument("input")
    p.add_argument("--error-rate", type=float, required=True)
    p.add_argument("--pattern", choices=PATTERNS, default="together")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--index-output", help="CSV of (row, dimension) cells that were replaced")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("evaluate", help="score a repair against the truth")
    p.add_argument("truth")
    p.add_argument("dirty")
    p.add_argument("repaired")
    p.add_argument("--algorithm", default="", help="label for the CSV row")
    p.add_argument("--error-rate", type=float, default=None, help="label for the CSV row")
    p.add_argument("--pattern", default=None, help="label for the CSV row")
    p.add_argument("--seed", type=int, default=None, help="label for the CSV row")
    p.add_argument("--elapsed-ms", type=float, default=0.0, help="repair time to record")
    p.add_argument("--csv", help="append a report row to this CSV file")
    p.add_argument("--figure", help="write a PNG of truth, dirty and repaired values")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="time every algorithm on seeded synthetic walks")
    p.add_argument("--sizes", default="10000,50000,100000")
    p.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--error-rate", type=float, default=0.05)
    p.add_argument("--global-max-n", type=int, default=20000,
                   help="skip the quadratic global repair above this length")
    _add_constraint_flags(p, speed_required=False)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--figure", help="write a log-log timing PNG")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SeriesFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
