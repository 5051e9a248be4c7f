"""Repair multivariate time series under speed constraints."""

from .adaptive import AdaptiveParams, AdaptiveState, SpeedHistogram, kl_divergence, mtcsc_a
from .cluster import ClusterCleaner, WindowCluster, build_cluster, mtcsc_c
from .core import (
    DataPoint,
    DimensionError,
    InvalidPairError,
    OrderingError,
    RepairResult,
    SpeedConstraint,
    TimeSeries,
    distance,
    find_violations,
    satisfies,
    validate,
)
from .global_repair import FixPlan, brute_force_min_fix, find_fix_list, mtcsc_g, repair_by_fix_list
from .quality import ErrorSpec, EvalReport, evaluate, ewma, inject_errors, repair_distance, repair_number, rmse
from .streaming import LocalCleaner, mtcsc_l

__version__ = "0.1.0"
