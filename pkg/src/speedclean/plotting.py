"""Figures written next to the CSV outputs of the command line tools."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (7.0, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "font.size": 9,
}

# keeps PNG bytes stable between runs
_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)


def plot_repair(path, original, repaired, truth=None, max_dims: int = 3):
    """One panel per dimension: observed, repaired and optionally true values."""
    dims = min(original.dimension, max_dims)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(dims, 1, sharex=True, squeeze=False,
                                 figsize=(7.0, 2.2 * dims))
        t = original.timestamps
        for d in range(dims):
            ax = axes[d, 0]
            ax.plot(t, original.values[:, d], color="0.6", lw=0.8, label="observed")
            if truth is not None:
                ax.plot(t, truth.values[:, d], color="k", lw=0.8, ls="--", label="truth")
            ax.plot(t, repaired.values[:, d], color="tab:blue", lw=1.0, label="repaired")
            changed = np.any(repaired.values != original.values, axis=1)
            ax.plot(t[changed], repaired.values[changed, d], "o", ms=2.5,
                    color="tab:red", label="fixed")
            ax.set_ylabel(f"dim_{d + 1}")
        axes[0, 0].legend(loc="upper right", ncol=4)
        axes[-1, 0].set_xlabel("timestamp")
        _save(fig, path)


def plot_bench(path, rows):
    """Log-log runtime against series length, one line per algorithm."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for algo in sorted({r["algorithm"] for r in rows}):
            pts = sorted((r["n"], r["elapsed_ms"]) for r in rows if r["algorithm"] == algo)
            if pts:
                n, ms = zip(*pts)
                ax.loglog(n, ms, "o-", label=algo)
        ax.set_xlabel("n")
        ax.set_ylabel("elapsed [ms]")
        if rows:
            ax.legend()
        _save(fig, path)


def plot_constraint_trace(path, kl_trace, constraint_trace, tau: float, s0: float):
    """KL divergence per monitoring step above the resulting s_max."""
    with plt.rc_context(STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 4.5))
        if kl_trace:
            t, kl = zip(*kl_trace)
            ax1.plot(t, kl, lw=0.8)
        ax1.axhline(tau, color="tab:red", ls="--", lw=0.8, label="tau")
        ax1.set_ylabel("KL")
        ax1.legend(loc="upper right")
        steps = [(kl_trace[0][0] if kl_trace else 0.0, s0)] + list(constraint_trace)
        t, s = zip(*steps)
        ax2.step(t, s, where="post")
        ax2.set_ylabel("s_max")
        ax2.set_xlabel("timestamp")
        _save(fig, path)
