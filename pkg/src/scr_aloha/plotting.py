"""Figure rendering for the CLI report commands.

All functions write a file and return nothing; the Agg backend keeps this
usable on headless machines.  Rendering is opt-in from the CLI (--plot); the
delimited outputs remain the primary artifacts.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_alpha_table",
    "plot_throughput_curve",
    "plot_outcome_table",
    "plot_trace",
    "plot_sweep",
]

_DPI = 150


def plot_alpha_table(rows, path: str) -> None:
    """Optimal access parameter and per-slot yield against K."""
    ks = [r.K for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, [r.alpha for r in rows], "o-", label="alpha(K)")
    ax.plot(ks, [r.expected_s for r in rows], "s--", label="E[S] per slot")
    ax.set_xlabel("K")
    ax.set_ylabel("value")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_throughput_curve(
    ks, throughputs, path: str, bound: tuple[float, list[float]] | None = None
) -> None:
    """Throughput per channel use against K, optionally with the fixed-load bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, throughputs, "o-", label="E[T] at alpha(K)")
    if bound is not None:
        delta, values = bound
        ax.plot(ks, values, "--", label=f"fixed-load bound, delta={delta:g}")
        ax.axhline(delta, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("K")
    ax.set_ylabel("throughput per channel use")
    ax.set_ylim(0, 1)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_outcome_table(rows, path: str) -> None:
    """Stacked slot-outcome probabilities at the optimal operating point."""
    ks = np.array([r.K for r in rows])
    idle = np.array([r.p_idle for r in rows])
    unres = np.array([r.p_unresolvable for r in rows])
    resolved = 1.0 - idle - unres
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(ks, idle, label="idle")
    ax.bar(ks, resolved, bottom=idle, label="resolved")
    ax.bar(ks, unres, bottom=idle + resolved, label="unresolvable")
    ax.set_xlabel("K")
    ax.set_ylabel("probability")
    ax.set_ylim(0, 1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_trace(trace, path: str) -> None:
    """Backlog vs estimate on top, access probability below."""
    t = np.arange(len(trace))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot(t, trace.N, lw=0.8, label="backlog N_t")
    ax1.plot(t, trace.n_hat, lw=0.8, label="estimate n_hat_t")
    ax1.set_ylabel("users")
    ax1.grid(True, alpha=0.3)
    ax1.legend(loc="upper left")
    ax2.plot(t, trace.q, lw=0.8, color="tab:green")
    ax2.set_xlabel("slot")
    ax2.set_ylabel("q_t")
    ax2.set_ylim(0, 1.05)
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_sweep(points, path: str) -> None:
    """Mean backlog and throughput across the arrival-rate sweep."""
    lams = [p.lam for p in points]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    stable = [not p.drift_detected for p in points]
    colors = ["tab:blue" if s else "tab:red" for s in stable]
    backlogs = [p.mean_backlog for p in points]
    ax1.scatter(lams, backlogs, c=colors)
    ax1.plot(lams, backlogs, lw=0.6, color="gray")
    if all(b > 0 for b in backlogs):
        ax1.set_yscale("log")
    ax1.set_ylabel("mean backlog")
    ax1.grid(True, alpha=0.3)
    ax2.scatter(lams, [p.throughput_per_second for p in points], c=colors)
    ax2.plot(lams, lams, ls=":", color="gray", lw=0.8, label="offered = carried")
    ax2.set_xlabel("arrival rate per time unit")
    ax2.set_ylabel("throughput per time unit")
    ax2.grid(True, alpha=0.3)
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
