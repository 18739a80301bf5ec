"""SVG figure writers for run and sweep summaries.

All figures are written as SVG with fixed hash salt and no embedded date,
so repeated runs of the same experiment produce byte-identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "relaxns"

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_energy_decay(energy_rows, path):
    """Physical energy and dissipation rate against time."""
    ts = np.array([e.t for e in energy_rows])
    e_phys = np.array([e.e_phys for e in energy_rows])
    diss = np.array([e.diss_rate for e in energy_rows])
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax0.plot(ts, e_phys, lw=1.2)
    ax0.set_ylabel("physical energy")
    ax1.plot(ts, diss, lw=1.2, color="tab:red")
    ax1.set_ylabel("dissipation rate")
    ax1.set_xlabel("t")
    for ax in (ax0, ax1):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def plot_snapshots(states, grid, path, fields=("v", "u", "S")):
    """Profiles of the recorded snapshots, one panel per field."""
    fig, axes = plt.subplots(len(fields), 1, figsize=(6.0, 2.4 * len(fields)),
                             sharex=True)
    if len(fields) == 1:
        axes = [axes]
    for ax, name in zip(axes, fields):
        for s in states:
            ax.plot(grid.x, getattr(s, name), lw=0.9, label=f"t = {s.t:.3g}")
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("x")
    if len(states) <= 8:
        axes[0].legend(fontsize=7, ncol=2)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(rows, path, xlabel, metric="sup_distance"):
    """Log-log plot of a sweep metric against the swept parameter."""
    done = [r for r in rows if r.get("status") == "completed" and metric in r]
    xs = np.array([r["param_value"] for r in done])
    ys = np.array([r[metric] for r in done])
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(xs, ys, "o-", lw=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(metric.replace("_", " "))
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    return _save(fig, path)


def plot_convergence(rows, path, order=None):
    """MMS errors against dx with an optional fitted-order guide line."""
    dxs = np.array([r["dx"] for r in rows])
    errs = np.array([r["err_total"] for r in rows])
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.loglog(dxs, errs, "o-", lw=1.2, label="composite L2 error")
    if order is not None:
        guide = errs[0] * (dxs / dxs[0]) ** 2
        ax.loglog(dxs, guide, "--", color="gray", lw=1.0, label="slope 2")
        ax.set_title(f"fitted order {order:.3f}")
    ax.set_xlabel("dx")
    ax.set_ylabel("error")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    return _save(fig, path)
