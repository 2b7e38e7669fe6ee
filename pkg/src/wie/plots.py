"""Figure rendering for the report path.

Figures are written next to the delimited output whenever a scenario's
output formats include "png"; the data files never depend on them.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KW = {"dpi": 150, "bbox_inches": "tight"}


def plot_trajectory(t, y, dy, d2y, ref_pos, path, title: str):
    """Three stacked panels: position, velocity, acceleration over the window."""
    fig, axes = plt.subplots(3, 1, figsize=(7.0, 8.0), sharex=True)
    n_dim = y.shape[1]
    for c in range(n_dim):
        label = f"component {c + 1}" if n_dim > 1 else "minimizer"
        axes[0].plot(t, y[:, c], label=label)
        axes[1].plot(t, dy[:, c])
        axes[2].plot(t, d2y[:, c])
    for c in range(n_dim):
        axes[0].plot(t, ref_pos[:, c], "k--", linewidth=1.0,
                     label="classical limit" if c == 0 else None)
    axes[0].set_ylabel("y")
    axes[1].set_ylabel("y'")
    axes[2].set_ylabel("y''")
    axes[2].set_xlabel("t")
    axes[0].legend(loc="best", fontsize=8)
    axes[0].set_title(title)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_sweep(h_values, metrics, empirical_rate, path, title: str):
    """Log-log error decay plus the weak-* gap and stationarity residual."""
    hs = np.asarray(h_values, dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.0))
    ax1.loglog(hs, [m.sup_err_y for m in metrics], "o-", label="sup |y_h - y|")
    ax1.loglog(hs, [m.sup_err_dy for m in metrics], "s-", label="sup |y_h' - y'|")
    if empirical_rate is not None:
        anchor = metrics[0].sup_err_y
        ax1.loglog(hs, anchor * (hs / hs[0]) ** (-empirical_rate), "k:",
                   label=f"rate {empirical_rate:.2f}")
    ax1.set_xlabel("h")
    ax1.set_ylabel("window error")
    ax1.legend(fontsize=8)
    ax1.set_title(title)
    ax2.loglog(hs, [max(m.weakstar_gap_ypp, 1e-300) for m in metrics], "o-",
               label="weak-* gap of y''")
    ax2.loglog(hs, [max(m.el_residual, 1e-300) for m in metrics], "s-",
               label="stationarity residual")
    ax2.set_xlabel("h")
    ax2.legend(fontsize=8)
    ax2.set_title("convergence diagnostics")
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
