"""Figure rendering for report outputs (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["save_power_plot", "save_roc_plot"]


def save_power_plot(path, series, title=None, log_x=True) -> Path:
    """Plot (alphas, powers, label) triples on one power-vs-error figure."""
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for alphas, powers, label in series:
        ax.plot(alphas, powers, label=label)
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("power")
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_roc_plot(path, curve, bound=None, title=None) -> Path:
    """Plot an empirical ROC (linear axes) with an optional theory overlay."""
    fig, ax = plt.subplots(figsize=(5.4, 5.2))
    ax.plot(curve.alphas, curve.betas, label=f"empirical (AUC {curve.auc:.4f})")
    if bound is not None:
        ax.plot(bound.alphas, bound.betas, "--", label=f"bound (AUC {bound.auc:.4f})")
    ax.plot([0, 1], [0, 1], ":", color="grey", linewidth=1, label="chance")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("power")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
