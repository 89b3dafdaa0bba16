"""Render experiment curves to figure files next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .config import ExperimentConfig
from .experiments import RateCurve

__all__ = ["render_figure"]

_AXIS_LABELS = {
    "fig7a": ("number of one-bit slicers n_q", "high-SNR rate (bits/use)"),
    "fig7b": ("number of one-bit slicers n_q", "rate loss vs large-block limit (bits/use)"),
    "fig8": ("user-1 rate (bits/use)", "user-2 rate (bits/use)"),
    "fig9a": ("SNR (dB)", "rate (bits/use)"),
    "fig9b": ("SNR (dB)", "per-user rate (bits/use)"),
    "regions": ("number of hyperplanes", "fraction of seeds matching the formula"),
    "rate-ptp": ("SNR (dB)", "rate (bits/use)"),
    "rate-bc": ("SNR (dB)", "per-user rate (bits/use)"),
    "high-snr": ("number of one-bit slicers n_q", "high-SNR rate (bits/use)"),
}


def render_figure(path: str, curves: list[RateCurve], config: ExperimentConfig) -> None:
    """Draw every curve on one axes and save the figure to ``path``."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    region_plot = config.experiment == "fig8"
    for curve in curves:
        if any(e > 0 for e in curve.stderr):
            ax.errorbar(curve.x, curve.values, yerr=curve.stderr,
                        marker="o", markersize=3, capsize=2, label=curve.scheme)
        else:
            style = "-" if not region_plot else "-o"
            ax.plot(curve.x, curve.values, style, markersize=3, label=curve.scheme)
    xlabel, ylabel = _AXIS_LABELS.get(config.experiment, ("x", "value"))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{config.experiment} (seed {config.master_seed}, trials {config.trials})")
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
