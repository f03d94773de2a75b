"""Figure rendering for stability scans and convergence studies."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .stability import RegionScan

__all__ = ["save_convergence_figure", "save_stability_figure"]


def save_stability_figure(scan: RegionScan, path, title: str = "") -> None:
    """Shade the stable region |R| <= 1 and draw its boundary contour."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    capped = np.minimum(scan.magnitude, 2.0)
    ax.contourf(
        scan.re, scan.im, capped, levels=[0.0, 1.0], colors=["#9ecae1"], extend="max"
    )
    ax.contour(scan.re, scan.im, scan.magnitude, levels=[1.0], colors="k", linewidths=1.2)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.axvline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel("Re(z)")
    ax.set_ylabel("Im(z)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_convergence_figure(
    step_counts, errors, fitted_order: float, path, title: str = ""
) -> None:
    """Log-log error plot with the fitted slope and a matching reference line."""
    steps = np.asarray(step_counts, dtype=float)
    errs = np.asarray(errors, dtype=float)
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    ax.loglog(steps, errs, "o-", label=f"fitted order {fitted_order:.2f}")
    anchor = errs[0] * 1.5
    ax.loglog(
        steps,
        anchor * (steps / steps[0]) ** (-round(fitted_order)),
        "k--",
        lw=0.9,
        label=f"slope {round(fitted_order)}",
    )
    ax.set_xlabel("steps")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
