"""Accuracy-curve figures: median lines with interquartile bands."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SERIES_STYLE = {
    "ml": ("tab:blue", "ML model"),
    "overlay_sc": ("tab:orange", "Overlay (soft constraint)"),
    "overlay_hc": ("tab:green", "Overlay (hard constraint)"),
    "al_model": ("tab:red", "Active learning"),
}


def render_aggregate_plot(
    aggregate: dict[str, list[tuple[int, float, float, float]]],
    title: str,
    path,
) -> None:
    """Write a PNG of per-series medians with 25-75 percentile shadows.

    ``aggregate`` maps series name to (instances, median, p25, p75) rows, as
    produced by simulate.aggregate_curves.
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for series, rows in aggregate.items():
        xs = [r[0] for r in rows]
        med = [r[1] for r in rows]
        p25 = [r[2] for r in rows]
        p75 = [r[3] for r in rows]
        color, label = _SERIES_STYLE.get(series, (None, series))
        (line,) = ax.plot(xs, med, label=label, color=color)
        ax.fill_between(xs, p25, p75, color=line.get_color(), alpha=0.2, linewidth=0)
    ax.set_xlabel("instances")
    ax.set_ylabel("accuracy")
    ax.set_title(title)
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
