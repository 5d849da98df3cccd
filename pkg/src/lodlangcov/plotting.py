"""Figure rendering for analysis reports.

Renders the log-log coverage scatter and the category histogram to
image files next to the delimited outputs. Styling mirrors the usual
six-class color scheme for the NLP resource taxonomy.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analysis import JOSHI_NAMES, LodCategory

JOSHI_COLORS = {
    "Left-Behinds": "#2ca02c",
    "Scrapping-Bys": "#1f77b4",
    "Hopefuls": "#9467bd",
    "Rising Stars": "#ffdd57",
    "Underdogs": "#ff7f0e",
    "Winner": "#d62728",
}

LOD_COLORS = {
    "Missing": "#999999",
    "Low": "#d62728",
    "Medium": "#ffdd57",
    "High": "#2ca02c",
    "Unclassified": "#1f77b4",
}


def plot_scatter(report: dict, path: Union[str, Path], color_by: str = "joshi") -> None:
    """Scatter of article vs entity coverage, one dot per language."""
    rows = [r for r in report["rows"] if r["x"] is not None]
    fig, ax = plt.subplots(figsize=(7, 6))
    if color_by == "joshi":
        groups = list(JOSHI_NAMES)
        colors = JOSHI_COLORS
    else:
        groups = [c.value for c in LodCategory]
        colors = LOD_COLORS
    for group in groups:
        xs = [r["x"] for r in rows if r[color_by] == group]
        ys = [r["y"] for r in rows if r[color_by] == group]
        if xs:
            ax.scatter(xs, ys, s=18, alpha=0.8, label=group,
                       color=colors.get(group, "#333333"), edgecolors="none")
    rest = [r for r in rows if r[color_by] is None]
    if rest:
        ax.scatter([r["x"] for r in rest], [r["y"] for r in rest],
                   s=18, alpha=0.5, label="(unlabeled)", color="#333333",
                   edgecolors="none")
    lim = max([ax.get_xlim()[1], ax.get_ylim()[1], 1.0])
    ax.plot([0, lim], [0, lim], ls="--", lw=0.8, color="#888888", zorder=0)
    ax.set_xlabel("Wikipedia articles, log10(1+n)")
    ax.set_ylabel("KG entities, log10(1+n)")
    ax.set_title("Language coverage (log-log)")
    ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_category_histogram(report: dict, path: Union[str, Path]) -> None:
    """Bar chart of the formal resource-category counts."""
    histogram = report["metadata"]["category_histogram"]
    order = [c.value for c in LodCategory]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(order, [histogram.get(c, 0) for c in order],
           color=[LOD_COLORS[c] for c in order])
    ax.set_ylabel("languages")
    ax.set_title("Resource categories")
    for i, cat in enumerate(order):
        ax.text(i, histogram.get(cat, 0), str(histogram.get(cat, 0)),
                ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
