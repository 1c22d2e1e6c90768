"""Self-contained SVG line plots of experiment curves."""

import io
from collections.abc import Sequence
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams.update(
    {
        "font.family": "DejaVu Sans",
        "axes.unicode_minus": False,
        "svg.hashsalt": "skewgraph",
        "svg.fonttype": "path",
    }
)

import matplotlib.pyplot as plt  # noqa: E402


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    band: Sequence[float] | None = None


@dataclass(frozen=True)
class PlotSpec:
    title: str
    xlabel: str
    ylabel: str
    series: tuple[Series, ...]
    log_y: bool = False


def render_svg(spec: PlotSpec) -> str:
    """Render the curves as SVG text; identical input gives identical bytes."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0), constrained_layout=True)
    try:
        for series in spec.series:
            xs = list(series.x)
            ys = list(series.y)
            ax.plot(xs, ys, marker="o", markersize=3, label=series.label)
            if series.band is not None:
                lower = [y - b for y, b in zip(ys, series.band)]
                upper = [y + b for y, b in zip(ys, series.band)]
                ax.fill_between(xs, lower, upper, alpha=0.2)
        if spec.log_y and all(y > 0 for s in spec.series for y in s.y):
            ax.set_yscale("log")
        ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.grid(True, alpha=0.3)
        if len(spec.series) > 1:
            ax.legend(loc="best", fontsize=8)
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        return buffer.getvalue()
    finally:
        plt.close(fig)
