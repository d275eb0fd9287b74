"""Multi-panel figure layouts built from fleetlab's CSV artifacts.

Each figure is described by a FigureSpec naming its input CSVs and output
stem. Rendering validates that every input exists and carries the expected
columns, then writes both a raster (PNG) and a vector (SVG) file. All SVG
metadata that would vary between runs is stripped so identical inputs give
identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# Fixed hash salt so SVG element ids do not vary between runs.
matplotlib.rcParams["svg.hashsalt"] = "fleetfigs"

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

#: columns each input CSV must provide.
SCHEMAS = {
    "table1_productivity.csv": ("metric", "traditional", "weather_ai", "improvement_pct"),
    "table2_components.csv": ("component", "configured_pct", "empirical_pct"),
    "table4_skill.csv": ("skill_level", "route_only_ai_pct", "weather_aware_ai_pct"),
    "table7_correlations.csv": ("weather_var", "metric", "r", "stars"),
    "econ_comparison.csv": ("quantity", "as_computed", "reference", "delta"),
    "econ_sensitivity.csv": ("scenario", "weather_ai_roi_pct", "route_ai_roi_pct", "ratio"),
    "table5_causal.csv": ("method", "effect", "se", "unit"),
    "event_study.csv": ("k", "beta", "se", "is_reference"),
    "placebo.csv": ("battery", "draw", "effect", "t"),
}

FIGURE_INPUTS = {
    "main_comparison": ("table1_productivity.csv",),
    "component_analysis": ("table2_components.csv", "table4_skill.csv"),
    "weather_intelligence": ("table7_correlations.csv",),
    "economic_impact": ("econ_comparison.csv", "econ_sensitivity.csv"),
    "causal_analysis": ("event_study.csv", "table5_causal.csv", "placebo.csv"),
}

FIGURE_IDS = tuple(FIGURE_INPUTS)

MODE_COLORS = {"traditional": "#8da0cb", "weather_ai": "#fc8d62"}


class RenderError(RuntimeError):
    """Raised for missing inputs or schema mismatches."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: tuple[Path, ...]
    output_stem: Path

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_INPUTS:
            raise RenderError(
                f"unknown figure id {self.figure_id!r}; choose from {', '.join(FIGURE_IDS)}"
            )


def build_spec(figure_id: str, csv_dir: Path, out_dir: Path) -> FigureSpec:
    inputs = tuple(Path(csv_dir) / name for name in FIGURE_INPUTS.get(figure_id, ()))
    return FigureSpec(figure_id, inputs, Path(out_dir) / figure_id)


def _load(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise RenderError(f"missing input file: {path}")
    frame = pd.read_csv(path)
    required = SCHEMAS[path.name]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise RenderError(f"{path}: missing columns: {', '.join(missing)}")
    return frame


def _save(fig, stem: Path) -> tuple[Path, Path]:
    stem.parent.mkdir(parents=True, exist_ok=True)
    png = stem.with_suffix(".png")
    svg = stem.with_suffix(".svg")
    fig.savefig(png, dpi=150)
    fig.savefig(svg, metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return png, svg


def _panel_bars(ax, table, metric, title, ylabel):
    row = table.set_index("metric").loc[metric]
    ax.bar(
        ["Traditional", "Weather AI"],
        [row["traditional"], row["weather_ai"]],
        color=[MODE_COLORS["traditional"], MODE_COLORS["weather_ai"]],
    )
    ax.set_title(f"{title}\n({row['improvement_pct']:+.1f}%)")
    ax.set_ylabel(ylabel)


def _render_main_comparison(spec: FigureSpec):
    table = _load(spec.inputs[0])
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    _panel_bars(axes[0, 0], table, "revenue_per_min", "Revenue per minute", "yen/min")
    _panel_bars(axes[0, 1], table, "utilization", "Utilization", "%")
    _panel_bars(axes[1, 0], table, "daily_earnings", "Daily earnings", "yen")
    _panel_bars(axes[1, 1], table, "wait_min", "Passenger wait", "minutes")
    fig.suptitle("Fleet productivity by operational mode")
    fig.tight_layout()
    return fig


def _render_component_analysis(spec: FigureSpec):
    comp = _load(spec.inputs[0])
    skill = _load(spec.inputs[1])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))

    x = np.arange(len(comp))
    width = 0.4
    ax1.bar(x - width / 2, comp["configured_pct"], width, label="configured")
    ax1.bar(x + width / 2, comp["empirical_pct"].fillna(0.0), width, label="empirical")
    ax1.set_xticks(x)
    ax1.set_xticklabels([c.replace("_", "\n") for c in comp["component"]], fontsize=8)
    ax1.set_ylabel("gain (pp)")
    ax1.set_title("Improvement decomposition")
    ax1.legend()

    x = np.arange(len(skill))
    ax2.bar(x - width / 2, skill["route_only_ai_pct"], width, label="route-only AI")
    ax2.bar(x + width / 2, skill["weather_aware_ai_pct"], width, label="weather-aware AI")
    ax2.set_xticks(x)
    ax2.set_xticklabels(skill["skill_level"])
    ax2.set_ylabel("gain vs traditional (%)")
    ax2.set_title("Gains by driver skill")
    ax2.legend()

    fig.suptitle("AI component contributions")
    fig.tight_layout()
    return fig


def _render_weather_intelligence(spec: FigureSpec):
    table = _load(spec.inputs[0])
    grid = table.pivot(index="weather_var", columns="metric", values="r")
    stars = table.pivot(index="weather_var", columns="metric", values="stars").fillna("")
    fig, ax = plt.subplots(figsize=(7.5, 5))
    im = ax.imshow(grid.to_numpy(), cmap="RdBu_r", vmin=-1, vmax=1)
    ax.set_xticks(range(grid.shape[1]))
    ax.set_xticklabels(grid.columns, rotation=30, ha="right")
    ax.set_yticks(range(grid.shape[0]))
    ax.set_yticklabels(grid.index)
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            ax.text(
                j, i, f"{grid.iat[i, j]:.3f}{stars.iat[i, j]}",
                ha="center", va="center", fontsize=8,
            )
    fig.colorbar(im, ax=ax, label="Pearson r")
    ax.set_title("Weather vs operational metrics")
    fig.tight_layout()
    return fig


def _render_economic_impact(spec: FigureSpec):
    comp = _load(spec.inputs[0]).set_index("quantity")
    sens = _load(spec.inputs[1])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))

    rois = comp.loc[["weather_roi_pct", "route_roi_pct"]]
    x = np.arange(len(rois))
    width = 0.4
    ax1.bar(x - width / 2, rois["as_computed"], width, label="as computed")
    ax1.bar(x + width / 2, rois["reference"], width, label="reference")
    ax1.set_xticks(x)
    ax1.set_xticklabels(["weather AI", "route-only AI"])
    ax1.set_ylabel("ROI (%)")
    ax1.set_title("First-year ROI")
    ax1.legend()

    x = np.arange(len(sens))
    ax2.plot(x, sens["weather_ai_roi_pct"], marker="o", label="weather AI")
    ax2.plot(x, sens["route_ai_roi_pct"], marker="s", label="route-only AI")
    for xi, ratio in zip(x, sens["ratio"]):
        ax2.annotate(f"{ratio:.2f}x", (xi, sens["weather_ai_roi_pct"].iat[xi]),
                     textcoords="offset points", xytext=(0, 8), ha="center", fontsize=8)
    ax2.set_xticks(x)
    ax2.set_xticklabels(sens["scenario"])
    ax2.set_ylabel("ROI (%)")
    ax2.set_title("Benefit sensitivity (ratio annotated)")
    ax2.legend()

    fig.suptitle("Adoption economics")
    fig.tight_layout()
    return fig


def _render_causal_analysis(spec: FigureSpec):
    es = _load(spec.inputs[0]).sort_values("k")
    t5 = _load(spec.inputs[1])
    pl = _load(spec.inputs[2])
    fig, axes = plt.subplots(1, 3, figsize=(13, 4.2))

    ax = axes[0]
    ax.axvline(0, color="grey", lw=1, ls="--")
    ax.axhline(0, color="grey", lw=0.5)
    ax.errorbar(es["k"], es["beta"], yerr=1.96 * es["se"], fmt="o", ms=3, lw=0.8)
    ax.set_xlabel("days relative to adoption")
    ax.set_ylabel("effect (yen/min)")
    ax.set_title("Event study")

    ax = axes[1]
    yen = t5[t5["unit"] == "yen_per_min"]
    y = np.arange(len(yen))
    ax.errorbar(yen["effect"], y, xerr=1.96 * yen["se"], fmt="o")
    ax.set_yticks(y)
    ax.set_yticklabels(yen["method"])
    ax.invert_yaxis()
    ax.set_xlabel("effect (yen/min)")
    ax.set_title("Estimates across methods")

    ax = axes[2]
    for battery, sub in pl.groupby("battery"):
        ax.hist(sub["effect"], bins=15, alpha=0.6, label=battery)
    ax.axvline(0, color="grey", lw=1)
    ax.set_xlabel("placebo effect (yen/min)")
    ax.set_title("Placebo distributions")
    ax.legend(fontsize=8)

    fig.suptitle("Causal analysis of AI adoption")
    fig.tight_layout()
    return fig


_RENDERERS = {
    "main_comparison": _render_main_comparison,
    "component_analysis": _render_component_analysis,
    "weather_intelligence": _render_weather_intelligence,
    "economic_impact": _render_economic_impact,
    "causal_analysis": _render_causal_analysis,
}


def render(spec: FigureSpec) -> tuple[Path, Path]:
    """Render one figure; returns the (png, svg) output paths."""
    for path in spec.inputs:
        if not path.exists():
            raise RenderError(f"missing input file: {path}")
    fig = _RENDERERS[spec.figure_id](spec)
    return _save(fig, spec.output_stem)
