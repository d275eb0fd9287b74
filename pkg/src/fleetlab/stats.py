"""Descriptive statistics: Pearson correlations, Welch t-tests, Cohen's d.

All functions are pure and operate on plain vectors; the only panel-aware
entry point is :func:`correlation_matrix`, which crosses the four weather
exposures with the four performance metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats as sps

from .engine import PanelDataset

__all__ = [
    "CorrelationEntry",
    "CorrelationMatrix",
    "pearson",
    "welch_t",
    "cohens_d",
    "correlation_matrix",
    "significance_stars",
]

WEATHER_VARS = ("rain_mm", "extreme_temp", "low_visibility", "wind_mps")
METRIC_VARS = ("revenue_per_min", "wait_min", "utilization", "daily_earnings")


@dataclass(frozen=True)
class CorrelationEntry:
    var_x: str
    var_y: str
    r: float
    p_value: float
    n: int

    def __post_init__(self) -> None:
        if not -1.0 <= self.r <= 1.0 + 1e-12:
            raise ValueError("r must lie in [-1, 1]")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")


@dataclass(frozen=True)
class CorrelationMatrix:
    entries: tuple[CorrelationEntry, ...]
    #: (var_x, var_y, reason) for pairs that could not be computed
    skipped: tuple[tuple[str, str, str], ...]

    def frame(self) -> pd.DataFrame:
        rows = [
            {
                "weather_var": e.var_x,
                "metric": e.var_y,
                "r": e.r,
                "p_value": e.p_value,
                "n": e.n,
                "stars": significance_stars(e.p_value),
            }
            for e in self.entries
        ]
        return pd.DataFrame(rows)


def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def pearson(x, y) -> CorrelationEntry:
    """Pearson correlation with a two-sided t-distribution p-value.

    Requires equal lengths of at least 3 and non-zero variance on both sides.
    """
    xa = _as_vector(x, "x")
    ya = _as_vector(y, "y")
    if len(xa) != len(ya):
        raise ValueError(f"length mismatch: {len(xa)} vs {len(ya)}")
    n = len(xa)
    if n < 3:
        raise ValueError("need at least 3 observations")
    if np.var(xa) == 0.0 or np.var(ya) == 0.0:
        raise ValueError("zero variance input")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    r = float(xc @ yc / np.sqrt((xc @ xc) * (yc @ yc)))
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * np.sqrt((n - 2) / (1.0 - r * r))
        p = float(2.0 * sps.t.sf(abs(t), n - 2))
    return CorrelationEntry("x", "y", r, p, n)


def welch_t(a, b) -> tuple[float, float, float]:
    """Welch two-sample t-test: (t, Welch-Satterthwaite df, two-sided p)."""
    aa = _as_vector(a, "a")
    ba = _as_vector(b, "b")
    if len(aa) < 2 or len(ba) < 2:
        raise ValueError("each sample needs at least 2 observations")
    va, vb = aa.var(ddof=1), ba.var(ddof=1)
    na, nb = len(aa), len(ba)
    denom = np.sqrt(va / na + vb / nb)
    if denom == 0.0:
        return 0.0, float(na + nb - 2), 1.0
    t = float((aa.mean() - ba.mean()) / denom)
    df = float((va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1)))
    p = float(2.0 * sps.t.sf(abs(t), df))
    return t, df, p


def cohens_d(a, b) -> float:
    """Standardized mean difference with the pooled standard deviation."""
    aa = _as_vector(a, "a")
    ba = _as_vector(b, "b")
    if len(aa) < 2 or len(ba) < 2:
        raise ValueError("each sample needs at least 2 observations")
    na, nb = len(aa), len(ba)
    pooled = np.sqrt(((na - 1) * aa.var(ddof=1) + (nb - 1) * ba.var(ddof=1)) / (na + nb - 2))
    if pooled == 0.0:
        if aa.mean() == ba.mean():
            return 0.0
        raise ValueError("zero pooled standard deviation")
    return float((aa.mean() - ba.mean()) / pooled)


def correlation_matrix(panel: PanelDataset) -> CorrelationMatrix:
    """Weather exposure x performance metric correlations on a pooled panel.

    Constant columns are surfaced as skipped pairs with a reason instead of
    raising, so one degenerate column cannot take down the whole matrix.
    """
    if panel.experiment != "cross_sectional":
        raise ValueError("correlation_matrix expects a cross-sectional panel")
    f = panel.frame
    entries: list[CorrelationEntry] = []
    skipped: list[tuple[str, str, str]] = []
    for wv in WEATHER_VARS:
        for mv in METRIC_VARS:
            try:
                e = pearson(f[wv].to_numpy(), f[mv].to_numpy())
            except ValueError as exc:
                skipped.append((wv, mv, str(exc)))
                continue
            entries.append(CorrelationEntry(wv, mv, e.r, e.p_value, e.n))
    return CorrelationMatrix(tuple(entries), tuple(skipped))
