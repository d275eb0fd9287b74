"""Reference-shaped result tables with built-in tolerance checks.

Each builder returns a DataFrame carrying a ``status`` column ("pass" /
"fail" / "info") so the CLI can gate its exit code on the full check list.
Tolerances follow the shipped calibration contract; the ``strict`` profile
halves every band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .config import SimConfig
from .engine import PANEL_COLUMNS, PanelDataset, summarize
from .fleet import COMPONENT_NAMES, OperationalMode, skill_gap
from .stats import CorrelationMatrix, significance_stars

__all__ = [
    "ToleranceProfile",
    "PROFILES",
    "validate_panel_frame",
    "table1_productivity",
    "table2_components",
    "table4_skill",
    "table5_causal",
    "table7_correlations",
    "collect_failures",
]


@dataclass(frozen=True)
class ToleranceProfile:
    name: str
    scale: float  # multiplies every tolerance band


PROFILES = {
    "default": ToleranceProfile("default", 1.0),
    "strict": ToleranceProfile("strict", 0.5),
}

#: Reference values for the headline productivity comparison.
TABLE1_REFERENCE = {
    "revenue_per_min": {"traditional": 50.1, "weather_ai": 103.9, "improvement_pct": 107.3},
    "wait_min": {"traditional": 9.1, "weather_ai": 5.1, "improvement_pct": -43.8},
    "utilization": {"traditional": 48.1, "weather_ai": 78.4, "improvement_pct": 63.0},
    "daily_earnings": {"traditional": 15_493.0, "weather_ai": 53_326.0, "improvement_pct": 244.2},
}

#: Reference correlation matrix (weather exposure x performance metric).
TABLE7_REFERENCE = {
    "rain_mm": {"revenue_per_min": 0.575, "wait_min": 0.551, "utilization": 0.428, "daily_earnings": 0.522},
    "extreme_temp": {"revenue_per_min": 0.442, "wait_min": 0.287, "utilization": 0.356, "daily_earnings": 0.398},
    "low_visibility": {"revenue_per_min": -0.384, "wait_min": -0.298, "utilization": -0.267, "daily_earnings": -0.341},
    "wind_mps": {"revenue_per_min": 0.234, "wait_min": 0.167, "utilization": 0.201, "daily_earnings": 0.198},
}

#: Reference causal effects (yen/min except the IV row).
TABLE5_REFERENCE = {
    "event_study": 53.8,
    "did": 52.1,
    "rdd": 51.7,
    "psm": 54.2,
    "iv_2sls": 0.68,
}

TABLE4_REFERENCE = {
    "low": {"route_only_ai": 22.0, "weather_aware_ai": 104.2},
    "medium": {"route_only_ai": 8.0, "weather_aware_ai": 108.7},
    "high": {"route_only_ai": 3.0, "weather_aware_ai": 109.1},
}


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def validate_panel_frame(frame: pd.DataFrame, experiment: str) -> None:
    """Schema check for a panel read back from CSV; names the first problem."""
    for col in PANEL_COLUMNS:
        if col not in frame.columns:
            raise ValueError(f"panel schema mismatch: missing column {col!r}")
    if frame.empty:
        raise ValueError("panel schema mismatch: empty panel")
    numeric = [c for c in PANEL_COLUMNS if c not in ("mode", "skill")]
    for col in numeric:
        if not np.issubdtype(frame[col].dtype, np.number):
            raise ValueError(f"panel schema mismatch: non-numeric column {col!r}")
    if experiment == "rollout" and frame["treated"].nunique() < 2:
        raise ValueError("panel schema mismatch: rollout panel lacks treatment variation")


def table1_productivity(panel: PanelDataset, profile: ToleranceProfile = PROFILES["default"]) -> pd.DataFrame:
    """Headline comparison with per-row tolerance verdicts."""
    s = profile.scale
    summary = summarize(panel).set_index("metric")
    checks = {
        "revenue_per_min": [
            ("traditional", "rel", 0.03),
            ("improvement_pct", "abs", 5.0),
        ],
        "wait_min": [
            ("traditional", "rel", 0.05),
            ("improvement_pct", "abs", 5.0),
        ],
        "utilization": [
            ("traditional", "abs", 3.0),
            ("improvement_pct", "abs", 5.0),
        ],
        "daily_earnings": [
            ("traditional", "rel", 0.10),
            ("weather_ai", "rel", 0.10),
        ],
    }
    rows = []
    for metric, ref in TABLE1_REFERENCE.items():
        got = summary.loc[metric]
        ok = True
        described = []
        for field, kind, tol in checks[metric]:
            target = ref[field]
            value = got[field]
            if kind == "rel":
                band = abs(target) * tol * s
            else:
                band = tol * s
            hit = abs(value - target) <= band
            ok = ok and hit
            described.append(f"{field} within {band:.4g} of {target}")
        rows.append(
            {
                "metric": metric,
                "traditional": got["traditional"],
                "weather_ai": got["weather_ai"],
                "improvement_pct": got["improvement_pct"],
                "ref_traditional": ref["traditional"],
                "ref_weather_ai": ref["weather_ai"],
                "ref_improvement_pct": ref["improvement_pct"],
                "check": "; ".join(described),
                "status": _status(ok),
            }
        )
    return pd.DataFrame(rows)


def table2_components(
    panel: PanelDataset, cfg: SimConfig, profile: ToleranceProfile = PROFILES["default"]
) -> pd.DataFrame:
    """Component decomposition: configured contributions plus the empirical
    long-run realization recovered from the cross-sectional panel."""
    f = panel.frame
    ai = f[f["mode"] == OperationalMode.WEATHER_AWARE_AI.value]
    acc = ai["forecast_correct"].mean() if len(ai) else float("nan")
    from .weather import forecast_accuracy

    nominal_acc = forecast_accuracy(cfg, 180.0)
    lo, hi = cfg.positioning_weather_ai
    any_event = (
        (ai[["heavy_rain", "extreme_temp", "low_visibility", "high_wind"]].sum(axis=1) > 0)
        .mean()
        if len(ai)
        else float("nan")
    )
    gains = dict(zip(COMPONENT_NAMES, cfg.component_gains_pct))
    empirical = {
        "weather_prediction": gains["weather_prediction"] * acc / nominal_acc,
        "positioning": gains["positioning"]
        * float((ai["positioning_eff"].mean() - lo) / ((hi - lo) / 2.0))
        if len(ai)
        else float("nan"),
        "route": gains["route"],
        "dynamic_pricing": gains["dynamic_pricing"] * any_event / cfg.pricing_event_share,
        "integration": gains["integration"],
    }
    rows = []
    for name in COMPONENT_NAMES:
        rows.append(
            {
                "component": name,
                "configured_pct": gains[name],
                "empirical_pct": empirical[name],
                "status": "info",
            }
        )
    total_cfg = sum(gains.values())
    total_emp = sum(empirical.values())
    exact = math.isclose(sum(r["configured_pct"] for r in rows), total_cfg, rel_tol=0, abs_tol=0)
    rows.append(
        {
            "component": "total",
            "configured_pct": total_cfg,
            "empirical_pct": total_emp,
            "status": _status(exact),
        }
    )
    band = 5.0 * profile.scale
    share_ok = abs(empirical["weather_prediction"] - gains["weather_prediction"]) <= band
    rows.append(
        {
            "component": "weather_prediction_share_check",
            "configured_pct": gains["weather_prediction"],
            "empirical_pct": empirical["weather_prediction"],
            "status": _status(share_ok),
        }
    )
    return pd.DataFrame(rows)


def table4_skill(cfg: SimConfig, profile: ToleranceProfile = PROFILES["default"]) -> pd.DataFrame:
    """Skill-level gains with the directional skill-gap comparison."""
    band = 5.0 * profile.scale
    rows = []
    for i, skill in enumerate(("low", "medium", "high")):
        route = cfg.route_only_gains_pct[i]
        weather = cfg.weather_ai_gains_pct[i]
        ref = TABLE4_REFERENCE[skill]
        ok = (
            abs(route - ref["route_only_ai"]) <= band
            and abs(weather - ref["weather_aware_ai"]) <= band
        )
        rows.append(
            {
                "skill_level": skill,
                "route_only_ai_pct": route,
                "weather_aware_ai_pct": weather,
                "difference_pct": weather - route,
                "ref_route_only_pct": ref["route_only_ai"],
                "ref_weather_aware_pct": ref["weather_aware_ai"],
                "status": _status(ok),
            }
        )
    gap_trad = skill_gap(OperationalMode.TRADITIONAL, cfg)
    gap_route = skill_gap(OperationalMode.ROUTE_ONLY_AI, cfg)
    gap_weather = skill_gap(OperationalMode.WEATHER_AWARE_AI, cfg)
    red_route = (gap_trad - gap_route) / gap_trad * 100.0
    red_weather = (gap_trad - gap_weather) / gap_trad * 100.0
    rows.append(
        {
            "skill_level": "gap_reduction_route_pct",
            "route_only_ai_pct": red_route,
            "status": "info",
        }
    )
    rows.append(
        {
            "skill_level": "gap_reduction_weather_pct",
            "weather_aware_ai_pct": red_weather,
            "status": _status(red_weather >= red_route),
        }
    )
    return pd.DataFrame(rows)


def table5_causal(suite, profile: ToleranceProfile = PROFILES["default"]) -> pd.DataFrame:
    """Causal summary: one row per method plus the validity checks."""
    s = profile.scale
    rows = []
    effects = []
    for est in suite.estimates:
        ref = TABLE5_REFERENCE.get(est.method)
        if est.unit == "yen_per_min":
            band = 53.8 * 0.15 * s
            ok = abs(est.effect - 53.8) <= band
            effects.append(est.effect)
        else:
            band = 0.68 * 0.30 * s
            ok = abs(est.effect - 0.68) <= band
        rows.append(
            {
                "method": est.method,
                "effect": est.effect,
                "unit": est.unit,
                "pct_impact": est.pct_impact,
                "se": est.se,
                "t": est.t,
                "p": est.p,
                "n": est.n,
                "reference": ref,
                "status": _status(ok),
                "notes": est.notes,
            }
        )
    for method, msg in suite.errors:
        rows.append({"method": method, "status": "fail", "notes": f"error: {msg}"})

    if effects:
        spread = (max(effects) - min(effects)) / (sum(effects) / len(effects)) * 100.0
        rows.append(
            {
                "method": "pairwise_spread_pct",
                "effect": spread,
                "status": _status(spread <= 15.0 * s),
            }
        )
    if suite.event_study is not None:
        rows.append(
            {
                "method": "pre_trend_joint_p",
                "effect": suite.event_study.pre_trend_p,
                "status": _status(suite.event_study.pre_trend_p > 0.05),
            }
        )
    if suite.parallel_trends is not None:
        rows.append(
            {
                "method": "parallel_trends_p",
                "effect": suite.parallel_trends.p,
                "status": _status(suite.parallel_trends.p > 0.05),
                "notes": (
                    f"F={suite.parallel_trends.F:.3f} df=({suite.parallel_trends.df1},"
                    f"{suite.parallel_trends.df2}); nominal dummy count "
                    f"{suite.parallel_trends.df1_nominal}"
                ),
            }
        )
    if suite.first_stage_F is not None:
        rows.append(
            {
                "method": "first_stage_F",
                "effect": suite.first_stage_F,
                "status": _status(suite.first_stage_F > 10.0),
            }
        )
    if suite.placebo is not None:
        rows.append(
            {
                "method": "placebo_significant_share",
                "effect": suite.placebo.significant_share,
                "status": _status(suite.placebo.significant_share <= 0.10),
                "notes": f"true-dates DiD p={suite.placebo.true_p:.3g}",
            }
        )
    return pd.DataFrame(rows)


def table7_correlations(
    matrix: CorrelationMatrix, profile: ToleranceProfile = PROFILES["default"]
) -> pd.DataFrame:
    """Correlation matrix with per-entry tolerance or sign verdicts."""
    s = profile.scale
    rows = []
    by_pair = {(e.var_x, e.var_y): e for e in matrix.entries}
    for wv, refs in TABLE7_REFERENCE.items():
        for mv, ref_r in refs.items():
            e = by_pair.get((wv, mv))
            if e is None:
                reason = next(
                    (r for x, y, r in matrix.skipped if x == wv and y == mv), "missing"
                )
                rows.append(
                    {"weather_var": wv, "metric": mv, "ref_r": ref_r, "status": "fail", "notes": reason}
                )
                continue
            if wv in ("rain_mm", "extreme_temp"):
                band = (0.05 if (wv, mv) == ("rain_mm", "revenue_per_min") else 0.08) * s
                ok = abs(e.r - ref_r) <= band
                check = f"|r - {ref_r}| <= {band:.3g}"
            else:
                ok = (e.r > 0) == (ref_r > 0) and e.r != 0
                check = "sign match"
            rows.append(
                {
                    "weather_var": wv,
                    "metric": mv,
                    "r": e.r,
                    "p_value": e.p_value,
                    "stars": significance_stars(e.p_value),
                    "n": e.n,
                    "ref_r": ref_r,
                    "check": check,
                    "status": _status(ok),
                }
            )
    return pd.DataFrame(rows)


def collect_failures(tables: dict[str, pd.DataFrame]) -> list[str]:
    """List every failing check as 'table:row' labels."""
    failures = []
    for name, frame in tables.items():
        if "status" not in frame.columns:
            continue
        bad = frame[frame["status"] == "fail"]
        for _, row in bad.iterrows():
            label = row.get("metric") or row.get("method") or row.get("component") or row.get(
                "skill_level"
            ) or f"{row.get('weather_var')}x{row.get('metric')}"
            failures.append(f"{name}:{label}")
    return failures
