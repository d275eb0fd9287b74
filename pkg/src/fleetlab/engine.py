"""Composes weather, market, and fleet policy into driver-period panels.

Two experiments share one vocabulary of columns:

* cross-sectional: trip-level records over 30 days, traditional vs
  weather-aware arms, used for the productivity tables and correlations.
* rollout: a balanced driver x day panel over 120 days with staggered AI
  implementation, used by the causal estimators.

Trip revenue is multiplicative: base rate x skill/mode level x weather
response x time-of-week factor x lognormal noise.  The rollout panel keeps
the same traditional baseline but applies the treatment as a level shift
(plus a heavy-rain bonus), so that weather variation identifies the
effectiveness channel without conflating it with the baseline surge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from . import market, weather
from .config import SimConfig, config_hash, spawn_stream
from .fleet import OperationalMode, make_fleet

__all__ = [
    "PanelDataset",
    "PANEL_COLUMNS",
    "run_cross_sectional",
    "run_staggered_rollout",
    "summarize",
]

#: Documented column order for every panel CSV.
PANEL_COLUMNS = [
    "driver_id",
    "day",
    "period",
    "mode",
    "treated",
    "relative_day",
    "revenue_per_min",
    "wait_min",
    "utilization",
    "daily_earnings",
    "rain_mm",
    "temp_c",
    "wind_mps",
    "visibility_km",
    "heavy_rain",
    "extreme_temp",
    "low_visibility",
    "high_wind",
    "skill",
    "experience_years",
    "day_of_week",
    "forecast_correct",
    "positioning_eff",
]

_SKILL_NAMES = np.array(["low", "medium", "high"])


@dataclass(frozen=True)
class PanelDataset:
    frame: pd.DataFrame
    experiment: str  # "cross_sectional" | "rollout"
    manifest: dict

    def __post_init__(self) -> None:
        if self.experiment not in ("cross_sectional", "rollout"):
            raise ValueError(f"unknown experiment tag: {self.experiment}")


def _hourly_weather_response(cfg: SimConfig, series: pd.DataFrame) -> pd.DataFrame:
    """Per-hour revenue/wait/utilization response factors.

    The revenue factor combines the flag-based fare and demand multipliers
    with a continuous rain surge, a low-visibility operational slowdown, and
    a small wind term.  Wait and utilization use their own response shapes.
    """
    flags = weather.classify_frame(series, cfg)
    rain = series["rain_mm"].to_numpy()
    wind = series["wind_mps"].to_numpy()
    hr = flags["heavy_rain"].to_numpy()
    et = flags["extreme_temp"].to_numpy()
    lv = flags["low_visibility"].to_numpy()
    hw = flags["high_wind"].to_numpy()

    fare = (
        np.where(hr, 1.0 + cfg.fare_heavy_rain_uplift, 1.0)
        * np.where(et, 1.0 + cfg.fare_extreme_temp_uplift, 1.0)
        * np.where(lv, 1.0 + cfg.fare_low_visibility_uplift, 1.0)
        * np.where(hw, 1.0 + cfg.fare_high_wind_uplift, 1.0)
    )
    demand = (
        np.where(hr, 1.0 + cfg.demand_heavy_rain_uplift, 1.0)
        * np.where(et, 1.0 + cfg.demand_extreme_temp_uplift, 1.0)
        * np.where(lv, 1.0 + cfg.demand_low_visibility_uplift, 1.0)
        * np.where(hw, 1.0 + cfg.demand_high_wind_uplift, 1.0)
    )
    wind_c = (wind - cfg.wind_mean_mps) / max(cfg.wind_mean_mps, 1e-9)
    revenue = (
        fare
        * demand**cfg.demand_passthrough
        * (1.0 + cfg.rain_revenue_slope * rain)
        * (1.0 - cfg.visibility_slowdown * lv)
        * (1.0 + cfg.wind_revenue_uplift * wind_c * cfg.wind_mean_mps)
    )

    rain_sat5 = np.minimum(rain, 5.0) / 5.0
    wait_shape = (
        1.0
        + cfg.wait_rain_subthreshold * rain_sat5
        + cfg.wait_extreme_temp_uplift * et
        - cfg.wait_low_visibility_drop * lv
        + cfg.wait_high_wind_uplift * wind_c
    )
    wait_trad = wait_shape * np.where(hr, 1.0 + cfg.wait_heavy_rain_traditional, 1.0)
    wait_ai = wait_shape * np.where(hr, 1.0 + cfg.wait_heavy_rain_weather_ai, 1.0)

    rain_sat6 = np.minimum(rain, 6.0) / 6.0
    util_shape = (
        1.0
        + cfg.util_rain_uplift * rain_sat6
        + cfg.util_heavy_rain_uplift * hr
        + cfg.util_extreme_temp_uplift * et
        - cfg.util_low_visibility_drop * lv
        + cfg.util_high_wind_uplift * wind_c
    )

    out = flags.copy()
    out["revenue_factor"] = revenue
    out["wait_factor_traditional"] = np.maximum(wait_trad, 0.1)
    out["wait_factor_ai"] = np.maximum(wait_ai, 0.1)
    out["util_factor"] = np.maximum(util_shape, 0.05)
    out["any_event"] = hr | et | lv | hw
    return out


def _mode_level(cfg: SimConfig, is_ai: np.ndarray, skill: np.ndarray, contribution: np.ndarray) -> np.ndarray:
    """Expected-revenue level per record (traditional mean = 1).

    AI records realize their skill-specific gain through the per-record
    component contribution, which averages the configured component total.
    """
    total = sum(cfg.component_gains_pct)
    gains = np.asarray(cfg.weather_ai_gains_pct)[skill]
    mults = np.asarray(cfg.skill_multipliers)[skill]
    ai_level = 1.0 + (gains / total) * contribution / 100.0
    return np.where(is_ai, ai_level, mults)


def run_cross_sectional(cfg: SimConfig) -> PanelDataset:
    """Trip-level comparison panel: n_traditional + n_ai records."""
    wrng = spawn_stream(cfg, "weather")
    trng = spawn_stream(cfg, "trips")
    frng = spawn_stream(cfg, "forecast")

    series = weather.generate_weather_series(cfg, wrng, days=cfg.days_cross_sectional)
    response = _hourly_weather_response(cfg, series)

    n = cfg.n_traditional_trips + cfg.n_ai_trips
    is_ai = np.zeros(n, dtype=bool)
    is_ai[cfg.n_traditional_trips :] = True

    day0 = trng.integers(0, cfg.days_cross_sectional, size=n)
    hour = trng.integers(0, 24, size=n)
    idx = day0 * 24 + hour
    dow = day0 % 7
    shares = np.asarray(cfg.skill_shares)
    skill = trng.choice(3, size=n, p=shares / shares.sum())
    experience = np.round(trng.uniform(1.0, 25.0, size=n), 1)

    profile = market._profile(cfg)
    tfac = profile[hour, dow]

    # Mechanism draws: forecast correctness (AI only), positioning efficiency.
    acc = weather.forecast_accuracy(cfg, 180.0)
    correct = frng.random(n) < acc
    correct[~is_ai] = False
    lo_t, hi_t = cfg.positioning_traditional
    lo_a, hi_a = cfg.positioning_weather_ai
    eff = np.where(is_ai, trng.uniform(lo_a, hi_a, size=n), trng.uniform(lo_t, hi_t, size=n))

    # Component contributions (pp on the traditional mean rate).
    comp = np.asarray(cfg.component_gains_pct)
    any_event = response["any_event"].to_numpy()[idx]
    c_weather = comp[0] * correct / acc
    half_band = max((hi_a - lo_a) / 2.0, 1e-9)
    c_pos = comp[1] * np.clip((eff - lo_a) / half_band, 0.0, None) * is_ai
    c_price = comp[2] * 0.0 + comp[3] * any_event / max(cfg.pricing_event_share, 1e-9) * is_ai
    contribution = c_weather + c_pos + comp[2] + c_price + comp[4]

    level = _mode_level(cfg, is_ai, skill, contribution)
    rev_factor = response["revenue_factor"].to_numpy()[idx]
    sigma = cfg.revenue_noise_sigma
    noise = np.exp(trng.normal(-0.5 * sigma**2, sigma, size=n))
    revenue = cfg.base_revenue_per_min * cfg.revenue_scale * level * rev_factor * tfac * noise

    wait_factor = np.where(
        is_ai,
        response["wait_factor_ai"].to_numpy()[idx],
        response["wait_factor_traditional"].to_numpy()[idx],
    )
    base_wait = np.where(is_ai, cfg.base_wait_weather_ai_min, cfg.base_wait_traditional_min)
    wait = base_wait * wait_factor + trng.normal(0.0, cfg.wait_noise_sd_min, size=n)
    wait = np.maximum(wait, 0.3)

    avail = np.where(is_ai, cfg.avail_weather_ai, cfg.avail_traditional)
    util_factor = response["util_factor"].to_numpy()[idx]
    util_noise = 1.0 + trng.normal(0.0, cfg.util_noise_sd, size=n)
    util = np.clip(eff * avail * util_factor * util_noise, 0.02, 0.99)

    earnings = revenue * cfg.working_minutes_per_day * util

    frame = pd.DataFrame(
        {
            "driver_id": np.arange(n),
            "day": day0 + 1,
            "period": hour,
            "mode": np.where(
                is_ai, OperationalMode.WEATHER_AWARE_AI.value, OperationalMode.TRADITIONAL.value
            ),
            "treated": is_ai.astype(int),
            "relative_day": np.full(n, np.nan),
            "revenue_per_min": revenue,
            "wait_min": wait,
            "utilization": util,
            "daily_earnings": earnings,
            "rain_mm": series["rain_mm"].to_numpy()[idx],
            "temp_c": series["temp_c"].to_numpy()[idx],
            "wind_mps": series["wind_mps"].to_numpy()[idx],
            "visibility_km": series["visibility_km"].to_numpy()[idx],
            "heavy_rain": response["heavy_rain"].to_numpy()[idx].astype(int),
            "extreme_temp": response["extreme_temp"].to_numpy()[idx].astype(int),
            "low_visibility": response["low_visibility"].to_numpy()[idx].astype(int),
            "high_wind": response["high_wind"].to_numpy()[idx].astype(int),
            "skill": _SKILL_NAMES[skill],
            "experience_years": experience,
            "day_of_week": dow,
            "forecast_correct": correct.astype(int),
            "positioning_eff": eff,
        }
    )[PANEL_COLUMNS]
    manifest = {"config_hash": config_hash(cfg), "seed": cfg.seed, "experiment": "cross_sectional"}
    return PanelDataset(frame, "cross_sectional", manifest)


def _day_aggregates(cfg: SimConfig, series: pd.DataFrame) -> pd.DataFrame:
    """Collapse the hourly series and responses to day-level exposure."""
    response = _hourly_weather_response(cfg, series)
    g = series.assign(
        revenue_factor=response["revenue_factor"],
        wait_factor_traditional=response["wait_factor_traditional"],
        wait_factor_ai=response["wait_factor_ai"],
        util_factor=response["util_factor"],
        heavy=response["heavy_rain"].astype(int),
        extreme=response["extreme_temp"].astype(int),
        lowvis=response["low_visibility"].astype(int),
        highwind=response["high_wind"].astype(int),
    ).groupby("day")
    day = g.agg(
        rain_mm=("rain_mm", "mean"),
        temp_c=("temp_c", "mean"),
        wind_mps=("wind_mps", "mean"),
        visibility_km=("visibility_km", "mean"),
        revenue_factor=("revenue_factor", "mean"),
        wait_factor_traditional=("wait_factor_traditional", "mean"),
        wait_factor_ai=("wait_factor_ai", "mean"),
        util_factor=("util_factor", "mean"),
        heavy_rain=("heavy", "max"),
        extreme_temp=("extreme", "max"),
        low_visibility=("lowvis", "max"),
        high_wind=("highwind", "max"),
    )
    return day.reset_index()


def run_staggered_rollout(cfg: SimConfig) -> PanelDataset:
    """Balanced driver x day panel with staggered AI implementation."""
    wrng = spawn_stream(cfg, "weather_rollout")
    frng = spawn_stream(cfg, "fleet")
    rrng = spawn_stream(cfg, "rollout")

    series = weather.generate_weather_series(cfg, wrng, days=cfg.days_rollout)
    day = _day_aggregates(cfg, series)
    fleet = make_fleet(cfg, frng)

    n_drivers = cfg.drivers
    n_days = cfg.days_rollout
    n = n_drivers * n_days

    driver_id = np.repeat(np.arange(n_drivers), n_days)
    day_no = np.tile(np.arange(1, n_days + 1), n_drivers)  # days are 1-based
    day_ix = day_no - 1
    skill = np.repeat(np.array([int(d.skill) for d in fleet]), n_days)
    mult = np.repeat(np.array([d.base_skill_multiplier for d in fleet]), n_days)
    experience = np.repeat(np.array([d.experience_years for d in fleet]), n_days)
    implement = np.repeat(np.array([d.implement_day for d in fleet]), n_days)

    treated = day_no >= implement
    relative = day_no - implement
    ramp = np.where(
        treated,
        cfg.learning_ramp_initial
        + (1.0 - cfg.learning_ramp_initial)
        * np.minimum(1.0, (relative + 1) / max(cfg.learning_ramp_days, 1)),
        0.0,
    )

    rev_factor = day["revenue_factor"].to_numpy()[day_ix]
    dow = (day_no - 1) % 7
    profile = market._profile(cfg)
    dow_factor = profile.mean(axis=0)[dow]

    base = cfg.base_revenue_per_min * cfg.revenue_scale
    sigma = cfg.rollout_noise_sigma
    noise = np.exp(rrng.normal(-0.5 * sigma**2, sigma, size=n))
    rev0 = base * mult * rev_factor * dow_factor * noise

    # Additive treatment effect sized so a fully ramped driver reaches the
    # configured skill-specific AI level, with a heavy-rain effectiveness bonus.
    trad_mean_rate = base * float(np.mean(rev_factor)) * float(np.mean(dow_factor))
    gains = np.asarray(cfg.weather_ai_gains_pct)[skill]
    delta = trad_mean_rate * (1.0 + gains / 100.0 - mult)
    heavy = day["heavy_rain"].to_numpy()[day_ix].astype(float)
    revenue = rev0 + ramp * (delta + cfg.treat_rain_revenue_bonus * heavy)

    lo_t, hi_t = cfg.positioning_traditional
    lo_a, hi_a = cfg.positioning_weather_ai
    eff0 = rrng.uniform(lo_t, hi_t, size=n)
    util_factor = day["util_factor"].to_numpy()[day_ix]
    util_noise = 1.0 + rrng.normal(0.0, cfg.util_noise_sd, size=n)
    util0 = eff0 * cfg.avail_traditional * util_factor * util_noise
    delta_util = (lo_a + hi_a) / 2.0 * cfg.avail_weather_ai - (lo_t + hi_t) / 2.0 * cfg.avail_traditional
    util = np.clip(util0 + ramp * (delta_util + cfg.treat_rain_util_bonus_pp / 100.0 * heavy), 0.02, 0.99)
    eff = np.where(treated, eff0 + ((lo_a + hi_a) - (lo_t + hi_t)) / 2.0, eff0)

    wait_t = cfg.base_wait_traditional_min * day["wait_factor_traditional"].to_numpy()[day_ix]
    wait_a = cfg.base_wait_weather_ai_min * day["wait_factor_ai"].to_numpy()[day_ix]
    wait = (1.0 - ramp) * wait_t + ramp * wait_a + rrng.normal(0.0, cfg.wait_noise_sd_min / 4.0, size=n)
    wait = np.maximum(wait, 0.3)

    earnings = revenue * cfg.working_minutes_per_day * util

    acc = weather.forecast_accuracy(cfg, 180.0)
    correct = (rrng.random(n) < acc) & treated

    frame = pd.DataFrame(
        {
            "driver_id": driver_id,
            "day": day_no,
            "period": np.zeros(n, dtype=int),
            "mode": np.where(
                treated, OperationalMode.WEATHER_AWARE_AI.value, OperationalMode.TRADITIONAL.value
            ),
            "treated": treated.astype(int),
            "relative_day": relative.astype(float),
            "revenue_per_min": revenue,
            "wait_min": wait,
            "utilization": util,
            "daily_earnings": earnings,
            "rain_mm": day["rain_mm"].to_numpy()[day_ix],
            "temp_c": day["temp_c"].to_numpy()[day_ix],
            "wind_mps": day["wind_mps"].to_numpy()[day_ix],
            "visibility_km": day["visibility_km"].to_numpy()[day_ix],
            "heavy_rain": day["heavy_rain"].to_numpy()[day_ix].astype(int),
            "extreme_temp": day["extreme_temp"].to_numpy()[day_ix].astype(int),
            "low_visibility": day["low_visibility"].to_numpy()[day_ix].astype(int),
            "high_wind": day["high_wind"].to_numpy()[day_ix].astype(int),
            "skill": _SKILL_NAMES[skill],
            "experience_years": experience,
            "day_of_week": dow,
            "forecast_correct": correct.astype(int),
            "positioning_eff": eff,
        }
    )[PANEL_COLUMNS]
    manifest = {"config_hash": config_hash(cfg), "seed": cfg.seed, "experiment": "rollout"}
    return PanelDataset(frame, "rollout", manifest)


def summarize(panel: PanelDataset) -> pd.DataFrame:
    """Per-mode means of the four headline metrics plus percent improvements."""
    if panel.experiment != "cross_sectional":
        raise ValueError("summarize expects a cross-sectional panel")
    f = panel.frame
    trad = f[f["mode"] == OperationalMode.TRADITIONAL.value]
    ai = f[f["mode"] == OperationalMode.WEATHER_AWARE_AI.value]
    metrics = {
        "revenue_per_min": 1.0,
        "wait_min": 1.0,
        "utilization": 100.0,  # report in percent
        "daily_earnings": 1.0,
    }
    rows = []
    for name, scale in metrics.items():
        t = trad[name].mean() * scale
        a = ai[name].mean() * scale
        rows.append(
            {
                "metric": name,
                "traditional": t,
                "weather_ai": a,
                "improvement_pct": (a - t) / t * 100.0,
            }
        )
    return pd.DataFrame(rows)
