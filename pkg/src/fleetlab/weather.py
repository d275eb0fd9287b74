"""Hourly stochastic weather process and a horizon-accuracy forecast oracle.

Rain is a two-part process: a first-order Markov chain for wet/dry hours
(persistence produces realistic wet spells) with gamma-distributed intensity
on wet hours.  Temperature follows a daily AR(1) mean plus a sinusoidal
diurnal cycle; wind is hourly AR(1); visibility decreases with rain intensity
and occasionally collapses in rain-free fog hours.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .config import SimConfig

__all__ = [
    "WeatherState",
    "EventFlags",
    "Forecast",
    "generate_weather_series",
    "classify",
    "classify_frame",
    "forecast_accuracy",
    "forecast",
]

WEATHER_COLUMNS = ["day", "hour", "rain_mm", "temp_c", "wind_mps", "visibility_km"]


@dataclass(frozen=True)
class WeatherState:
    rain_mm_per_hour: float
    temperature_c: float
    wind_mps: float
    visibility_km: float
    hour_of_day: int
    day_index: int

    def __post_init__(self) -> None:
        if self.rain_mm_per_hour < 0:
            raise ValueError("rain_mm_per_hour must be >= 0")
        if self.visibility_km <= 0:
            raise ValueError("visibility_km must be > 0")
        if not 0 <= self.hour_of_day <= 23:
            raise ValueError("hour_of_day must be in [0, 23]")


@dataclass(frozen=True)
class EventFlags:
    heavy_rain: bool
    extreme_temperature: bool
    low_visibility: bool
    high_wind: bool

    @property
    def any(self) -> bool:
        return self.heavy_rain or self.extreme_temperature or self.low_visibility or self.high_wind


@dataclass(frozen=True)
class Forecast:
    target_day: int
    target_hour: int
    horizon_minutes: float
    predicted: WeatherState
    correct: bool


def generate_weather_series(cfg: SimConfig, rng: np.random.Generator, days: int | None = None) -> pd.DataFrame:
    """Generate one contiguous hourly series of length ``days * 24``.

    Deterministic in (cfg, rng state).  Returns a frame with columns
    ``day, hour, rain_mm, temp_c, wind_mps, visibility_km``.
    """
    if days is None:
        days = cfg.days_cross_sectional
    n = days * 24

    # Wet/dry Markov chain started from its stationary distribution.
    pi = cfg.rain_occurrence_prob
    p11 = cfg.rain_persistence
    # Transition from dry chosen so the stationary wet share equals pi.
    p01 = 0.0 if pi >= 1.0 else min(1.0, pi * (1.0 - p11) / (1.0 - pi))
    wet = np.zeros(n, dtype=bool)
    u = rng.random(n)
    if pi > 0:
        wet[0] = u[0] < pi
        for t in range(1, n):
            p = p11 if wet[t - 1] else p01
            wet[t] = u[t] < p
    rain = np.zeros(n)
    if wet.any():
        rain[wet] = rng.gamma(cfg.rain_gamma_shape, cfg.rain_gamma_scale, size=int(wet.sum()))

    # Temperature: AR(1) daily anomaly plus diurnal sinusoid (trough ~05:00).
    daily = np.zeros(days)
    innov = rng.normal(0.0, cfg.temp_daily_sd, size=days)
    daily[0] = innov[0] / max(np.sqrt(1.0 - cfg.temp_daily_ar1**2), 1e-9)
    for d in range(1, days):
        daily[d] = cfg.temp_daily_ar1 * daily[d - 1] + innov[d]
    hours = np.tile(np.arange(24), days)
    day_idx = np.repeat(np.arange(days), 24)
    diurnal = cfg.temp_diurnal_amplitude * np.sin((hours - 11.0) * 2.0 * np.pi / 24.0)
    temp = cfg.temp_mean_c + daily[day_idx] + diurnal + rng.normal(0.0, cfg.temp_hourly_noise_sd, size=n)

    # Wind: hourly AR(1) around the configured mean, floored at zero.
    wind = np.empty(n)
    winnov = rng.normal(0.0, cfg.wind_sd_mps * np.sqrt(max(1.0 - cfg.wind_ar1**2, 1e-9)), size=n)
    wind[0] = cfg.wind_mean_mps + rng.normal(0.0, cfg.wind_sd_mps)
    for t in range(1, n):
        wind[t] = cfg.wind_mean_mps + cfg.wind_ar1 * (wind[t - 1] - cfg.wind_mean_mps) + winnov[t]
    wind = np.maximum(wind, 0.0)

    # Visibility: clear baseline minus a rain term, plus noise and fog hours.
    vis = cfg.visibility_clear_km - cfg.visibility_rain_loss_per_mm * rain
    vis = vis + rng.normal(0.0, cfg.visibility_noise_sd, size=n)
    fog = (rng.random(n) < cfg.fog_prob) & ~wet
    vis[fog] = rng.uniform(1.0, 6.0, size=int(fog.sum()))
    vis = np.maximum(vis, 0.3)

    return pd.DataFrame(
        {
            "day": day_idx,
            "hour": hours,
            "rain_mm": rain,
            "temp_c": temp,
            "wind_mps": wind,
            "visibility_km": vis,
        }
    )


def classify(state: WeatherState, cfg: SimConfig) -> EventFlags:
    """Threshold-exact event flags; all comparisons strict."""
    return EventFlags(
        heavy_rain=state.rain_mm_per_hour > cfg.heavy_rain_threshold_mm,
        extreme_temperature=(
            state.temperature_c < cfg.cold_threshold_c or state.temperature_c > cfg.hot_threshold_c
        ),
        low_visibility=state.visibility_km < cfg.low_visibility_threshold_km,
        high_wind=state.wind_mps > cfg.high_wind_threshold_mps,
    )


def classify_frame(series: pd.DataFrame, cfg: SimConfig) -> pd.DataFrame:
    """Vectorized :func:`classify` over a weather frame."""
    return pd.DataFrame(
        {
            "heavy_rain": series["rain_mm"].to_numpy() > cfg.heavy_rain_threshold_mm,
            "extreme_temp": (series["temp_c"].to_numpy() < cfg.cold_threshold_c)
            | (series["temp_c"].to_numpy() > cfg.hot_threshold_c),
            "low_visibility": series["visibility_km"].to_numpy() < cfg.low_visibility_threshold_km,
            "high_wind": series["wind_mps"].to_numpy() > cfg.high_wind_threshold_mps,
        }
    )


def forecast_accuracy(cfg: SimConfig, horizon_minutes: float) -> float:
    """Piecewise-linear event-classification accuracy in the horizon.

    Anchored at (0, 1.0), (60, acc_1h), (180, acc_3h); extrapolated past
    180 min along the 60->180 slope down to the configured floor.
    """
    if horizon_minutes < 0:
        raise ValueError("horizon_minutes must be >= 0")
    h = float(horizon_minutes)
    if h <= 60.0:
        acc = 1.0 + (cfg.forecast_accuracy_1h - 1.0) * h / 60.0
    elif h <= 180.0:
        acc = cfg.forecast_accuracy_1h + (cfg.forecast_accuracy_3h - cfg.forecast_accuracy_1h) * (h - 60.0) / 120.0
    else:
        slope = (cfg.forecast_accuracy_3h - cfg.forecast_accuracy_1h) / 120.0
        acc = cfg.forecast_accuracy_3h + slope * (h - 180.0)
    return max(acc, cfg.forecast_accuracy_floor)


def _state_at(series: pd.DataFrame, day: int, hour: int) -> WeatherState:
    idx = day * 24 + hour
    if idx < 0 or idx >= len(series):
        raise IndexError(f"target (day={day}, hour={hour}) is outside the weather series")
    row = series.iloc[idx]
    return WeatherState(
        rain_mm_per_hour=float(row["rain_mm"]),
        temperature_c=float(row["temp_c"]),
        wind_mps=float(row["wind_mps"]),
        visibility_km=float(row["visibility_km"]),
        hour_of_day=int(row["hour"]),
        day_index=int(row["day"]),
    )


def forecast(
    series: pd.DataFrame,
    cfg: SimConfig,
    day: int,
    hour: int,
    horizon_minutes: float,
    rng: np.random.Generator,
) -> Forecast:
    """Forecast oracle: with probability acc(horizon) the event classification
    of the prediction matches truth; otherwise the heavy-rain dimension is
    pushed across its threshold (the consequential axis for every consumer).
    """
    truth = _state_at(series, day, hour)
    acc = forecast_accuracy(cfg, horizon_minutes)
    if horizon_minutes == 0 or rng.random() < acc:
        return Forecast(day, hour, horizon_minutes, truth, True)
    thr = cfg.heavy_rain_threshold_mm
    if truth.rain_mm_per_hour > thr:
        wrong_rain = float(rng.uniform(0.0, 0.8 * thr))
    else:
        wrong_rain = float(thr + rng.gamma(cfg.rain_gamma_shape, cfg.rain_gamma_scale))
    predicted = WeatherState(
        rain_mm_per_hour=wrong_rain,
        temperature_c=truth.temperature_c,
        wind_mps=truth.wind_mps,
        visibility_km=truth.visibility_km,
        hour_of_day=truth.hour_of_day,
        day_index=truth.day_index,
    )
    return Forecast(day, hour, horizon_minutes, predicted, False)
