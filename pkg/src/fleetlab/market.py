"""Fare, demand, and wait-time response to weather events and time of week.

All functions here are pure.  Simultaneous events compose multiplicatively;
single-event magnitudes come straight from the configured uplifts.
"""

from __future__ import annotations

import itertools

import numpy as np
import pandas as pd

from .config import SimConfig
from .fleet import OperationalMode
from .weather import EventFlags

__all__ = [
    "fare_multiplier",
    "demand_multiplier",
    "wait_multiplier",
    "time_factor",
    "multiplier_table",
]


def fare_multiplier(flags: EventFlags, cfg: SimConfig) -> float:
    m = 1.0
    if flags.heavy_rain:
        m *= 1.0 + cfg.fare_heavy_rain_uplift
    if flags.extreme_temperature:
        m *= 1.0 + cfg.fare_extreme_temp_uplift
    if flags.low_visibility:
        m *= 1.0 + cfg.fare_low_visibility_uplift
    if flags.high_wind:
        m *= 1.0 + cfg.fare_high_wind_uplift
    return m


def demand_multiplier(flags: EventFlags, cfg: SimConfig) -> float:
    m = 1.0
    if flags.heavy_rain:
        m *= 1.0 + cfg.demand_heavy_rain_uplift
    if flags.extreme_temperature:
        m *= 1.0 + cfg.demand_extreme_temp_uplift
    if flags.low_visibility:
        m *= 1.0 + cfg.demand_low_visibility_uplift
    if flags.high_wind:
        m *= 1.0 + cfg.demand_high_wind_uplift
    return m


def wait_multiplier(flags: EventFlags, mode: OperationalMode, cfg: SimConfig) -> float:
    """Heavy-rain wait response by mode.

    Weather-aware AI pre-positions and caps the surge; route-only AI has no
    weather prediction and responds like traditional operations.
    """
    if not flags.heavy_rain:
        return 1.0
    if mode is OperationalMode.WEATHER_AWARE_AI:
        return 1.0 + cfg.wait_heavy_rain_weather_ai
    return 1.0 + cfg.wait_heavy_rain_traditional


# Relative demand weight by hour: morning rush, evening rush, late-night taxi
# bump, quiet early morning.  Normalized to mean exactly 1 over a full week.
_HOUR_SHAPE = np.array(
    [
        0.35, 0.15, 0.05, 0.00, 0.05, 0.15,   # 00-05
        0.45, 0.90, 1.00, 0.70, 0.40, 0.35,   # 06-11
        0.45, 0.40, 0.35, 0.40, 0.55, 0.80,   # 12-17
        1.00, 0.90, 0.70, 0.60, 0.55, 0.45,   # 18-23
    ]
)
_DOW_SHAPE = np.array([0.95, 0.95, 1.00, 1.00, 1.10, 1.05, 0.95])


def _profile(cfg: SimConfig) -> np.ndarray:
    """24 x 7 demand profile with mean exactly 1."""
    hour_dev = _HOUR_SHAPE - _HOUR_SHAPE.mean()
    hour = 1.0 + 2.0 * cfg.time_profile_amplitude * hour_dev
    dow = 1.0 + cfg.time_profile_amplitude * (_DOW_SHAPE - _DOW_SHAPE.mean())
    grid = np.outer(hour, dow)
    return grid / grid.mean()


def time_factor(hour: int, day_of_week: int, cfg: SimConfig) -> float:
    if not 0 <= hour <= 23:
        raise ValueError("hour must be in [0, 23]")
    if not 0 <= day_of_week <= 6:
        raise ValueError("day_of_week must be in [0, 6]")
    return float(_profile(cfg)[hour, day_of_week])


def multiplier_table(cfg: SimConfig) -> pd.DataFrame:
    """Audit dump: one row per event-flag combination x operational mode."""
    rows = []
    for hr, et, lv, hw in itertools.product([False, True], repeat=4):
        flags = EventFlags(hr, et, lv, hw)
        for mode in OperationalMode:
            rows.append(
                {
                    "heavy_rain": int(hr),
                    "extreme_temp": int(et),
                    "low_visibility": int(lv),
                    "high_wind": int(hw),
                    "mode": mode.value,
                    "fare_multiplier": fare_multiplier(flags, cfg),
                    "demand_multiplier": demand_multiplier(flags, cfg),
                    "wait_multiplier": wait_multiplier(flags, mode, cfg),
                }
            )
    return pd.DataFrame(rows)
