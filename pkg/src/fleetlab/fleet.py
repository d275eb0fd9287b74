"""Driver population, skill structure, operational modes, and rollout plan.

Skill-specific productivity gains for the AI modes are expressed relative to
the mean traditional driver: an AI-assisted driver's expected revenue rate is
``traditional_mean * (1 + gain(skill, mode))``.  AI decisions substitute for
individual judgment, which is what compresses skill-based dispersion under
the weather-aware mode and (in the route-only mode) lifts low-skill drivers
the most.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .config import SimConfig
from .weather import Forecast

__all__ = [
    "OperationalMode",
    "SkillLevel",
    "DriverProfile",
    "ComponentGains",
    "COMPONENT_NAMES",
    "make_fleet",
    "fleet_frame",
    "mode_components",
    "skill_mode_gain",
    "skill_gap",
    "response_delay_minutes",
    "positioning_efficiency",
]


class OperationalMode(enum.Enum):
    TRADITIONAL = "traditional"
    ROUTE_ONLY_AI = "route_only_ai"
    WEATHER_AWARE_AI = "weather_aware_ai"


class SkillLevel(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


COMPONENT_NAMES = (
    "weather_prediction",
    "positioning",
    "route",
    "dynamic_pricing",
    "integration",
)


@dataclass(frozen=True)
class ComponentGains:
    weather_prediction: float
    positioning: float
    route: float
    dynamic_pricing: float
    integration: float

    @property
    def total(self) -> float:
        return (
            self.weather_prediction
            + self.positioning
            + self.route
            + self.dynamic_pricing
            + self.integration
        )

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in COMPONENT_NAMES}


@dataclass(frozen=True)
class DriverProfile:
    driver_id: int
    skill: SkillLevel
    base_skill_multiplier: float
    experience_years: float
    assigned_mode: OperationalMode
    implement_day: int | None


def make_fleet(cfg: SimConfig, rng: np.random.Generator) -> list[DriverProfile]:
    """Draw the rollout fleet.

    Skills are multinomial in the configured shares; implementation days are
    uniform over the rollout window and independent of skill (assignment is
    administrative, not self-selected).
    """
    if cfg.drivers <= 0:
        raise ValueError("drivers must be > 0")
    shares = np.asarray(cfg.skill_shares)
    skills = rng.choice(3, size=cfg.drivers, p=shares / shares.sum())
    experience = np.round(rng.uniform(1.0, 25.0, size=cfg.drivers), 1)
    implement = rng.integers(cfg.rollout_start_day, cfg.rollout_end_day + 1, size=cfg.drivers)
    fleet = []
    for i in range(cfg.drivers):
        skill = SkillLevel(int(skills[i]))
        fleet.append(
            DriverProfile(
                driver_id=i,
                skill=skill,
                base_skill_multiplier=cfg.skill_multipliers[skill],
                experience_years=float(experience[i]),
                assigned_mode=OperationalMode.WEATHER_AWARE_AI,
                implement_day=int(implement[i]),
            )
        )
    return fleet


def fleet_frame(fleet: list[DriverProfile]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "driver_id": [d.driver_id for d in fleet],
            "skill": [d.skill.name.lower() for d in fleet],
            "experience_years": [d.experience_years for d in fleet],
            "mode": [d.assigned_mode.value for d in fleet],
            "implement_day": [d.implement_day for d in fleet],
        }
    )


def mode_components(mode: OperationalMode, cfg: SimConfig) -> ComponentGains:
    """Additive percentage-point contributions on the traditional mean rate."""
    if mode is OperationalMode.WEATHER_AWARE_AI:
        return ComponentGains(*cfg.component_gains_pct)
    if mode is OperationalMode.ROUTE_ONLY_AI:
        return ComponentGains(0.0, 0.0, cfg.route_only_total_pct, 0.0, 0.0)
    return ComponentGains(0.0, 0.0, 0.0, 0.0, 0.0)


def skill_mode_gain(skill: SkillLevel, mode: OperationalMode, cfg: SimConfig) -> float:
    """Expected revenue gain in percent, relative to the mean traditional driver."""
    if mode is OperationalMode.WEATHER_AWARE_AI:
        return cfg.weather_ai_gains_pct[skill]
    if mode is OperationalMode.ROUTE_ONLY_AI:
        return cfg.route_only_gains_pct[skill]
    return 0.0


def _level(skill: SkillLevel, mode: OperationalMode, cfg: SimConfig) -> float:
    """Expected revenue level (traditional mean = 1) for a skill/mode cell."""
    if mode is OperationalMode.TRADITIONAL:
        return cfg.skill_multipliers[skill]
    return 1.0 + skill_mode_gain(skill, mode, cfg) / 100.0


def skill_gap(mode: OperationalMode, cfg: SimConfig) -> float:
    """Skill-based productivity gap: (best - worst) / mode mean level."""
    levels = [_level(s, mode, cfg) for s in SkillLevel]
    return (max(levels) - min(levels)) / (sum(levels) / len(levels))


def response_delay_minutes(
    mode: OperationalMode, fc: Forecast, rng: np.random.Generator, cfg: SimConfig
) -> float:
    """Minutes between event onset and repositioning; negative = pre-positioned.

    Only the weather-aware mode with a correct forecast acts ahead of the
    event; everyone else reacts after onset.
    """
    lo, hi = cfg.response_delay_traditional_min
    if mode is OperationalMode.WEATHER_AWARE_AI and fc.correct:
        lead_lo, lead_hi = cfg.preposition_lead_min
        return -float(rng.uniform(lead_lo, lead_hi))
    return float(rng.uniform(lo, hi))


def positioning_efficiency(mode: OperationalMode, rng: np.random.Generator, cfg: SimConfig) -> float:
    if mode is OperationalMode.WEATHER_AWARE_AI:
        lo, hi = cfg.positioning_weather_ai
    else:
        lo, hi = cfg.positioning_traditional
    if lo == hi:
        return float(lo)
    return float(rng.uniform(lo, hi))
