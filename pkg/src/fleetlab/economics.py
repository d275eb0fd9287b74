"""ROI, payback, NPV, and sensitivity arithmetic for the adoption decision.

Pure deterministic arithmetic. Every report shows an as-computed column next
to the published reference column with an explicit delta, because the
published ROI, payback, and annual-benefit figures are mutually inconsistent
under the stated formula; the deltas are surfaced, never reconciled away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import pandas as pd

__all__ = [
    "CostModel",
    "EconReport",
    "WEATHER_AI_COSTS",
    "ROUTE_AI_COSTS",
    "REFERENCE",
    "annual_benefit",
    "roi",
    "payback_months",
    "npv",
    "benefit_from_roi",
    "sensitivity",
    "build_econ_report",
]


@dataclass(frozen=True)
class CostModel:
    implementation_cost: float
    annual_operating_cost: float

    def __post_init__(self) -> None:
        if self.implementation_cost < 0 or self.annual_operating_cost < 0:
            raise ValueError("costs must be >= 0")


WEATHER_AI_COSTS = CostModel(implementation_cost=150_000.0, annual_operating_cost=30_000.0)
ROUTE_AI_COSTS = CostModel(implementation_cost=75_000.0, annual_operating_cost=15_000.0)

#: Published reference figures the report compares against (yen unless noted).
REFERENCE = {
    "daily_delta": 37_833.0,
    "annual_benefit": 13_809_103.0,
    "weather_roi_pct": 9_106.0,
    "route_roi_pct": 1_427.0,
    "weather_payback_months": 1.4,
    "route_payback_months": 2.9,
    "route_uplift": 0.14,
    "market_opportunity_usd": 8.9e9,
}


def annual_benefit(daily_delta: float, working_days: int) -> float:
    """Annual earnings improvement: daily delta times working days."""
    if daily_delta < 0 or working_days < 0:
        raise ValueError("inputs must be >= 0")
    return daily_delta * working_days


def roi(annual_benefit_yen: float, costs: CostModel) -> float:
    """Percent return: (net annual benefit - investment) / investment x 100."""
    if costs.implementation_cost <= 0:
        raise ValueError("implementation_cost must be > 0 for ROI")
    net = annual_benefit_yen - costs.annual_operating_cost
    return (net - costs.implementation_cost) / costs.implementation_cost * 100.0


def payback_months(costs: CostModel, annual_benefit_yen: float) -> float:
    """Months until the investment is recovered; inf when it never is."""
    monthly_net = (annual_benefit_yen - costs.annual_operating_cost) / 12.0
    if monthly_net <= 0:
        return math.inf
    return costs.implementation_cost / monthly_net


def npv(
    annual_benefit_yen: float, costs: CostModel, discount_rate: float, horizon_years: int
) -> float:
    """Net present value of adoption over the horizon at the given rate."""
    if discount_rate < 0:
        raise ValueError("discount_rate must be >= 0")
    net = annual_benefit_yen - costs.annual_operating_cost
    total = -costs.implementation_cost
    for year in range(1, horizon_years + 1):
        total += net / (1.0 + discount_rate) ** year
    return total


def benefit_from_roi(roi_pct: float, costs: CostModel) -> float:
    """Annual benefit implied by a published ROI under the same formula."""
    return costs.implementation_cost * (1.0 + roi_pct / 100.0) + costs.annual_operating_cost


def sensitivity(
    weather_benefit: float,
    route_benefit: float,
    perturbations: tuple[float, ...] = (-0.20, 0.0, 0.20),
) -> pd.DataFrame:
    """ROI for both systems under scaled benefits, with the ROI ratio."""
    rows = []
    for pct in perturbations:
        wb = weather_benefit * (1.0 + pct)
        rb = route_benefit * (1.0 + pct)
        w = roi(wb, WEATHER_AI_COSTS)
        r = roi(rb, ROUTE_AI_COSTS)
        label = "base" if pct == 0 else f"{pct:+.0%} benefits"
        rows.append(
            {
                "scenario": label,
                "benefit_perturbation": pct,
                "weather_ai_roi_pct": w,
                "route_ai_roi_pct": r,
                "ratio": w / r if r != 0 else math.inf,
            }
        )
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class EconReport:
    working_days: int
    discount_rate: float
    horizon_years: int
    comparison: pd.DataFrame
    sensitivity_table: pd.DataFrame
    header: dict

    def to_dict(self) -> dict:
        return {
            "header": self.header,
            "working_days": self.working_days,
            "discount_rate": self.discount_rate,
            "horizon_years": self.horizon_years,
            "comparison": self.comparison.to_dict(orient="records"),
            "sensitivity": self.sensitivity_table.to_dict(orient="records"),
        }


def build_econ_report(
    traditional_daily: float,
    weather_ai_daily: float,
    working_days: int = 300,
    discount_rate: float = 0.05,
    horizon_years: int = 5,
    route_uplift: float = 0.14,
) -> EconReport:
    """Full economics report from the simulated daily earnings levels.

    The comparison frame pairs each as-computed quantity with its published
    reference value and a delta. The route-AI annual benefit has no published
    value, so the reference column carries the figure implied by the
    published route ROI; the as-computed column derives it from the uplift
    applied to traditional daily earnings. The sensitivity table is anchored
    on the reference-implied benefit pair so its internal ratio arithmetic is
    reproduced faithfully.
    """
    daily_delta = weather_ai_daily - traditional_daily
    weather_benefit = annual_benefit(daily_delta, working_days)
    route_benefit = annual_benefit(traditional_daily * route_uplift, working_days)

    ref_weather_benefit = REFERENCE["annual_benefit"]
    ref_route_benefit = benefit_from_roi(REFERENCE["route_roi_pct"], ROUTE_AI_COSTS)

    rows = [
        ("daily_delta_yen", daily_delta, REFERENCE["daily_delta"]),
        ("weather_annual_benefit_yen", weather_benefit, ref_weather_benefit),
        (
            "weather_annual_benefit_365d_yen",
            annual_benefit(daily_delta, 365),
            ref_weather_benefit,
        ),
        ("route_annual_benefit_yen", route_benefit, ref_route_benefit),
        (
            "weather_roi_pct",
            roi(weather_benefit, WEATHER_AI_COSTS),
            REFERENCE["weather_roi_pct"],
        ),
        (
            "weather_roi_pct_at_reference_benefit",
            roi(ref_weather_benefit, WEATHER_AI_COSTS),
            REFERENCE["weather_roi_pct"],
        ),
        ("route_roi_pct", roi(route_benefit, ROUTE_AI_COSTS), REFERENCE["route_roi_pct"]),
        (
            "weather_payback_months",
            payback_months(WEATHER_AI_COSTS, weather_benefit),
            REFERENCE["weather_payback_months"],
        ),
        (
            "weather_payback_months_at_reference_benefit",
            payback_months(WEATHER_AI_COSTS, ref_weather_benefit),
            REFERENCE["weather_payback_months"],
        ),
        (
            "route_payback_months",
            payback_months(ROUTE_AI_COSTS, route_benefit),
            REFERENCE["route_payback_months"],
        ),
        (
            "weather_npv_yen",
            npv(weather_benefit, WEATHER_AI_COSTS, discount_rate, horizon_years),
            float("nan"),
        ),
    ]
    comparison = pd.DataFrame(
        [
            {
                "quantity": name,
                "as_computed": computed,
                "reference": ref,
                "delta": computed - ref if not math.isnan(ref) else float("nan"),
            }
            for name, computed, ref in rows
        ]
    )

    sens = sensitivity(ref_weather_benefit, ref_route_benefit)
    header = {
        "weather_ai_costs": {
            "implementation": WEATHER_AI_COSTS.implementation_cost,
            "annual_operating": WEATHER_AI_COSTS.annual_operating_cost,
        },
        "route_ai_costs": {
            "implementation": ROUTE_AI_COSTS.implementation_cost,
            "annual_operating": ROUTE_AI_COSTS.annual_operating_cost,
        },
        "market_opportunity_usd": REFERENCE["market_opportunity_usd"],
        "note": (
            "Published ROI, payback, and annual-benefit figures are mutually "
            "inconsistent under the stated ROI formula; deltas are reported, "
            "not reconciled. Sensitivity anchored on reference-implied benefits."
        ),
    }
    return EconReport(
        working_days=working_days,
        discount_rate=discount_rate,
        horizon_years=horizon_years,
        comparison=comparison,
        sensitivity_table=sens,
        header=header,
    )
