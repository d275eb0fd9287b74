import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fleetlab.config import SimConfig
from fleetlab.fleet import OperationalMode
from fleetlab.market import (
    _profile,
    demand_multiplier,
    fare_multiplier,
    multiplier_table,
    time_factor,
    wait_multiplier,
)
from fleetlab.weather import EventFlags

CFG = SimConfig()


def flags(hr=False, et=False, lv=False, hw=False):
    return EventFlags(hr, et, lv, hw)


class TestEventMultipliers:
    def test_no_event_is_unity(self):
        assert fare_multiplier(flags(), CFG) == 1.0
        assert demand_multiplier(flags(), CFG) == 1.0
        for mode in OperationalMode:
            assert wait_multiplier(flags(), mode, CFG) == 1.0

    def test_single_event_magnitudes(self):
        assert fare_multiplier(flags(hr=True), CFG) == pytest.approx(1.0 + CFG.fare_heavy_rain_uplift)
        assert demand_multiplier(flags(et=True), CFG) == pytest.approx(
            1.0 + CFG.demand_extreme_temp_uplift
        )
        assert demand_multiplier(flags(lv=True), CFG) == pytest.approx(
            1.0 + CFG.demand_low_visibility_uplift
        )

    def test_wait_response_by_mode(self):
        trad = wait_multiplier(flags(hr=True), OperationalMode.TRADITIONAL, CFG)
        route = wait_multiplier(flags(hr=True), OperationalMode.ROUTE_ONLY_AI, CFG)
        ai = wait_multiplier(flags(hr=True), OperationalMode.WEATHER_AWARE_AI, CFG)
        assert trad == pytest.approx(1.0 + CFG.wait_heavy_rain_traditional)
        assert route == trad  # no weather prediction: reacts like traditional
        assert ai == pytest.approx(1.0 + CFG.wait_heavy_rain_weather_ai)
        assert ai < trad

    @given(
        hr=st.booleans(), et=st.booleans(), lv=st.booleans(), hw=st.booleans()
    )
    @settings(max_examples=16, deadline=None)
    def test_multiplicative_composition(self, hr, et, lv, hw):
        f = flags(hr, et, lv, hw)
        expect = 1.0
        for on, uplift in (
            (hr, CFG.fare_heavy_rain_uplift),
            (et, CFG.fare_extreme_temp_uplift),
            (lv, CFG.fare_low_visibility_uplift),
            (hw, CFG.fare_high_wind_uplift),
        ):
            if on:
                expect *= 1.0 + uplift
        assert fare_multiplier(f, CFG) == pytest.approx(expect)


class TestTimeProfile:
    def test_profile_mean_is_exactly_one(self):
        assert _profile(CFG).mean() == pytest.approx(1.0, abs=1e-12)

    def test_rush_hours_above_quiet_hours(self):
        assert time_factor(8, 2, CFG) > time_factor(3, 2, CFG)
        assert time_factor(18, 4, CFG) > time_factor(14, 4, CFG)

    def test_flat_when_amplitude_zero(self):
        import dataclasses

        flat = dataclasses.replace(CFG, time_profile_amplitude=0.0)
        vals = {time_factor(h, d, flat) for h in range(24) for d in range(7)}
        assert vals == {1.0}

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            time_factor(24, 0, CFG)
        with pytest.raises(ValueError):
            time_factor(0, 7, CFG)


class TestMultiplierTable:
    def test_covers_all_combinations(self):
        table = multiplier_table(CFG)
        assert len(table) == 16 * len(OperationalMode)
        combos = set(
            map(tuple, table[["heavy_rain", "extreme_temp", "low_visibility", "high_wind"]].values)
        )
        assert combos == set(itertools.product([0, 1], repeat=4))

    def test_table_matches_functions(self):
        table = multiplier_table(CFG)
        row = table[
            (table["heavy_rain"] == 1)
            & (table["extreme_temp"] == 0)
            & (table["low_visibility"] == 0)
            & (table["high_wind"] == 0)
            & (table["mode"] == "traditional")
        ].iloc[0]
        assert row["fare_multiplier"] == pytest.approx(fare_multiplier(flags(hr=True), CFG))
        assert row["wait_multiplier"] == pytest.approx(
            wait_multiplier(flags(hr=True), OperationalMode.TRADITIONAL, CFG)
        )

    def test_multipliers_at_least_one_for_fare_and_demand(self):
        table = multiplier_table(CFG)
        assert (table["fare_multiplier"] >= 1.0).all()
        assert (table["demand_multiplier"] >= 1.0).all()
