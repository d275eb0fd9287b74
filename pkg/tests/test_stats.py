import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from fleetlab.fleet import OperationalMode
from fleetlab.stats import (
    METRIC_VARS,
    WEATHER_VARS,
    cohens_d,
    correlation_matrix,
    pearson,
    significance_stars,
    welch_t,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestPearson:
    def test_perfect_correlation(self):
        e = pearson([1, 2, 3, 5], [1, 2, 3, 5])
        assert e.r == 1.0
        assert e.p_value == 0.0

    def test_closed_form_oracle(self):
        # Direct covariance-formula evaluation, independent of the library path.
        x = np.array([1.0, 2.0, 3.0, 4.0])
        y = np.array([2.0, 4.0, 6.0, 9.0])
        num = np.sum((x - x.mean()) * (y - y.mean()))
        den = np.sqrt(np.sum((x - x.mean()) ** 2) * np.sum((y - y.mean()) ** 2))
        assert pearson(x, y).r == pytest.approx(num / den, rel=1e-12)

    def test_p_value_matches_reference_implementation(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=40)
        y = 0.4 * x + rng.normal(size=40)
        e = pearson(x, y)
        r_ref, p_ref = sps.pearsonr(x, y)
        assert e.r == pytest.approx(r_ref, abs=1e-12)
        assert e.p_value == pytest.approx(p_ref, abs=1e-8)

    @given(
        xs=st.lists(finite, min_size=3, max_size=30),
        a=st.floats(0.1, 100.0),
        b=finite,
    )
    @settings(max_examples=40, deadline=None)
    def test_affine_invariance(self, xs, a, b):
        x = np.array(xs)
        if np.var(x) == 0:
            return
        assert pearson(x, a * x + b).r == pytest.approx(1.0, abs=1e-9)
        assert pearson(x, -a * x + b).r == pytest.approx(-1.0, abs=1e-9)

    def test_errors(self):
        with pytest.raises(ValueError, match="length mismatch"):
            pearson([1, 2, 3], [1, 2])
        with pytest.raises(ValueError, match="at least 3"):
            pearson([1, 2], [3, 4])
        with pytest.raises(ValueError, match="zero variance"):
            pearson([1, 1, 1], [1, 2, 3])


class TestWelch:
    def test_identical_samples(self):
        t, df, p = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert t == 0.0
        assert p == pytest.approx(1.0)

    def test_hand_evaluated_formula(self):
        a = np.array([1.0, 2.0, 3.0])
        b = np.array([4.0, 5.0, 6.0])
        # Welch statistic evaluated from first principles.
        se = np.sqrt(a.var(ddof=1) / 3 + b.var(ddof=1) / 3)
        t, df, p = welch_t(a, b)
        assert t == pytest.approx((a.mean() - b.mean()) / se, rel=1e-12)
        t_ref, p_ref = sps.ttest_ind(a, b, equal_var=False)
        assert t == pytest.approx(t_ref, rel=1e-12)
        assert p == pytest.approx(p_ref, rel=1e-10)

    @given(
        xs=st.lists(finite, min_size=2, max_size=20),
        ys=st.lists(finite, min_size=2, max_size=20),
    )
    @settings(max_examples=40, deadline=None)
    def test_antisymmetry(self, xs, ys):
        t1, df1, _ = welch_t(xs, ys)
        t2, df2, _ = welch_t(ys, xs)
        assert t1 == pytest.approx(-t2, abs=1e-9)
        assert df1 == pytest.approx(df2)

    def test_insufficient_data(self):
        with pytest.raises(ValueError):
            welch_t([1.0], [2.0, 3.0])


class TestCohensD:
    def test_identical_samples(self):
        assert cohens_d([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_unit_separation(self):
        rng = np.random.default_rng(0)
        a = rng.normal(0.0, 1.0, 40_000)
        b = rng.normal(1.0, 1.0, 40_000)
        assert cohens_d(b, a) == pytest.approx(1.0, abs=0.03)

    def test_zero_pooled_sd(self):
        with pytest.raises(ValueError):
            cohens_d([1.0, 1.0], [2.0, 2.0])


class TestPanelStatistics:
    def test_matrix_covers_all_pairs(self, cross_panel):
        m = correlation_matrix(cross_panel)
        assert len(m.entries) == len(WEATHER_VARS) * len(METRIC_VARS)
        assert m.skipped == ()

    def test_rain_revenue_headline(self, cross_panel):
        m = correlation_matrix(cross_panel)
        entry = next(
            e for e in m.entries if (e.var_x, e.var_y) == ("rain_mm", "revenue_per_min")
        )
        assert entry.r == pytest.approx(0.575, abs=0.05)
        assert entry.p_value < 0.001

    def test_constant_column_is_skipped_with_reason(self, cross_panel):
        from fleetlab.engine import PanelDataset

        broken = cross_panel.frame.copy()
        broken["wind_mps"] = 5.0
        m = correlation_matrix(PanelDataset(broken, "cross_sectional", {}))
        skipped = {(x, y) for x, y, _ in m.skipped}
        assert skipped == {("wind_mps", mv) for mv in METRIC_VARS}
        assert all("variance" in reason for _, _, reason in m.skipped)

    def test_revenue_comparison_is_overwhelming(self, cross_panel):
        f = cross_panel.frame
        trad = f.loc[f["mode"] == OperationalMode.TRADITIONAL.value, "revenue_per_min"]
        ai = f.loc[f["mode"] == OperationalMode.WEATHER_AWARE_AI.value, "revenue_per_min"]
        t, _, p = welch_t(ai, trad)
        assert abs(t) > 30
        assert p < 0.001
        assert cohens_d(ai, trad) > 0.8

    def test_stars(self):
        assert significance_stars(0.0005) == "***"
        assert significance_stars(0.005) == "**"
        assert significance_stars(0.02) == "*"
        assert significance_stars(0.2) == ""
