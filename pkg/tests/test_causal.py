import numpy as np
import pandas as pd
import pytest

from fleetlab.causal import (
    PropensityModel,
    did,
    event_study,
    fit_propensity,
    heterogeneity,
    iv_2sls,
    match_att,
    parallel_trends_test,
    placebo_suite,
    rdd,
)
from fleetlab.engine import PanelDataset


def _panel(frame):
    return PanelDataset(frame, "rollout", {})


def _synthetic_rollout(
    n_drivers=30, n_days=60, impl_lo=20, impl_hi=40, effect=0.0, pre_slope=0.0, seed=11
):
    """Small rollout-shaped panel with known treatment and trend structure."""
    rng = np.random.default_rng(seed)
    impl = rng.integers(impl_lo, impl_hi + 1, size=n_drivers)
    alpha = rng.normal(size=n_drivers)
    rows = []
    median = np.median(impl)
    for i in range(n_drivers):
        early = impl[i] < median
        for day in range(1, n_days + 1):
            treated = int(day >= impl[i])
            y = (
                10.0
                + alpha[i]
                + 0.05 * np.sin(day / 5.0)
                + effect * treated
                + (pre_slope * day if early else 0.0)
                + rng.normal(scale=0.1)
            )
            rows.append(
                {
                    "driver_id": i,
                    "day": day,
                    "relative_day": float(day - impl[i]),
                    "treated": treated,
                    "revenue_per_min": y,
                    "utilization": 0.5 + 0.1 * treated + rng.normal(scale=0.02),
                    "rain_mm": 0.0,
                    "extreme_temp": 0,
                    "low_visibility": 0,
                    "high_wind": 0,
                    "heavy_rain": 0,
                    "skill": "medium",
                    "experience_years": 5.0,
                    "day_of_week": (day - 1) % 7,
                }
            )
    return pd.DataFrame(rows)


class TestEventStudy:
    def test_null_dgp_has_flat_coefficients(self):
        panel = _panel(_synthetic_rollout(effect=0.0))
        es = event_study(panel)
        assert max(abs(b) for b in es.betas) < 0.25
        assert es.pre_trend_p > 0.01

    def test_recovers_injected_effect(self):
        panel = _panel(_synthetic_rollout(effect=3.0))
        es = event_study(panel)
        assert es.post_average.effect == pytest.approx(3.0, abs=0.2)
        pre = [b for k, b in zip(es.ks, es.betas) if k < 0]
        assert max(abs(b) for b in pre) < 0.25

    def test_reference_day_is_zeroed(self, causal_suite):
        es = causal_suite.event_study
        ref = dict(zip(es.ks, es.betas))[es.reference_k]
        assert ref == 0.0
        assert len(es.ks) == 61

    def test_sim_pre_trends_insignificant(self, causal_suite):
        assert causal_suite.event_study.pre_trend_p > 0.05

    def test_sim_post_effect_in_band(self, causal_suite):
        assert causal_suite.event_study.post_average.effect == pytest.approx(53.8, rel=0.15)

    def test_rejects_cross_sectional_panel(self, cross_panel):
        with pytest.raises(ValueError):
            event_study(cross_panel)


class TestDiD:
    def test_two_by_two_closed_form(self):
        # Saturated 2x2 design: estimate must equal the cell-mean contrast.
        rows = []
        for driver, impl in enumerate([5, 5, 100, 100]):
            for day, y in ((1, None), (60, None)):
                early = impl < 52.5
                post = day >= 52.5
                if early:
                    y = 15.0 if post else 10.0
                else:
                    y = 12.0 if post else 10.0
                rows.append(
                    {
                        "driver_id": driver,
                        "day": day,
                        "relative_day": float(day - impl),
                        "treated": int(day >= impl),
                        "revenue_per_min": y,
                    }
                )
        est = did(pd.DataFrame(rows))
        assert est.effect == pytest.approx(3.0, abs=1e-10)

    def test_recovers_injected_effect(self):
        est = did(_panel(_synthetic_rollout(effect=3.0)))
        assert est.effect == pytest.approx(3.0, abs=0.25)

    def test_null_dgp_monte_carlo(self):
        rejections = 0
        for seed in range(25):
            est = did(_panel(_synthetic_rollout(effect=0.0, seed=seed)))
            rejections += abs(est.t) >= 1.96
        assert rejections <= 3

    def test_sim_effect_in_band(self, causal_suite):
        est = next(e for e in causal_suite.estimates if e.method == "did")
        assert est.effect == pytest.approx(53.8, rel=0.15)
        assert est.p < 0.001

    def test_degenerate_grouping_rejected(self):
        f = _synthetic_rollout(n_drivers=6, impl_lo=30, impl_hi=30)
        with pytest.raises(ValueError, match="degenerate"):
            did(_panel(f))


class TestParallelTrends:
    def test_sim_passes(self, causal_suite):
        pt = causal_suite.parallel_trends
        assert pt.p > 0.05
        assert pt.df1 == pt.n_pre_weeks - 1
        assert pt.df1_nominal == pt.n_pre_weeks

    def test_power_against_diverging_trends(self):
        panel = _panel(_synthetic_rollout(pre_slope=0.05, seed=2))
        pt = parallel_trends_test(panel)
        assert pt.p < 0.01

    def test_needs_two_pre_weeks(self):
        f = _synthetic_rollout(impl_lo=8, impl_hi=12)
        with pytest.raises(ValueError, match="pre-period weeks"):
            parallel_trends_test(_panel(f))


class TestRDD:
    def test_synthetic_sharp_jump_exact(self):
        # Linear trend in the running variable plus an exact jump of 7.
        rows = []
        for i, r in enumerate(range(-10, 11)):
            impl = 50 + r
            treated = int(r >= 0)
            y = 2.0 + 0.5 * r + 7.0 * treated
            rows.append(
                {
                    "driver_id": i,
                    "day": 80,
                    "relative_day": float(80 - impl),
                    "treated": treated,
                    "revenue_per_min": y,
                }
            )
        est = rdd(pd.DataFrame(rows), bandwidth_days=10, poly_order=1)
        assert est.effect == pytest.approx(7.0, abs=1e-8)

    def test_sim_effect_in_band(self, causal_suite):
        est = next(e for e in causal_suite.estimates if e.method == "rdd")
        assert est.effect == pytest.approx(53.8, rel=0.15)

    def test_bandwidth_stability(self, rollout_panel):
        effects = [rdd(rollout_panel, bandwidth_days=b).effect for b in (5, 10, 15)]
        spread = (max(effects) - min(effects)) / np.mean(effects)
        assert spread < 0.20

    def test_argument_validation(self, rollout_panel):
        with pytest.raises(ValueError):
            rdd(rollout_panel, bandwidth_days=1)
        with pytest.raises(ValueError):
            rdd(rollout_panel, poly_order=3)


class TestPropensity:
    def test_uninformative_covariate_gives_flat_scores(self):
        f = _synthetic_rollout(effect=1.0, seed=3)
        f["experience_years"] = np.random.default_rng(0).normal(10, 2, len(f))
        model = fit_propensity(f, covariates=("experience_years",))
        share = f["treated"].mean()
        assert model.converged
        # With an intercept, mean fitted score equals the treated share exactly.
        assert model.scores.mean() == pytest.approx(share, abs=1e-6)
        assert model.scores.std() < 0.05

    def test_collinear_covariates_rejected(self):
        f = _synthetic_rollout()
        f["experience_years"] = 5.0
        with pytest.raises(ValueError, match="rank deficient"):
            fit_propensity(f, covariates=("experience_years",))

    def test_matches_gradient_descent_oracle(self):
        rng = np.random.default_rng(4)
        n = 300
        f = pd.DataFrame(
            {
                "driver_id": np.arange(n),
                "day": 1,
                "relative_day": 0.0,
                "experience_years": rng.normal(10, 3, n),
                "rain_mm": rng.gamma(1.0, 1.0, n),
                "extreme_temp": rng.integers(0, 2, n),
                "low_visibility": rng.integers(0, 2, n),
                "high_wind": rng.integers(0, 2, n),
                "skill": "low",
                "day_of_week": rng.integers(0, 7, n),
                "revenue_per_min": 1.0,
            }
        )
        logits = -1.0 + 0.15 * (f["experience_years"] - 10) + 0.8 * f["extreme_temp"]
        f["treated"] = (rng.random(n) < 1 / (1 + np.exp(-logits))).astype(int)
        covs = ("experience_years", "extreme_temp")
        model = fit_propensity(f, covariates=covs)

        # Independent optimizer: plain gradient descent on the log-likelihood.
        X = np.column_stack([f[c] for c in covs] + [np.ones(n)])
        y = f["treated"].to_numpy(dtype=float)
        beta = np.zeros(3)
        for _ in range(200_000):
            mu = 1 / (1 + np.exp(-X @ beta))
            grad = X.T @ (y - mu) / n
            beta += 0.05 * grad
            if np.max(np.abs(grad)) < 1e-10:
                break
        assert np.allclose(model.coef, beta, atol=1e-4)

    def test_perfect_separation_detected(self):
        f = _synthetic_rollout(n_drivers=10)
        f["experience_years"] = f["treated"] * 100.0  # separates the classes
        with pytest.raises(ValueError, match="separation"):
            fit_propensity(f, covariates=("experience_years",))

    def test_single_class_rejected(self):
        f = _synthetic_rollout(n_drivers=6, n_days=5, impl_lo=50, impl_hi=55)
        assert f["treated"].max() == 0
        with pytest.raises(ValueError, match="class"):
            fit_propensity(f)


class TestMatching:
    def test_small_instance_equals_brute_force(self):
        rng = np.random.default_rng(9)
        n = 18
        scores = rng.uniform(0.2, 0.8, n)
        treated = np.array([1] * 6 + [0] * 12)
        y = rng.normal(size=n) + 2.0 * treated
        f = pd.DataFrame({"treated": treated, "revenue_per_min": y})
        model = PropensityModel(
            names=(), coef=np.array([]), scores=scores,
            support=(float(scores.min()), float(scores.max())), converged=True, iterations=1,
        )
        est = match_att(f, model)
        # Exhaustive nearest-neighbor enumeration.
        diffs = []
        for i in np.flatnonzero(treated == 1):
            j = min(np.flatnonzero(treated == 0), key=lambda j: abs(scores[j] - scores[i]))
            diffs.append(y[i] - y[j])
        assert est.effect == pytest.approx(np.mean(diffs), abs=1e-12)

    def test_identical_scores_and_outcomes_give_zero(self):
        f = pd.DataFrame(
            {"treated": [1, 1, 0, 0], "revenue_per_min": [5.0, 5.0, 5.0, 5.0]}
        )
        model = PropensityModel(
            names=(), coef=np.array([]), scores=np.full(4, 0.5),
            support=(0.5, 0.5), converged=True, iterations=1,
        )
        assert match_att(f, model).effect == 0.0

    def test_sim_att_in_band(self, causal_suite):
        est = next(e for e in causal_suite.estimates if e.method == "psm")
        assert est.effect == pytest.approx(53.8, rel=0.15)


class TestIV:
    def test_small_system_matches_dummy_projection_oracle(self):
        # Two drivers x three days; oracle residualizes on explicit dummies.
        f = pd.DataFrame(
            {
                "driver_id": [0, 0, 0, 1, 1, 1],
                "day": [1, 2, 3, 1, 2, 3],
                "relative_day": [-1.0, 0.0, 1.0, -2.0, -1.0, 0.0],
                "treated": [0, 1, 1, 0, 0, 1],
                "heavy_rain": [0, 1, 0, 0, 1, 0],
                "utilization": [0.50, 0.71, 0.64, 0.48, 0.52, 0.66],
                "revenue_per_min": [40.0, 62.0, 55.0, 39.0, 41.0, 57.0],
            }
        )
        est, F = iv_2sls(_panel(f))
        y = f["revenue_per_min"].to_numpy()
        x = f["utilization"].to_numpy() * 100
        z = (f["heavy_rain"] * f["treated"]).to_numpy(dtype=float)
        C = np.column_stack(
            [
                f["treated"].to_numpy(dtype=float),
                pd.get_dummies(f["driver_id"]).to_numpy(dtype=float),
                pd.get_dummies(f["day"], drop_first=True).to_numpy(dtype=float),
            ]
        )
        resid = lambda v: v - C @ np.linalg.lstsq(C, v, rcond=None)[0]
        oracle = (resid(z) @ resid(y)) / (resid(z) @ resid(x))
        assert est.effect == pytest.approx(oracle, abs=1e-8)

    def test_sim_ratio_and_first_stage(self, causal_suite):
        est = next(e for e in causal_suite.estimates if e.method == "iv_2sls")
        assert est.effect == pytest.approx(0.68, rel=0.30)
        assert causal_suite.first_stage_F > 10
        assert "WEAK" not in est.notes

    def test_constant_instrument_rejected(self):
        f = _synthetic_rollout()
        f["heavy_rain"] = 0
        with pytest.raises(ValueError, match="instrument"):
            iv_2sls(_panel(f))


class TestBatteries:
    def test_placebo_share_is_small(self, causal_suite):
        pl = causal_suite.placebo
        assert pl.significant_share <= 0.10
        assert len(pl.fake_date_effects) == 50
        assert len(pl.permuted_effects) == 50
        assert abs(pl.mean_fake_effect) <= pl.mean_fake_se
        assert pl.true_p < 0.001

    def test_requires_enough_draws(self, rollout_panel):
        with pytest.raises(ValueError, match="n_draws"):
            placebo_suite(rollout_panel, 5, np.random.default_rng(0))

    def test_heterogeneity_skill_all_positive(self, rollout_panel):
        table = heterogeneity(rollout_panel, "skill")
        assert set(table["subgroup"]) == {"low", "medium", "high"}
        assert (table["effect"] > 0).all()
        assert (table["p"] < 0.05).all()

    def test_rainy_days_beat_clear_days(self, rollout_panel):
        table = heterogeneity(rollout_panel, "weather").set_index("subgroup")
        assert table.loc["heavy_rain_days", "effect"] > table.loc["clear_days", "effect"]

    def test_unknown_dimension(self, rollout_panel):
        with pytest.raises(ValueError, match="dimension"):
            heterogeneity(rollout_panel, "astrology")


class TestSuite:
    def test_five_methods_present(self, causal_suite):
        methods = {e.method for e in causal_suite.estimates}
        assert methods == {"event_study", "did", "rdd", "psm", "iv_2sls"}
        assert causal_suite.errors == ()

    def test_spread_is_tight(self, causal_suite):
        effs = [e.effect for e in causal_suite.estimates if e.unit == "yen_per_min"]
        spread = (max(effs) - min(effs)) / np.mean(effs)
        assert spread <= 0.15

    def test_scale_equivariance_of_did(self, rollout_panel):
        base = did(rollout_panel)
        scaled_frame = rollout_panel.frame.assign(
            revenue_per_min=rollout_panel.frame["revenue_per_min"] * 2.0
        )
        scaled = did(_panel(scaled_frame))
        assert scaled.effect == pytest.approx(2.0 * base.effect, rel=1e-10)
        assert scaled.t == pytest.approx(base.t, rel=1e-10)
