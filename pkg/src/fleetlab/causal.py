"""Five-strategy causal suite for the staggered rollout panel.

Event study, difference-in-differences on early vs late adopters, regression
discontinuity in implementation timing, propensity-score matching, and
heavy-rain instrumented two-stage least squares, plus the placebo and
heterogeneity batteries that stress the identification.

Every estimator is a pure function of an immutable panel frame and returns
an :class:`EffectEstimate`; the suite driver isolates failures per method.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy import stats as sps

from .config import SimConfig, spawn_stream
from .engine import PanelDataset
from .regression import RegressionSpec, ols, wald

__all__ = [
    "EffectEstimate",
    "EventStudyResult",
    "ParallelTrendsResult",
    "PropensityModel",
    "PlaceboReport",
    "CausalSuite",
    "event_study",
    "did",
    "parallel_trends_test",
    "rdd",
    "fit_propensity",
    "match_att",
    "iv_2sls",
    "placebo_suite",
    "heterogeneity",
    "run_causal_suite",
]

#: Day-level weather controls shared by the non-FE specifications.
WEATHER_CONTROLS = ("rain_mm", "extreme_temp", "low_visibility", "high_wind")


@dataclass(frozen=True)
class EffectEstimate:
    method: str
    effect: float
    pct_impact: float
    se: float
    t: float
    p: float
    ci_low: float
    ci_high: float
    n: int
    unit: str = "yen_per_min"
    notes: str = ""


@dataclass(frozen=True)
class EventStudyResult:
    ks: tuple[int, ...]
    betas: tuple[float, ...]
    ses: tuple[float, ...]
    reference_k: int
    pre_trend_F: float
    pre_trend_df1: int
    pre_trend_df2: int
    pre_trend_p: float
    post_average: EffectEstimate
    simple_before_after: EffectEstimate

    def frame(self) -> pd.DataFrame:
        rows = []
        for k, b, s in zip(self.ks, self.betas, self.ses):
            rows.append({"k": k, "beta": b, "se": s, "is_reference": int(k == self.reference_k)})
        return pd.DataFrame(rows).sort_values("k").reset_index(drop=True)


@dataclass(frozen=True)
class ParallelTrendsResult:
    F: float
    df1: int
    df2: int
    p: float
    #: dummy count before dropping the reference week (alternate df convention)
    df1_nominal: int
    n_pre_weeks: int


@dataclass(frozen=True)
class PropensityModel:
    names: tuple[str, ...]
    coef: np.ndarray
    scores: np.ndarray
    support: tuple[float, float]
    converged: bool
    iterations: int


@dataclass(frozen=True)
class PlaceboReport:
    fake_date_effects: tuple[float, ...]
    fake_date_tstats: tuple[float, ...]
    permuted_effects: tuple[float, ...]
    permuted_tstats: tuple[float, ...]
    significant_share: float
    mean_fake_effect: float
    mean_fake_se: float
    true_effect: float
    true_p: float

    def frame(self) -> pd.DataFrame:
        rows = []
        for kind, effs, ts in (
            ("fake_dates", self.fake_date_effects, self.fake_date_tstats),
            ("permuted", self.permuted_effects, self.permuted_tstats),
        ):
            for i, (e, t) in enumerate(zip(effs, ts)):
                rows.append({"battery": kind, "draw": i, "effect": e, "t": t})
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class CausalSuite:
    estimates: tuple[EffectEstimate, ...]
    event_study: EventStudyResult | None
    parallel_trends: ParallelTrendsResult | None
    first_stage_F: float | None
    placebo: PlaceboReport | None
    errors: tuple[tuple[str, str], ...] = field(default=())

    def table(self) -> pd.DataFrame:
        rows = [
            {
                "method": e.method,
                "effect": e.effect,
                "unit": e.unit,
                "pct_impact": e.pct_impact,
                "se": e.se,
                "t": e.t,
                "p": e.p,
                "n": e.n,
                "notes": e.notes,
            }
            for e in self.estimates
        ]
        for method, msg in self.errors:
            rows.append({"method": method, "notes": f"error: {msg}"})
        return pd.DataFrame(rows)


def _check_rollout(panel: PanelDataset) -> pd.DataFrame:
    if panel.experiment != "rollout":
        raise ValueError("estimator expects a rollout panel")
    return panel.frame


def _implement_day(frame: pd.DataFrame) -> pd.Series:
    return (frame["day"] - frame["relative_day"]).astype(int)


def _control_mean(frame: pd.DataFrame, outcome: str) -> float:
    return float(frame.loc[frame["treated"] == 0, outcome].mean())


def _estimate_from_fit(
    method: str, fit, coef_name: str, control_mean: float, unit: str = "yen_per_min", notes: str = ""
) -> EffectEstimate:
    b = fit.params[coef_name]
    se = fit.se[coef_name]
    lo, hi = fit.conf_int(coef_name)
    return EffectEstimate(
        method=method,
        effect=float(b),
        pct_impact=float(b / control_mean * 100.0) if unit == "yen_per_min" else float("nan"),
        se=float(se),
        t=float(fit.tstats[coef_name]),
        p=float(fit.pvalues[coef_name]),
        ci_low=float(lo),
        ci_high=float(hi),
        n=fit.n,
        unit=unit,
        notes=notes,
    )


# --------------------------------------------------------------------------
# event study
# --------------------------------------------------------------------------

def event_study(
    panel: PanelDataset, outcome: str = "revenue_per_min", window: int = 30, reference_k: int = -1
) -> EventStudyResult:
    """Relative-time coefficients with driver and day fixed effects.

    Relative days beyond the window are binned into the endpoints; the
    reference day is omitted and reported with beta = 0.
    """
    f = _check_rollout(panel).copy()
    k = np.clip(f["relative_day"].astype(int), -window, window)
    f["k"] = k
    present = sorted(set(k) - {reference_k})
    if not present:
        raise ValueError("no non-reference relative-time cells present")
    dummy_names = []
    for kk in present:
        name = f"k_m{-kk}" if kk < 0 else f"k_p{kk}"
        f[name] = (f["k"] == kk).astype(float)
        dummy_names.append(name)

    spec = RegressionSpec(
        outcome=outcome,
        regressors=tuple(dummy_names),
        fixed_effects=("driver_id", "day"),
        cluster="driver_id",
    )
    fit = ols(f, spec)

    ks, betas, ses = [reference_k], [0.0], [0.0]
    for kk, name in zip(present, dummy_names):
        ks.append(kk)
        betas.append(float(fit.params[name]))
        ses.append(float(fit.se[name]))

    pre_names = [n for kk, n in zip(present, dummy_names) if kk < 0]
    if pre_names:
        F, df1, df2, p = wald(fit, pre_names)
    else:
        F, df1, df2, p = float("nan"), 0, fit.df_resid, float("nan")

    post_names = [n for kk, n in zip(present, dummy_names) if kk >= 0]
    idx = [fit.names.index(n) for n in post_names]
    w = np.full(len(idx), 1.0 / len(idx))
    eff = float(w @ fit.beta[idx])
    var = float(w @ fit.vcov[np.ix_(idx, idx)] @ w)
    se = np.sqrt(var)
    dfq = fit._inference_df
    t = eff / se
    p_eff = float(2.0 * sps.t.sf(abs(t), dfq))
    q = sps.t.ppf(0.975, dfq)
    cm = _control_mean(f, outcome)
    post_avg = EffectEstimate(
        method="event_study",
        effect=eff,
        pct_impact=eff / cm * 100.0,
        se=float(se),
        t=float(t),
        p=p_eff,
        ci_low=eff - q * se,
        ci_high=eff + q * se,
        n=fit.n,
        notes="average of post-period relative-day coefficients",
    )

    # Raw before/after contrast reported alongside the dynamic specification.
    treated_mean = float(f.loc[f["treated"] == 1, outcome].mean())
    a = f.loc[f["treated"] == 1, outcome].to_numpy()
    b = f.loc[f["treated"] == 0, outcome].to_numpy()
    diff = treated_mean - cm
    se_sb = float(np.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b)))
    t_sb = diff / se_sb
    simple = EffectEstimate(
        method="event_study_simple",
        effect=diff,
        pct_impact=diff / cm * 100.0,
        se=se_sb,
        t=t_sb,
        p=float(2.0 * sps.norm.sf(abs(t_sb))),
        ci_low=diff - 1.96 * se_sb,
        ci_high=diff + 1.96 * se_sb,
        n=len(f),
        notes="raw before/after mean difference",
    )

    return EventStudyResult(
        ks=tuple(ks),
        betas=tuple(betas),
        ses=tuple(ses),
        reference_k=reference_k,
        pre_trend_F=float(F),
        pre_trend_df1=df1,
        pre_trend_df2=df2,
        pre_trend_p=float(p),
        post_average=post_avg,
        simple_before_after=simple,
    )


# --------------------------------------------------------------------------
# difference-in-differences
# --------------------------------------------------------------------------

def _did_frame(f: pd.DataFrame) -> pd.DataFrame:
    impl = _implement_day(f)
    median = float(np.median(impl.groupby(f["driver_id"]).first()))
    g = f.copy()
    g["early"] = (impl < median).astype(float)
    g["post"] = (g["day"] >= median).astype(float)
    g["early_post"] = g["early"] * g["post"]
    return g


def did(
    panel_or_frame, outcome: str = "revenue_per_min", covariates: tuple[str, ...] = WEATHER_CONTROLS
) -> EffectEstimate:
    """Early-vs-late adopter DiD around the median implementation date.

    Observations whose actual treatment status contradicts their group-by-
    period cell (early adopters already treated before the median date, late
    adopters treated after it) are excluded, keeping the comparison clean
    under full eventual adoption.
    """
    f = panel_or_frame.frame if isinstance(panel_or_frame, PanelDataset) else panel_or_frame
    if isinstance(panel_or_frame, PanelDataset) and panel_or_frame.experiment != "rollout":
        raise ValueError("estimator expects a rollout panel")
    g = _did_frame(f)
    if g["early"].nunique() < 2 or g["post"].nunique() < 2:
        raise ValueError("degenerate adopter or period grouping")
    clean = g[g["treated"] == g["early_post"]]
    cov = tuple(c for c in covariates if c in clean.columns and clean[c].nunique() > 1)
    spec = RegressionSpec(
        outcome=outcome,
        regressors=("early_post", "early", "post"),
        covariates=cov,
        cluster="driver_id",
    )
    fit = ols(clean, spec)
    cm = _control_mean(f, outcome)
    return _estimate_from_fit(
        "did", fit, "early_post", cm, notes="clean-control sample under full adoption"
    )


def parallel_trends_test(
    panel: PanelDataset, outcome: str = "revenue_per_min", max_weeks: int = 20
) -> ParallelTrendsResult:
    """Joint test of early-adopter x pre-week interactions on pre-rollout days.

    Weeks count back in 7-day bins from the first implementation day, using
    only days on which no driver is yet treated so both groups are observed
    untreated. The latest pre-week serves as reference.
    """
    f = _check_rollout(panel)
    impl = _implement_day(f)
    first_impl = int(impl.min())
    median = float(np.median(impl.groupby(f["driver_id"]).first()))
    pre = f[f["day"] < first_impl].copy()
    if pre.empty:
        raise ValueError("no clean pre-period days available")
    week = ((pre["day"] - first_impl) // 7).astype(int)  # negative indices
    weeks = sorted(week.unique())[-max_weeks:]
    if len(weeks) < 2:
        raise ValueError("need at least 2 constructible pre-period weeks")
    pre = pre[week.isin(weeks)]
    week = week[week.isin(weeks)]
    pre["early"] = (_implement_day(pre) < median).astype(float)

    inter_names = []
    week_names = []
    ref = weeks[-1]
    for wnum in weeks:
        wn = f"week_m{-wnum}"
        pre[wn] = (week == wnum).astype(float)
        if wnum != weeks[0]:
            week_names.append(wn)  # drop first week main effect vs intercept
        if wnum != ref:
            iname = f"early_x_week_m{-wnum}"
            pre[iname] = pre["early"] * pre[wn]
            inter_names.append(iname)

    spec = RegressionSpec(
        outcome=outcome,
        regressors=tuple(inter_names),
        covariates=("early", *week_names),
        cluster="driver_id",
    )
    fit = ols(pre, spec)
    F, df1, df2, p = wald(fit, inter_names)
    return ParallelTrendsResult(
        F=F, df1=df1, df2=df2, p=p, df1_nominal=len(weeks), n_pre_weeks=len(weeks)
    )


# --------------------------------------------------------------------------
# regression discontinuity
# --------------------------------------------------------------------------

def rdd(
    panel_or_frame,
    bandwidth_days: int = 10,
    poly_order: int = 1,
    outcome: str = "revenue_per_min",
) -> EffectEstimate:
    """Local polynomial RDD in implementation timing around the median.

    Uniform kernel over |implement_day - median| <= bandwidth, polynomial
    slopes fitted separately on each side of the cutoff; the coefficient on
    the treatment indicator is the jump.
    """
    if bandwidth_days < 2:
        raise ValueError("bandwidth must cover at least 2 days each side")
    if poly_order not in (1, 2):
        raise ValueError("poly_order must be 1 or 2")
    f = panel_or_frame.frame if isinstance(panel_or_frame, PanelDataset) else panel_or_frame
    if isinstance(panel_or_frame, PanelDataset) and panel_or_frame.experiment != "rollout":
        raise ValueError("estimator expects a rollout panel")
    impl = _implement_day(f)
    median = float(np.median(impl.groupby(f["driver_id"]).first()))
    r = impl - median
    g = f[np.abs(r) <= bandwidth_days].copy()
    if len(g) < 10 * (poly_order + 1):
        raise ValueError("too few observations inside the bandwidth")
    g["r"] = r[np.abs(r) <= bandwidth_days].astype(float)
    g["right"] = (g["r"] >= 0).astype(float)
    cov = ["r", "r_right"]
    g["r_right"] = g["r"] * g["right"]
    if poly_order == 2:
        g["r2"] = g["r"] ** 2
        g["r2_right"] = g["r2"] * g["right"]
        cov += ["r2", "r2_right"]
    g["treat"] = g["treated"].astype(float)
    spec = RegressionSpec(
        outcome=outcome,
        regressors=("treat",),
        covariates=tuple(cov),
        cluster="driver_id",
    )
    fit = ols(g, spec)
    cm = _control_mean(f, outcome)
    return _estimate_from_fit(
        "rdd", fit, "treat", cm,
        notes=f"uniform kernel, bandwidth +/-{bandwidth_days}d, order {poly_order}",
    )


# --------------------------------------------------------------------------
# propensity score matching
# --------------------------------------------------------------------------

PROPENSITY_COVARIATES = (
    "skill_medium",
    "skill_high",
    "experience_years",
    "rain_mm",
    "extreme_temp",
    "low_visibility",
    "high_wind",
    "weekend",
)


def _propensity_design(f: pd.DataFrame) -> pd.DataFrame:
    g = f.copy()
    g["skill_medium"] = (g["skill"] == "medium").astype(float)
    g["skill_high"] = (g["skill"] == "high").astype(float)
    g["weekend"] = (g["day_of_week"] >= 5).astype(float)
    return g


def fit_propensity(
    panel_or_frame, covariates: tuple[str, ...] = PROPENSITY_COVARIATES
) -> PropensityModel:
    """Logistic treatment model fit by iteratively reweighted least squares."""
    f = panel_or_frame.frame if isinstance(panel_or_frame, PanelDataset) else panel_or_frame
    g = _propensity_design(f)
    y = g["treated"].to_numpy(dtype=float)
    if y.min() == y.max():
        raise ValueError("both treatment classes must be present")
    X = np.column_stack([g[c].to_numpy(dtype=float) for c in covariates] + [np.ones(len(g))])
    names = tuple(covariates) + ("const",)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ValueError(
            "propensity design matrix is rank deficient; drop constant or "
            "collinear covariates from " + ", ".join(covariates)
        )
    beta = np.zeros(X.shape[1])
    converged = False
    it = 0
    for it in range(1, 101):
        eta = np.clip(X @ beta, -30.0, 30.0)
        mu = 1.0 / (1.0 + np.exp(-eta))
        w = mu * (1.0 - mu)
        if w.max() < 1e-10:
            raise ValueError("perfect separation detected (degenerate weights)")
        z = eta + (y - mu) / np.maximum(w, 1e-10)
        WX = X * w[:, None]
        new = np.linalg.solve(X.T @ WX, WX.T @ z)
        step = float(np.max(np.abs(new - beta)))
        beta = new
        if step < 1e-8:
            converged = True
            break
    if np.max(np.abs(beta)) > 25.0:
        raise ValueError("perfect separation detected (diverging coefficients)")
    scores = 1.0 / (1.0 + np.exp(-np.clip(X @ beta, -30.0, 30.0)))
    t_scores = scores[y == 1]
    c_scores = scores[y == 0]
    lo = max(t_scores.min(), c_scores.min())
    hi = min(t_scores.max(), c_scores.max())
    if lo > hi:
        raise ValueError("empty common support")
    return PropensityModel(names, beta, scores, (float(lo), float(hi)), converged, it)


def match_att(
    panel_or_frame, model: PropensityModel, outcome: str = "revenue_per_min"
) -> EffectEstimate:
    """1-nearest-neighbor ATT on the propensity score, matching with
    replacement inside the common-support region."""
    f = panel_or_frame.frame if isinstance(panel_or_frame, PanelDataset) else panel_or_frame
    y = f[outcome].to_numpy(dtype=float)
    treated = f["treated"].to_numpy() == 1
    scores = model.scores
    lo, hi = model.support
    in_support = (scores >= lo) & (scores <= hi)
    t_idx = np.flatnonzero(treated & in_support)
    c_idx = np.flatnonzero(~treated)
    if len(t_idx) == 0 or len(c_idx) == 0:
        raise ValueError("empty common support")
    dropped = int(treated.sum() - len(t_idx))
    order = np.argsort(scores[c_idx], kind="stable")
    c_sorted = c_idx[order]
    c_scores = scores[c_sorted]
    pos = np.searchsorted(c_scores, scores[t_idx])
    pos_lo = np.clip(pos - 1, 0, len(c_sorted) - 1)
    pos_hi = np.clip(pos, 0, len(c_sorted) - 1)
    pick_hi = np.abs(c_scores[pos_hi] - scores[t_idx]) < np.abs(c_scores[pos_lo] - scores[t_idx])
    matched = np.where(pick_hi, c_sorted[pos_hi], c_sorted[pos_lo])
    diffs = y[t_idx] - y[matched]
    att = float(diffs.mean())
    se = float(np.sqrt(diffs.var(ddof=1) / len(diffs)))
    t = att / se if se > 0 else 0.0
    cm = float(y[~treated].mean())
    return EffectEstimate(
        method="psm",
        effect=att,
        pct_impact=att / cm * 100.0,
        se=se,
        t=t,
        p=float(2.0 * sps.norm.sf(abs(t))),
        ci_low=att - 1.96 * se,
        ci_high=att + 1.96 * se,
        n=len(t_idx),
        notes=f"1-NN with replacement; {dropped} treated outside support dropped",
    )


# --------------------------------------------------------------------------
# instrumental variables
# --------------------------------------------------------------------------

def iv_2sls(
    panel: PanelDataset, outcome: str = "revenue_per_min"
) -> tuple[EffectEstimate, float]:
    """Heavy-rain-instrumented effect of utilization on revenue.

    First stage: utilization (percentage points) on HeavyRain x Post with a
    treated main effect and driver and day fixed effects (day effects absorb
    the heavy-rain main effect). Second stage via the just-identified ratio,
    with driver-clustered inference. Returns (estimate, first_stage_F).
    """
    f = _check_rollout(panel)
    y = f[outcome].to_numpy(dtype=float)
    x = f["utilization"].to_numpy(dtype=float) * 100.0
    z = (f["heavy_rain"] * f["treated"]).to_numpy(dtype=float)
    if z.min() == z.max():
        raise ValueError("instrument does not vary")
    controls = np.column_stack([f["treated"].to_numpy(dtype=float)])
    drv = pd.factorize(f["driver_id"])[0]
    dayc = pd.factorize(f["day"])[0]

    def absorb(v: np.ndarray) -> np.ndarray:
        out = v.astype(float).copy()
        for _ in range(100):
            before = out.copy()
            for codes in (drv, dayc):
                means = np.bincount(codes, weights=out) / np.bincount(codes)
                out -= means[codes]
            if np.max(np.abs(out - before)) < 1e-12:
                break
        return out

    Ct = np.column_stack([absorb(controls[:, j]) for j in range(controls.shape[1])])

    def partial(v: np.ndarray) -> np.ndarray:
        vt = absorb(v)
        b, *_ = np.linalg.lstsq(Ct, vt, rcond=None)
        return vt - Ct @ b

    yt, xt, zt = partial(y), partial(x), partial(z)
    zx = float(zt @ xt)
    beta = float(zt @ yt) / zx

    G = int(drv.max()) + 1
    n = len(y)
    k_absorbed = controls.shape[1] + (int(drv.max()) + 1) + (int(dayc.max()) + 1)

    def clustered_var(score: np.ndarray, denom: float) -> float:
        s = np.bincount(drv, weights=score)
        cr1 = G / (G - 1) * (n - 1) / max(n - k_absorbed - 1, 1)
        return cr1 * float(s @ s) / denom**2

    u = yt - beta * xt
    var_beta = clustered_var(zt * u, zx)
    se = np.sqrt(var_beta)
    t = beta / se
    p = float(2.0 * sps.t.sf(abs(t), G - 1))
    q = sps.t.ppf(0.975, G - 1)
    est = EffectEstimate(
        method="iv_2sls",
        effect=beta,
        pct_impact=float("nan"),
        se=float(se),
        t=float(t),
        p=p,
        ci_low=beta - q * se,
        ci_high=beta + q * se,
        n=n,
        unit="yen_per_util_pt",
        notes="instrument: heavy rain x post, driver and day effects absorbed",
    )

    pi = zx / float(zt @ zt)
    e1 = xt - pi * zt
    var_pi = clustered_var(zt * e1, float(zt @ zt))
    F = float(pi**2 / var_pi)
    if F < 10.0:
        est = replace(est, notes=est.notes + "; WEAK INSTRUMENT (F < 10)")
    return est, F


# --------------------------------------------------------------------------
# placebo and heterogeneity batteries
# --------------------------------------------------------------------------

def placebo_suite(panel: PanelDataset, n_draws: int, rng: np.random.Generator) -> PlaceboReport:
    """Null-effect batteries on the clean pre-rollout sample.

    (a) fake implementation dates drawn inside the pre-period, (b) randomly
    permuted early/late assignment with a mid-pre-period cutoff. Both should
    detect nothing; the true-dates DiD is reported alongside for contrast.
    """
    if n_draws < 20:
        raise ValueError("n_draws must be >= 20")
    f = _check_rollout(panel)
    impl = _implement_day(f)
    first_impl = int(impl.min())
    pre = f[f["day"] < first_impl].copy()
    drivers = np.sort(pre["driver_id"].unique())
    pre_days = np.sort(pre["day"].unique())
    lo, hi = int(pre_days[len(pre_days) // 4]), int(pre_days[3 * len(pre_days) // 4])

    def pre_did(early_by_driver: dict[int, float], cutoff: float) -> tuple[float, float]:
        g = pre.copy()
        g["early"] = g["driver_id"].map(early_by_driver).astype(float)
        g["post"] = (g["day"] >= cutoff).astype(float)
        g["early_post"] = g["early"] * g["post"]
        cov = tuple(c for c in WEATHER_CONTROLS if g[c].nunique() > 1)
        spec = RegressionSpec(
            outcome="revenue_per_min",
            regressors=("early_post", "early", "post"),
            covariates=cov,
            cluster="driver_id",
        )
        fit = ols(g, spec)
        return float(fit.params["early_post"]), float(fit.tstats["early_post"])

    fake_effects, fake_ts = [], []
    for _ in range(n_draws):
        fake_impl = rng.integers(lo, hi + 1, size=len(drivers))
        med = float(np.median(fake_impl))
        labels = dict(zip(drivers.tolist(), (fake_impl < med).astype(float).tolist()))
        e, t = pre_did(labels, med)
        fake_effects.append(e)
        fake_ts.append(t)

    true_early = (impl.groupby(f["driver_id"]).first() < float(np.median(impl))).astype(float)
    perm_effects, perm_ts = [], []
    cutoff = float(np.median(pre_days))
    for _ in range(n_draws):
        shuffled = rng.permutation(true_early.to_numpy())
        labels = dict(zip(drivers.tolist(), shuffled.tolist()))
        e, t = pre_did(labels, cutoff)
        perm_effects.append(e)
        perm_ts.append(t)

    all_ts = np.array(fake_ts + perm_ts)
    share = float(np.mean(np.abs(all_ts) >= 1.96))
    true_est = did(panel)
    ses = np.array(fake_effects).std(ddof=1)
    return PlaceboReport(
        fake_date_effects=tuple(fake_effects),
        fake_date_tstats=tuple(fake_ts),
        permuted_effects=tuple(perm_effects),
        permuted_tstats=tuple(perm_ts),
        significant_share=share,
        mean_fake_effect=float(np.mean(fake_effects + perm_effects)),
        mean_fake_se=float(ses),
        true_effect=true_est.effect,
        true_p=true_est.p,
    )


def heterogeneity(panel: PanelDataset, dimension: str) -> pd.DataFrame:
    """Subgroup DiD along skill, weather (heavy-rain days), or daytype."""
    f = _check_rollout(panel)
    if dimension == "skill":
        groups = [(s, f[f["skill"] == s]) for s in ("low", "medium", "high")]
    elif dimension == "weather":
        groups = [("heavy_rain_days", f[f["heavy_rain"] == 1]), ("clear_days", f[f["heavy_rain"] == 0])]
    elif dimension == "daytype":
        wk = f["day_of_week"] >= 5
        groups = [("weekend", f[wk]), ("weekday", f[~wk])]
    else:
        raise ValueError("dimension must be one of: skill, weather, daytype")
    rows = []
    for name, sub in groups:
        if sub.empty:
            rows.append({"subgroup": name, "notes": "omitted: empty subgroup"})
            continue
        try:
            est = did(sub)
        except ValueError as exc:
            rows.append({"subgroup": name, "notes": f"omitted: {exc}"})
            continue
        rows.append(
            {
                "subgroup": name,
                "effect": est.effect,
                "pct_impact": est.pct_impact,
                "se": est.se,
                "t": est.t,
                "p": est.p,
                "n": est.n,
                "notes": "",
            }
        )
    return pd.DataFrame(rows)


def run_causal_suite(
    panel: PanelDataset, cfg: SimConfig | None = None, n_placebo: int = 50
) -> CausalSuite:
    """Run all five estimators plus validity batteries, isolating failures."""
    estimates: list[EffectEstimate] = []
    errors: list[tuple[str, str]] = []
    es = None
    pt = None
    fsF = None
    placebo = None

    try:
        es = event_study(panel)
        estimates.append(es.post_average)
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("event_study", str(exc)))
    try:
        estimates.append(did(panel))
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("did", str(exc)))
    try:
        pt = parallel_trends_test(panel)
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("parallel_trends", str(exc)))
    try:
        estimates.append(rdd(panel))
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("rdd", str(exc)))
    try:
        model = fit_propensity(panel)
        estimates.append(match_att(panel, model))
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("psm", str(exc)))
    try:
        iv_est, fsF = iv_2sls(panel)
        estimates.append(iv_est)
    except (ValueError, np.linalg.LinAlgError) as exc:
        errors.append(("iv_2sls", str(exc)))
    if cfg is not None:
        try:
            placebo = placebo_suite(panel, n_placebo, spawn_stream(cfg, "placebo"))
        except (ValueError, np.linalg.LinAlgError) as exc:
            errors.append(("placebo", str(exc)))

    return CausalSuite(
        estimates=tuple(estimates),
        event_study=es,
        parallel_trends=pt,
        first_stage_F=fsF,
        placebo=placebo,
        errors=tuple(errors),
    )
