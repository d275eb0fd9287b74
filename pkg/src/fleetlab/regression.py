"""Shared least-squares engine: fixed-effect absorption, clustered errors.

One OLS implementation serves every estimator in :mod:`fleetlab.causal`.
Fixed effects are absorbed by iterated group demeaning (exact in one sweep
for a single factor, alternating projections otherwise), coefficients solve
the normal equations, and inference supports homoskedastic, HC1-robust, and
CR1 cluster-robust covariances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import stats as sps

__all__ = ["RegressionSpec", "RegressionResult", "ols", "wald"]


@dataclass(frozen=True)
class RegressionSpec:
    outcome: str
    regressors: tuple[str, ...]
    covariates: tuple[str, ...] = ()
    fixed_effects: tuple[str, ...] = ()
    cluster: str | None = None
    robust: bool = False
    add_intercept: bool = True

    def __post_init__(self) -> None:
        if not self.regressors:
            raise ValueError("at least one regressor is required")
        dup = set(self.regressors) & set(self.covariates)
        if dup:
            raise ValueError(f"columns listed twice: {sorted(dup)}")


@dataclass(frozen=True)
class RegressionResult:
    names: tuple[str, ...]
    beta: np.ndarray
    vcov: np.ndarray
    residuals: np.ndarray
    n: int
    df_resid: int
    n_clusters: int | None
    spec: RegressionSpec = field(repr=False)

    @property
    def params(self) -> dict[str, float]:
        return dict(zip(self.names, self.beta.tolist()))

    @property
    def se(self) -> dict[str, float]:
        return dict(zip(self.names, np.sqrt(np.diag(self.vcov)).tolist()))

    @property
    def _inference_df(self) -> int:
        if self.n_clusters is not None:
            return self.n_clusters - 1
        return self.df_resid

    @property
    def tstats(self) -> dict[str, float]:
        se = np.sqrt(np.diag(self.vcov))
        return dict(zip(self.names, (self.beta / se).tolist()))

    @property
    def pvalues(self) -> dict[str, float]:
        df = self._inference_df
        se = np.sqrt(np.diag(self.vcov))
        t = np.abs(self.beta / se)
        return dict(zip(self.names, (2.0 * sps.t.sf(t, df)).tolist()))

    def conf_int(self, name: str, level: float = 0.95) -> tuple[float, float]:
        q = sps.t.ppf(0.5 * (1.0 + level), self._inference_df)
        b = self.params[name]
        s = self.se[name]
        return b - q * s, b + q * s


def _demean(values: np.ndarray, groups: list[np.ndarray], tol: float = 1e-12) -> np.ndarray:
    """Absorb fixed effects by alternating within-group demeaning."""
    out = values.astype(float).copy()
    if not groups:
        return out
    for _ in range(200):
        delta = 0.0
        for codes in groups:
            for j in range(out.shape[1]):
                col = out[:, j]
                means = np.bincount(codes, weights=col) / np.bincount(codes)
                adj = means[codes]
                col -= adj
                delta = max(delta, float(np.max(np.abs(adj))))
        if delta < tol:
            break
    return out


def _rank_check(X: np.ndarray, names: list[str]) -> None:
    rank = np.linalg.matrix_rank(X)
    if rank == X.shape[1]:
        return
    # Identify offending columns greedily so the error is actionable.
    keep: list[int] = []
    bad: list[str] = []
    for j in range(X.shape[1]):
        trial = X[:, keep + [j]]
        if np.linalg.matrix_rank(trial) > len(keep):
            keep.append(j)
        else:
            bad.append(names[j])
    raise ValueError(f"rank-deficient design matrix; redundant columns: {bad}")


def ols(frame: pd.DataFrame, spec: RegressionSpec) -> RegressionResult:
    """Estimate the specification on a dataframe.

    Fixed effects named in ``spec.fixed_effects`` are absorbed before the
    solve, so their levels never appear among the reported coefficients.
    """
    cols = list(spec.regressors) + list(spec.covariates)
    missing = [c for c in cols + [spec.outcome] if c not in frame.columns]
    if spec.cluster is not None:
        missing += [spec.cluster] if spec.cluster not in frame.columns else []
    missing += [f for f in spec.fixed_effects if f not in frame.columns]
    if missing:
        raise ValueError(f"missing columns: {sorted(set(missing))}")

    y = frame[spec.outcome].to_numpy(dtype=float)
    X = frame[cols].to_numpy(dtype=float)
    names = list(cols)
    absorbed_df = 0
    if spec.fixed_effects:
        groups = []
        for fcol in spec.fixed_effects:
            codes = pd.factorize(frame[fcol])[0]
            groups.append(codes)
            absorbed_df += int(codes.max()) + 1 - 1
        absorbed_df += 1  # overall mean absorbed once
        stacked = _demean(np.column_stack([y[:, None], X]), groups)
        y = stacked[:, 0]
        X = stacked[:, 1:]
    elif spec.add_intercept:
        X = np.column_stack([X, np.ones(len(y))])
        names = names + ["const"]

    n, k = X.shape
    _rank_check(X, names)
    XtX = X.T @ X
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    df_resid = n - k - absorbed_df
    if df_resid <= 0:
        raise ValueError("non-positive residual degrees of freedom")
    bread = np.linalg.inv(XtX)

    n_clusters: int | None = None
    if spec.cluster is not None:
        codes = pd.factorize(frame[spec.cluster])[0]
        G = int(codes.max()) + 1
        if G < 2:
            raise ValueError("need at least 2 clusters for clustered errors")
        Xe = X * resid[:, None]
        meat = np.zeros((k, k))
        for g in range(G):
            sg = Xe[codes == g].sum(axis=0)
            meat += np.outer(sg, sg)
        cr1 = G / (G - 1) * (n - 1) / (n - k - absorbed_df)
        vcov = cr1 * bread @ meat @ bread
        n_clusters = G
    elif spec.robust:
        meat = (X * resid[:, None] ** 2).T @ X
        vcov = n / (n - k - absorbed_df) * bread @ meat @ bread
    else:
        sigma2 = resid @ resid / df_resid
        vcov = sigma2 * bread

    return RegressionResult(
        names=tuple(names),
        beta=beta,
        vcov=vcov,
        residuals=resid,
        n=n,
        df_resid=df_resid,
        n_clusters=n_clusters,
        spec=spec,
    )


def wald(result: RegressionResult, names: list[str]) -> tuple[float, int, int, float]:
    """Joint F-test that the named coefficients are all zero.

    With clustered errors the Hotelling-style small-sample correction is
    applied: F = T^2 (G - q) / (q (G - 1)) against F(q, G - q), since the
    q x q covariance block is estimated from only G cluster scores and the
    naive Wald over-rejects as q grows. This reduces to the usual t^2
    convention at q = 1. Unclustered fits use the standard F(q, df_resid).
    """
    idx = [result.names.index(nm) for nm in names]
    b = result.beta[idx]
    V = result.vcov[np.ix_(idx, idx)]
    q = len(idx)
    t2 = float(b @ np.linalg.solve(V, b))
    if result.n_clusters is not None:
        G = result.n_clusters
        if q >= G:
            raise ValueError("more restrictions than clusters; covariance is singular")
        stat = t2 * (G - q) / (q * (G - 1))
        df2 = G - q
    else:
        stat = t2 / q
        df2 = result.df_resid
    p = float(sps.f.sf(stat, q, df2))
    return stat, q, df2, p
