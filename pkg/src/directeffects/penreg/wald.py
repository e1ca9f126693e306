"""Unpenalized fits on a predictor subset with Wald significance tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, stats
from scipy.special import expit

from ..errors import ConfigurationError
from .solver import _as_float

SEPARATION_BOUND = 15.0
_NEWTON_ITERS = 100
_DIVERGENCE_BOUND = 40.0


@dataclass
class WaldFit:
    """Coefficients, standard errors and two-sided p-values for ``subset``.

    Entries are aligned with ``subset``. Columns dropped for rank reasons
    get ``nan`` estimates and p-value 1; coefficients beyond the separation
    bound are listed in ``unstable`` and carry likelihood-ratio p-values.
    """

    subset: np.ndarray
    coef: np.ndarray
    se: np.ndarray
    pvalues: np.ndarray
    intercept: float
    loglik: float
    family: str = "logistic"
    dropped: list = field(default_factory=list)
    unstable: list = field(default_factory=list)

    def pvalue_map(self):
        return {int(j): float(p) for j, p in zip(self.subset, self.pvalues)}


def logistic_loglik(X1, y, theta):
    eta = X1 @ theta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def logistic_mle(X1, y):
    """Newton-Raphson with step halving on an intercept-augmented design.

    Returns ``(theta, loglik, information)``. Stops early once a
    coefficient runs away (separated data), leaving it large but finite.
    """
    theta = np.zeros(X1.shape[1])
    ll = logistic_loglik(X1, y, theta)
    info = None
    for _ in range(_NEWTON_ITERS):
        mu = expit(X1 @ theta)
        w = mu * (1 - mu)
        info = X1.T @ (X1 * w[:, None])
        grad = X1.T @ (y - mu)
        try:
            step = linalg.solve(info, grad, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            step = linalg.lstsq(info, grad)[0]
        t = 1.0
        while True:
            cand = theta + t * step
            ll_new = logistic_loglik(X1, y, cand)
            if ll_new >= ll - 1e-12 or t < 1e-10:
                break
            t *= 0.5
        theta, ll_old, ll = cand, ll, ll_new
        if np.max(np.abs(t * step)) < 1e-10 or abs(ll - ll_old) < 1e-12 * (1 + abs(ll)):
            break
        if np.max(np.abs(theta[1:]), initial=0.0) > _DIVERGENCE_BOUND:
            break
    mu = expit(X1 @ theta)
    info = X1.T @ (X1 * (mu * (1 - mu))[:, None])
    return theta, ll, info


def independent_columns(X, subset):
    """Split ``subset`` into columns kept and columns dropped as constant or
    linearly dependent on earlier kept ones (including the intercept)."""
    kept, dropped = [], []
    for j in subset:
        col = X[:, j]
        if np.ptp(col) == 0:
            dropped.append(j)
            continue
        trial = np.column_stack([np.ones(len(col))] + [X[:, k] for k in kept] + [col])
        if np.linalg.matrix_rank(trial) < trial.shape[1]:
            dropped.append(j)
        else:
            kept.append(j)
    return kept, dropped


def _ols(X1, y):
    theta, _, rank, _ = linalg.lstsq(X1, y)
    resid = y - X1 @ theta
    dof = X1.shape[0] - X1.shape[1]
    sigma2 = resid @ resid / dof
    cov = sigma2 * linalg.inv(X1.T @ X1)
    se = np.sqrt(np.diag(cov))
    n = len(y)
    ll = -0.5 * n * (np.log(2 * np.pi * resid @ resid / n) + 1)
    return theta, se, dof, ll


def fit_wald(X, y, subset, family="logistic") -> WaldFit:
    """Unpenalized regression of ``y`` on the columns in ``subset``.

    ``family="logistic"`` (default) gives Wald z tests; ``family="linear"``
    fits least squares with t tests. p-values do not depend on the order of
    ``subset`` except through which of two collinear columns is dropped.
    """
    X = _as_float(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    subset = np.asarray(list(subset), dtype=np.int64)
    if family not in ("logistic", "linear"):
        raise ConfigurationError(f"unknown family {family!r}")
    n = X.shape[0]
    if len(subset) and (subset.min() < 0 or subset.max() >= X.shape[1]):
        raise ConfigurationError("subset index out of range")
    if len(set(subset.tolist())) != len(subset):
        raise ConfigurationError("subset contains repeated indices")
    if len(subset) >= n / 2:
        raise ConfigurationError(f"subset of size {len(subset)} too large for n={n}")

    # fix a canonical column order so results do not depend on input order
    order = np.sort(subset)
    kept, dropped = independent_columns(X, order.tolist())
    X1 = np.column_stack([np.ones(n)] + [X[:, j] for j in kept])

    coef = dict.fromkeys(subset.tolist(), np.nan)
    se = dict.fromkeys(subset.tolist(), np.nan)
    pval = dict.fromkeys(subset.tolist(), 1.0)
    unstable = []

    if family == "linear":
        theta, s, dof, ll = _ols(X1, y)
        for pos, j in enumerate(kept, start=1):
            coef[j], se[j] = theta[pos], s[pos]
            pval[j] = float(2 * stats.t.sf(abs(theta[pos] / s[pos]), dof))
    else:
        theta, ll, info = logistic_mle(X1, y)
        try:
            cov = linalg.inv(info)
            s = np.sqrt(np.clip(np.diag(cov), 0, None))
        except linalg.LinAlgError:
            s = np.full(len(theta), np.inf)
        for pos, j in enumerate(kept, start=1):
            coef[j], se[j] = theta[pos], s[pos]
            if abs(theta[pos]) > SEPARATION_BOUND:
                unstable.append(j)
                reduced = np.delete(X1, pos, axis=1)
                _, ll_red, _ = logistic_mle(reduced, y)
                lr = max(2.0 * (ll - ll_red), 0.0)
                pval[j] = float(stats.chi2.sf(lr, 1))
            else:
                z = theta[pos] / s[pos] if s[pos] > 0 else np.inf
                pval[j] = float(2 * stats.norm.sf(abs(z)))

    keys = subset.tolist()
    return WaldFit(
        subset=subset,
        coef=np.array([coef[j] for j in keys], dtype=float),
        se=np.array([se[j] for j in keys], dtype=float),
        pvalues=np.clip(np.array([pval[j] for j in keys], dtype=float), 0.0, 1.0),
        intercept=float(theta[0]),
        loglik=float(ll),
        family=family,
        dropped=dropped,
        unstable=unstable,
    )
