"""Independent reference computations used by the tests.

Nothing here imports the package's numerical code.
"""

import math
from fractions import Fraction

import numpy as np


def _patterns(X, y):
    """Collapse a binary n x 2 design into its (at most 4) row patterns."""
    X = np.asarray(X, dtype=int)
    y = np.asarray(y, dtype=int)
    pats, ones, counts = [], [], []
    for a in (0, 1):
        for b in (0, 1):
            m = (X[:, 0] == a) & (X[:, 1] == b)
            if m.any():
                pats.append((a, b))
                counts.append(m.sum())
                ones.append(y[m].sum())
    return np.array(pats, float), np.array(ones, float), np.array(counts, float)


def _profile_nll(B1, B2, pats, ones, counts, n):
    """(1/n) NLL minimized over the intercept, for every (B1, B2) on a grid."""
    s = B1[..., None] * pats[:, 0] + B2[..., None] * pats[:, 1]
    a = np.zeros(B1.shape)
    for _ in range(60):
        mu = 1 / (1 + np.exp(-(a[..., None] + s)))
        g = (counts * mu - ones).sum(-1)
        h = (counts * mu * (1 - mu)).sum(-1)
        a = a - g / np.maximum(h, 1e-300)
    eta = a[..., None] + s
    nll = (counts * np.logaddexp(0, eta) - ones * eta).sum(-1) / n
    return nll


def grid_objective_min(X, y, lam, alpha, step=1e-3, span=4.0):
    """Minimum of (1/n)NLL + lam*alpha*|b|_1 + lam*(1-alpha)*|b|_2^2 over a
    lattice of (b1, b2) multiples of ``step``, intercept profiled out.

    A coarse pass over [-span, span]^2 locates the basin; a fine pass at
    ``step`` covers +-0.05 around it.
    """
    pats, ones, counts = _patterns(X, y)
    n = len(y)

    def obj(B1, B2):
        pen = lam * alpha * (np.abs(B1) + np.abs(B2)) + lam * (1 - alpha) * (B1**2 + B2**2)
        return _profile_nll(B1, B2, pats, ones, counts, n) + pen

    coarse = np.round(np.arange(-span, span + 1e-9, 0.02), 2)
    B1, B2 = np.meshgrid(coarse, coarse, indexing="ij")
    V = obj(B1, B2)
    i, j = np.unravel_index(np.argmin(V), V.shape)
    c1, c2 = coarse[i], coarse[j]
    k = int(round(0.05 / step))
    f1 = (np.round(c1 / step) + np.arange(-k, k + 1)) * step
    f2 = (np.round(c2 / step) + np.arange(-k, k + 1)) * step
    B1, B2 = np.meshgrid(f1, f2, indexing="ij")
    V = obj(B1, B2)
    i, j = np.unravel_index(np.argmin(V), V.shape)
    return float(V[i, j]), (float(B1[i, j]), float(B2[i, j]))


def newton_logistic(X1, y, iters=100):
    """Plain Newton-Raphson logistic MLE on a design that already has the
    intercept column."""
    X1 = np.asarray(X1, float)
    y = np.asarray(y, float)
    th = np.zeros(X1.shape[1])
    for _ in range(iters):
        mu = 1 / (1 + np.exp(-X1 @ th))
        H = X1.T @ (X1 * (mu * (1 - mu))[:, None])
        th = th + np.linalg.solve(H, X1.T @ (y - mu))
    mu = 1 / (1 + np.exp(-X1 @ th))
    H = X1.T @ (X1 * (mu * (1 - mu))[:, None])
    return th, np.sqrt(np.diag(np.linalg.inv(H)))


def fisher_two_sided(a, b, c, d):
    """Exact two-sided Fisher p-value with rational arithmetic: the sum of
    hypergeometric probabilities of all tables no more likely than the
    observed one."""
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    denom = math.comb(n, c1)

    def prob(x):
        return Fraction(math.comb(r1, x) * math.comb(r2, c1 - x), denom)

    lo, hi = max(0, c1 - r2), min(r1, c1)
    p_obs = prob(a)
    total = sum((prob(x) for x in range(lo, hi + 1) if prob(x) <= p_obs), Fraction(0))
    return float(min(total, Fraction(1)))
