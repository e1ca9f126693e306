"""Two-sided Fisher exact test for 2x2 tables of binary data."""

import math

import numpy as np
from scipy.special import gammaln

# relative band inside which two table probabilities are compared exactly
_TIE_BAND = 1e-7


def _log_comb(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def table_pvalue(a, b, c, d):
    """Two-sided p-value of the table [[a, b], [c, d]].

    Sums the hypergeometric probabilities of every table with the observed
    margins that is no more probable than the observed one. Probabilities
    are handled in log space; tables whose probability is within a 1e-7
    relative band of the observed one are compared with exact integer
    arithmetic so ties are resolved exactly.
    """
    a, b, c, d = (int(v) for v in (a, b, c, d))
    if min(a, b, c, d) < 0:
        raise ValueError("table counts must be non-negative")
    r1, r2, c1 = a + b, c + d, a + c
    lo, hi = max(0, c1 - r2), min(r1, c1)
    if lo == hi:
        return 1.0
    x = np.arange(lo, hi + 1)
    logp = _log_comb(r1, x) + _log_comb(r2, c1 - x)
    obs = logp[a - lo]
    keep = logp <= obs
    near = np.abs(logp - obs) <= _TIE_BAND
    if near.any():
        obs_exact = math.comb(r1, a) * math.comb(r2, c1 - a)
        for i in np.flatnonzero(near):
            k = int(x[i])
            keep[i] = math.comb(r1, k) * math.comb(r2, c1 - k) <= obs_exact
    top = logp.max()
    weights = np.exp(logp - top)
    p = weights[keep].sum() / weights.sum()
    return float(min(1.0, p))


def contingency(x, y):
    """Counts [[x=1&y=1, x=1&y=0], [x=0&y=1, x=0&y=0]]."""
    x = np.asarray(x).astype(bool)
    y = np.asarray(y).astype(bool)
    if x.shape != y.shape:
        raise ValueError("x and y differ in length")
    a = int(np.sum(x & y))
    b = int(np.sum(x & ~y))
    c = int(np.sum(~x & y))
    d = int(np.sum(~x & ~y))
    return a, b, c, d


def fisher_exact(x, y):
    """Two-sided Fisher exact p-value for the association of binary ``x``
    with binary ``y``."""
    return table_pvalue(*contingency(x, y))
