"""Scoring selections against the known causal predictors.

Vocabulary per replicate:

* true find: a selected causal predictor
* false find: any other selected predictor
* strong true find: every causal predictor selected
* strong false find: at least one false find
* perfect find: strong true find and no strong false find
* FDR: false finds / total finds, taken as 0 when nothing is selected

The relaxed ("HCT") variant also credits a causal predictor as found when a
selected predictor has absolute sample correlation of at least ``corr_min``
with it, and does not count such proxies as false finds.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import UsageError
from .simgen import BinaryMatrix, GroundTruth

__all__ = ["FindMetrics", "AggregateMetrics", "score", "score_hct", "aggregate"]


@dataclass(frozen=True)
class FindMetrics:
    true_finds: int
    false_finds: int
    strong_true_find: bool
    strong_false_find: bool
    perfect_find: bool
    fdr: float

    def as_dict(self):
        return asdict(self)


METRIC_FIELDS = tuple(f.name for f in fields(FindMetrics))


def _selected(sel):
    return set(int(j) for j in getattr(sel, "selected", sel))


def _truth(truth):
    return set(truth.indices) if isinstance(truth, GroundTruth) else set(int(j) for j in truth)


def _finish(true_finds, false_finds, strong_true):
    strong_false = false_finds > 0
    total = true_finds + false_finds
    return FindMetrics(
        true_finds=int(true_finds),
        false_finds=int(false_finds),
        strong_true_find=bool(strong_true),
        strong_false_find=bool(strong_false),
        perfect_find=bool(strong_true and not strong_false),
        fdr=false_finds / max(1, total),
    )


def score(sel, truth) -> FindMetrics:
    """Strict scoring. ``sel`` is a SelectionResult or an iterable of indices;
    ``truth`` a GroundTruth or an iterable of causal indices."""
    s, t = _selected(sel), _truth(truth)
    return _finish(len(s & t), len(s - t), t <= s)


def abs_correlation(X, rows, cols):
    """|Pearson correlation| between the listed columns; 0 where a column is
    constant."""
    V = np.asarray(X.values if isinstance(X, BinaryMatrix) else X, dtype=float)
    A = V[:, list(rows)] - V[:, list(rows)].mean(axis=0)
    B = V[:, list(cols)] - V[:, list(cols)].mean(axis=0)
    na = np.sqrt((A**2).sum(axis=0))
    nb = np.sqrt((B**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        C = (A.T @ B) / np.outer(na, nb)
    return np.nan_to_num(np.abs(C), nan=0.0)


def score_hct(sel, truth, X, corr_min=0.9) -> FindMetrics:
    """Relaxed scoring using correlations measured on the realized ``X``.

    ``true_finds`` counts causal predictors that are recovered directly or
    through a proxy; ``false_finds`` counts selected predictors that are
    neither causal nor proxies.
    """
    s, t = sorted(_selected(sel)), sorted(_truth(truth))
    if not s or not t:
        return score(s, t)
    C = abs_correlation(X, t, s)
    # a tiny slack keeps corr_min=1 meaning "identical up to rounding"
    close = C >= corr_min - 1e-12
    for a, ti in enumerate(t):
        for b, sj in enumerate(s):
            if ti == sj:
                close[a, b] = True
    found = close.any(axis=1)
    proxy = close.any(axis=0)
    return _finish(int(found.sum()), int((~proxy).sum()), bool(found.all()))


@dataclass
class AggregateMetrics:
    """Replicate means with Monte Carlo standard errors; booleans become
    rates."""

    count: int
    mean: dict
    se: dict

    def __getitem__(self, name):
        return self.mean[name]


def aggregate(items) -> AggregateMetrics:
    items = list(items)
    if not items:
        raise UsageError("cannot aggregate an empty list of metrics")
    mean, se = {}, {}
    for name in METRIC_FIELDS:
        v = np.array([float(getattr(m, name)) for m in items])
        mean[name] = float(v.mean())
        se[name] = float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else 0.0
    return AggregateMetrics(len(items), mean, se)
