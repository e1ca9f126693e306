"""Synthetic binary SNP-like designs and logistic case-control responses.

Predictors are generated directly in binary form. Serial designs chain every
column to its left neighbour; clustered designs restart the chain at the
start of each cluster so clusters are mutually independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from . import _seeding
from .errors import ConfigurationError

__all__ = [
    "BinaryMatrix",
    "GroundTruth",
    "SerialConfig",
    "ClusterConfig",
    "gen_serial",
    "gen_clustered",
    "cluster_bounds",
    "assign_causal",
    "calibrate_intercept",
    "gen_response",
    "simulate_replicate",
]


def _default_labels(p):
    return [f"X{j}" for j in range(p)]


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """An n x p matrix of 0/1 predictor values with unique column labels."""

    values: np.ndarray
    labels: list = None

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise ConfigurationError(f"expected a 2-d matrix, got shape {values.shape}")
        if values.size and not np.isin(values, (0, 1)).all():
            raise ConfigurationError("BinaryMatrix entries must be 0 or 1")
        values = values.astype(np.uint8)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        labels = _default_labels(values.shape[1]) if self.labels is None else [str(s) for s in self.labels]
        if len(labels) != values.shape[1]:
            raise ConfigurationError(f"{len(labels)} labels for {values.shape[1]} columns")
        if len(set(labels)) != len(labels):
            raise ConfigurationError("column labels must be unique")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.values, other.values)

    def columns(self, idx):
        idx = list(idx)
        return BinaryMatrix(self.values[:, idx], [self.labels[j] for j in idx])

    def rows(self, idx):
        return BinaryMatrix(self.values[idx], self.labels)


@dataclass
class GroundTruth:
    """Causal predictor positions, their log-odds effects, and the intercept.

    ``intercept`` stays ``None`` until :func:`calibrate_intercept` has been
    applied to a concrete design.
    """

    indices: tuple
    coefficients: tuple
    intercept: float | None = None

    def __post_init__(self):
        self.indices = tuple(int(j) for j in self.indices)
        self.coefficients = tuple(float(b) for b in self.coefficients)
        if len(self.indices) != len(self.coefficients):
            raise ConfigurationError("indices and coefficients differ in length")
        if len(set(self.indices)) != len(self.indices):
            raise ConfigurationError("causal indices must be distinct")
        if any(j < 0 for j in self.indices):
            raise ConfigurationError("causal indices must be non-negative")
        if not all(np.isfinite(b) and b != 0 for b in self.coefficients):
            raise ConfigurationError("causal coefficients must be finite and nonzero")

    @property
    def causal(self):
        return list(zip(self.indices, self.coefficients))

    def check_against(self, p):
        bad = [j for j in self.indices if j >= p]
        if bad:
            raise ConfigurationError(f"causal indices {bad} out of range for p={p}")

    def linear_predictor(self, X):
        X = _values(X)
        self.check_against(X.shape[1])
        eta = np.zeros(X.shape[0])
        for j, b in self.causal:
            eta += b * X[:, j]
        if self.intercept is not None:
            eta += self.intercept
        return eta


@dataclass(frozen=True)
class SerialConfig:
    n: int
    p: int
    rho: float

    def __post_init__(self):
        _check_dims(self.n, self.p)
        _check_rho(self.rho)


@dataclass(frozen=True)
class ClusterConfig:
    n: int
    p: int
    k: int
    rho: float

    def __post_init__(self):
        _check_dims(self.n, self.p)
        _check_rho(self.rho)
        if int(self.k) != self.k or not 1 <= self.k <= self.p:
            raise ConfigurationError(f"cluster size k must be an integer in [1, p], got {self.k}")


def _check_dims(n, p):
    for name, v in (("n", n), ("p", p)):
        if int(v) != v or v < 1:
            raise ConfigurationError(f"{name} must be a positive integer, got {v!r}")


def _check_rho(rho):
    if not 0.0 <= rho < 1.0:
        raise ConfigurationError(f"rho must lie in [0, 1), got {rho!r}")


def _values(X):
    return X.values if isinstance(X, BinaryMatrix) else np.asarray(X)


def _chain(first, width, rho, rng):
    """Columns following ``first``: keep the previous value with prob. rho,
    otherwise draw 0 or 1 with prob. (1 - rho)/2 each."""
    n = first.shape[0]
    out = np.empty((n, width), dtype=np.uint8)
    out[:, 0] = first
    keep_to = rho
    zero_to = rho + (1.0 - rho) / 2.0
    for j in range(1, width):
        u = rng.random(n)
        col = np.where(u < keep_to, out[:, j - 1], np.where(u < zero_to, 0, 1))
        out[:, j] = col
    return out


def gen_serial(cfg: SerialConfig, seed) -> BinaryMatrix:
    """First-order serially correlated binary design.

    Adjacent columns have population correlation ``cfg.rho`` and lag-d
    columns ``cfg.rho ** d``; every column is marginally Bernoulli(0.5).
    """
    if not isinstance(cfg, SerialConfig):
        raise ConfigurationError("gen_serial expects a SerialConfig")
    rng = _seeding.rng(seed)
    first = (rng.random(cfg.n) < 0.5).astype(np.uint8)
    return BinaryMatrix(_chain(first, cfg.p, cfg.rho, rng))


def cluster_bounds(p, k):
    """Half-open column ranges of the clusters; the remainder joins the last one."""
    m = p // k
    starts = [c * k for c in range(m)]
    ends = starts[1:] + [p]
    return list(zip(starts, ends))


def gen_clustered(cfg: ClusterConfig, seed) -> BinaryMatrix:
    """Independent clusters of ``cfg.k`` serially chained columns."""
    if not isinstance(cfg, ClusterConfig):
        raise ConfigurationError("gen_clustered expects a ClusterConfig")
    rng = _seeding.rng(seed)
    blocks = []
    for start, end in cluster_bounds(cfg.p, cfg.k):
        first = (rng.random(cfg.n) < 0.5).astype(np.uint8)
        blocks.append(_chain(first, end - start, cfg.rho, rng))
    return BinaryMatrix(np.hstack(blocks))


def assign_causal(p, K, effect, seed) -> GroundTruth:
    """Choose ``K`` distinct causal columns uniformly at random, each with
    log-odds coefficient ``effect``. The intercept is left unset."""
    _check_dims(1, p)
    if int(K) != K or not 1 <= K <= p:
        raise ConfigurationError(f"need 1 <= K <= p, got K={K}, p={p}")
    rng = _seeding.rng(seed)
    idx = rng.choice(p, size=int(K), replace=False)
    return GroundTruth(tuple(sorted(int(j) for j in idx)), (float(effect),) * int(K))


def calibrate_intercept(X, truth: GroundTruth, tol=1e-6) -> float:
    """Intercept giving an average case probability of one half on ``X``.

    Plain bisection on the intercept; the mean fitted probability is
    strictly increasing in it, so the bracket below always holds a root.
    Iterates until the interval is below 1e-12 and the mean is within
    ``tol`` of 0.5.
    """
    X = _values(X)
    truth.check_against(X.shape[1])
    s = GroundTruth(truth.indices, truth.coefficients).linear_predictor(X)
    if not truth.indices or not np.any(s):
        return 0.0

    def excess(a):
        return expit(a + s).mean() - 0.5

    lo, hi = -s.max() - 1.0, -s.min() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = excess(mid)
        if f > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12 and abs(f) <= tol:
            break
    return 0.5 * (lo + hi)


def gen_response(X, truth: GroundTruth, seed) -> np.ndarray:
    """Independent Bernoulli responses from the logistic model of ``truth``."""
    if truth.intercept is None:
        raise ConfigurationError("truth.intercept is unset; call calibrate_intercept first")
    mu = expit(truth.linear_predictor(X))
    rng = _seeding.rng(seed)
    return (rng.random(mu.shape[0]) < mu).astype(np.uint8)


@dataclass
class Replicate:
    X: BinaryMatrix
    y: np.ndarray
    truth: GroundTruth
    seeds: dict = field(default_factory=dict)


def simulate_replicate(X, K, effect, seed) -> Replicate:
    """One causal assignment plus a response draw on an existing design.

    The assignment and the response use independent child streams of
    ``seed``.
    """
    X = X if isinstance(X, BinaryMatrix) else BinaryMatrix(X)
    truth = assign_causal(X.p, K, effect, _seeding.child(seed, 0))
    truth.intercept = calibrate_intercept(X, truth)
    y = gen_response(X, truth, _seeding.child(seed, 1))
    return Replicate(X, y, truth)
