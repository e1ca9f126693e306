"""Elastic-net penalized logistic regression on binary designs.

The objective is

    (1/n) * NLL(intercept, beta) + lam * alpha * ||beta||_1
                                 + lam * (1 - alpha) * ||beta||_2^2

with an unpenalized intercept. Note the ridge term carries no factor 1/2.
Columns are centred and scaled to unit variance before the solve purely for
conditioning; the penalty weights are rescaled so the minimizer is that of
the objective above on the original columns.

Columns that are exact copies of each other (up to sign, after
standardization) make the minimizer non-unique for the lasso. Such a group
is solved through its first column and expanded afterwards: with a ridge
term the weight is split evenly, which is the unique optimum; for the pure
lasso the whole weight stays on the first column, the sparsest optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logit

from ..errors import ConfigurationError, ConvergenceError, DegenerateResponseError
from ..simgen import BinaryMatrix
from . import _cd

MAX_SWEEPS = 10_000
MAX_OUTER = 200
TOL = 1e-7


@dataclass(frozen=True)
class PenaltySpec:
    lam: float
    alpha: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ConfigurationError(f"lambda must be finite and >= 0, got {self.lam}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1], got {self.alpha}")


@dataclass
class CoefficientVector:
    intercept: float
    betas: np.ndarray
    penalty: PenaltySpec
    n_sweeps: int = 0
    n_outer: int = 0
    objective_trace: np.ndarray = field(default=None, repr=False)

    @property
    def support(self):
        return np.flatnonzero(self.betas)

    def linear_predictor(self, X):
        return self.intercept + _as_float(X) @ self.betas


@dataclass
class PathResult:
    lambdas: np.ndarray
    alpha: float
    fits: list

    @property
    def betas(self):
        return np.vstack([f.betas for f in self.fits])

    @property
    def intercepts(self):
        return np.array([f.intercept for f in self.fits])

    @property
    def support_sizes(self):
        return np.array([np.count_nonzero(f.betas) for f in self.fits])

    @property
    def n_sweeps(self):
        return np.array([f.n_sweeps for f in self.fits])

    def __len__(self):
        return len(self.fits)

    def __iter__(self):
        return iter(zip(self.lambdas, self.fits))


def _as_float(X):
    if isinstance(X, BinaryMatrix):
        X = X.values
    return np.asarray(X, dtype=np.float64)


def check_response(y, n=None):
    y = np.asarray(y, dtype=np.float64).ravel()
    if n is not None and y.shape[0] != n:
        raise ConfigurationError(f"response has {y.shape[0]} entries, design has {n} rows")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ConfigurationError("response must be coded 0/1")
    if y.shape[0] < 2:
        raise DegenerateResponseError("need at least two observations")
    if y.min() == y.max():
        raise DegenerateResponseError("response contains a single class")
    return y


class Design:
    """Standardized copy of a design, reusable across penalties."""

    def __init__(self, X):
        X = _as_float(X)
        if X.ndim != 2:
            raise ConfigurationError("design must be 2-d")
        self.X = X
        self.n, self.p = X.shape
        self.mean = X.mean(axis=0)
        sd = X.std(axis=0)
        self.valid = sd > 1e-12 * np.maximum(1.0, np.abs(self.mean))
        self.sd = np.where(self.valid, sd, 1.0)
        Z = (X - self.mean) / self.sd
        Z[:, ~self.valid] = 0.0
        self.Z = np.asfortranarray(Z)
        self.rep, self.sign = _copy_groups(self.Z, self.valid)
        self.free = self.valid & (self.rep == np.arange(self.p))
        self.group_size = np.bincount(self.rep, minlength=self.p)

    @property
    def has_copies(self):
        return bool((self.free != self.valid).any())

    def weights(self, alpha):
        pen1 = np.where(self.valid, alpha / self.sd, 0.0)
        pen2 = np.where(self.valid, (1.0 - alpha) / self.sd**2, 0.0)
        return pen1, pen2

    def collapse(self, b):
        """Move each copy group's total weight onto its first column."""
        if not self.has_copies:
            return b
        out = np.zeros_like(b)
        np.add.at(out, self.rep, self.sign * b)
        return np.where(self.free, out, 0.0)

    def expand(self, b, alpha):
        """Inverse of :meth:`collapse` at the optimal split."""
        if not self.has_copies or alpha == 1.0:
            return b
        return np.where(self.valid, self.sign * b[self.rep] / self.group_size[self.rep], 0.0)

    def to_internal(self, intercept, betas):
        b = np.where(self.valid, betas * self.sd, 0.0)
        return intercept + float(betas @ self.mean), b

    def to_original(self, b0, b):
        betas = np.where(self.valid, b / self.sd, 0.0)
        return b0 - float(betas @ self.mean), betas

    def lambda_max(self, y, alpha):
        g = np.abs(self.Z.T @ (y - y.mean())) * self.sd / self.n
        g[~self.valid] = 0.0
        return float(g.max()) / alpha if self.p else 0.0


def _copy_groups(Z, valid):
    """Representative column and sign for every column; exact copies (up to
    sign) of an earlier column point at it."""
    p = Z.shape[1]
    rep = np.arange(p)
    sign = np.ones(p)
    seen = {}
    for j in np.flatnonzero(valid):
        col = Z[:, j]
        s = 1.0 if col[np.flatnonzero(col)[0]] > 0 else -1.0
        key = np.round(s * col, 9).tobytes()
        hit = seen.get(key)
        if hit is not None and np.allclose(s * col, hit[1] * Z[:, hit[0]], rtol=0, atol=1e-10):
            rep[j] = hit[0]
            sign[j] = s * hit[1]
        else:
            seen[key] = (j, s)
    return rep, sign


def lambda_max(X, y, alpha=1.0):
    """Smallest penalty at which every coefficient is zero."""
    design = X if isinstance(X, Design) else Design(X)
    y = check_response(y, design.n)
    return design.lambda_max(y, alpha)


def _null_fit(design, y, pen):
    return CoefficientVector(float(logit(y.mean())), np.zeros(design.p), pen)


def _internal_gradient(design, y, b0, b):
    eta = b0 + design.Z @ b
    return design.Z.T @ (y - expit(eta)) / design.n


def _solve(design, y, pen, start=None, *, prev_lam=None, tol=TOL, max_sweeps=MAX_SWEEPS,
           max_outer=MAX_OUTER, trace=False):
    if start is None:
        b0, b = float(logit(y.mean())), np.zeros(design.p)
    else:
        b0, b = design.to_internal(start.intercept, np.asarray(start.betas, dtype=np.float64))
    b = np.ascontiguousarray(design.collapse(b), dtype=np.float64)
    pen1, pen2 = design.weights(pen.alpha)
    pen2 = pen2 / design.group_size.clip(1)
    lam = float(pen.lam)

    # sequential strong rule: columns unlikely to enter are left out of the
    # sweeps and re-admitted if they violate the optimality check afterwards
    if prev_lam is None:
        prev_lam = design.lambda_max(y, pen.alpha) if start is None else lam
    g = _internal_gradient(design, y, b0, b)
    work = design.free & ((np.abs(g) >= pen1 * (2 * lam - prev_lam)) | (b != 0))

    history = np.empty(max_outer + 1 if trace else 0)
    total_sweeps = total_outer = 0
    trace_parts = []
    while True:
        b0, status, n_outer, n_sweeps, n_hist = _cd.solve(
            design.Z, y, lam, pen1, pen2, work, float(b0), b,
            max_outer, max_sweeps - total_sweeps, tol, history,
        )
        total_sweeps += n_sweeps
        total_outer += n_outer
        if trace:
            trace_parts.append(history[:n_hist].copy())
        if status != _cd.OK:
            break
        g = _internal_gradient(design, y, b0, b)
        violators = design.free & ~work & (np.abs(g) > lam * pen1 + 0.1 * tol)
        if not violators.any():
            break
        work = work | violators

    intercept, betas = design.to_original(b0, design.expand(b, pen.alpha))
    fit = CoefficientVector(
        intercept, betas, pen, n_sweeps=total_sweeps, n_outer=total_outer,
        objective_trace=np.concatenate(trace_parts) if trace else None,
    )
    if status != _cd.OK:
        raise ConvergenceError(
            f"no convergence at lambda={pen.lam:.4g} after {n_sweeps} sweeps / {n_outer} Newton steps",
            last_iterate=fit,
        )
    return fit


def fit_penalized(X, y, pen: PenaltySpec, *, start=None, tol=TOL, max_sweeps=MAX_SWEEPS,
                  trace=False) -> CoefficientVector:
    """Minimize the penalized logistic objective at a single penalty.

    Parameters
    ----------
    X : BinaryMatrix or array of shape (n, p)
    y : array of 0/1, length n
    pen : PenaltySpec
    start : CoefficientVector, optional
        Warm start.
    trace : bool
        Record the penalized objective after each Newton step in
        ``objective_trace``.

    Raises
    ------
    DegenerateResponseError
        If ``y`` has a single class.
    ConvergenceError
        If the sweep budget is exhausted; ``last_iterate`` holds the fit.
    """
    design = X if isinstance(X, Design) else Design(X)
    y = check_response(y, design.n)
    if not isinstance(pen, PenaltySpec):
        raise ConfigurationError("pen must be a PenaltySpec")
    if pen.lam > 0 and pen.lam >= design.lambda_max(y, pen.alpha):
        return _null_fit(design, y, pen)
    return _solve(design, y, pen, start, tol=tol, max_sweeps=max_sweeps, trace=trace)


def default_min_ratio(n, p):
    return 1e-2 if n < p else 1e-3


def lambda_grid(lam_max, n_lambda, lambda_min_ratio):
    if n_lambda < 1:
        raise ConfigurationError("n_lambda must be >= 1")
    if not 0 < lambda_min_ratio < 1:
        raise ConfigurationError("lambda_min_ratio must lie in (0, 1)")
    if lam_max <= 0:
        raise DegenerateResponseError("no column is associated with the response at all (lambda_max = 0)")
    return lam_max * np.geomspace(1.0, lambda_min_ratio, n_lambda)


def path(X, y, alpha=1.0, n_lambda=100, lambda_min_ratio=None, *, lambdas=None, tol=TOL) -> PathResult:
    """Warm-started solutions on a decreasing geometric penalty grid.

    The grid runs from the smallest all-zero penalty down to
    ``lambda_max * lambda_min_ratio``. Pass ``lambdas`` to use a fixed grid
    instead (it is sorted into decreasing order).
    """
    design = X if isinstance(X, Design) else Design(X)
    y = check_response(y, design.n)
    PenaltySpec(0.0, alpha)
    if lambdas is None:
        if lambda_min_ratio is None:
            lambda_min_ratio = default_min_ratio(design.n, design.p)
        lambdas = lambda_grid(design.lambda_max(y, alpha), n_lambda, lambda_min_ratio)
    else:
        lambdas = np.sort(np.asarray(lambdas, dtype=np.float64))[::-1]
        if np.any(np.diff(lambdas) >= 0):
            raise ConfigurationError("lambdas must be distinct")
    walker = PathWalker(design, y, alpha, tol=tol)
    fits = [walker.step(lam) for lam in lambdas]
    return PathResult(np.asarray(lambdas), alpha, fits)


class PathWalker:
    """Incremental warm-started path: call :meth:`step` with decreasing
    penalties. Lets several paths advance in lockstep."""

    def __init__(self, design, y, alpha, tol=TOL):
        self.design = design
        self.y = y
        self.alpha = alpha
        self.tol = tol
        self.lam_max = design.lambda_max(y, alpha)
        self.prev = None
        self.prev_lam = self.lam_max

    def step(self, lam):
        pen = PenaltySpec(float(lam), self.alpha)
        if lam >= self.lam_max:
            fit = _null_fit(self.design, self.y, pen)
        else:
            fit = _solve(self.design, self.y, pen, self.prev, prev_lam=min(self.prev_lam, self.lam_max),
                         tol=self.tol)
        self.prev = fit
        self.prev_lam = float(lam)
        return fit


def penalized_objective(X, y, fit: CoefficientVector, pen: PenaltySpec = None):
    """Value of the penalized objective at ``fit`` (on the original columns)."""
    pen = fit.penalty if pen is None else pen
    X = _as_float(X)
    y = np.asarray(y, dtype=np.float64)
    eta = fit.intercept + X @ fit.betas
    nll = np.mean(np.logaddexp(0.0, eta) - y * eta)
    b = np.asarray(fit.betas)
    return float(nll + pen.lam * pen.alpha * np.abs(b).sum() + pen.lam * (1 - pen.alpha) * (b**2).sum())


def kkt_residual(X, y, fit: CoefficientVector, pen: PenaltySpec = None) -> float:
    """Largest violation of the optimality conditions at ``fit``.

    For zero coefficients this is the excess of |grad_j| over lam*alpha;
    for nonzero ones the absolute stationarity error; the intercept
    contributes |mean(y - mu)|.
    """
    pen = fit.penalty if pen is None else pen
    X = _as_float(X)
    y = np.asarray(y, dtype=np.float64)
    b = np.asarray(fit.betas)
    res = y - expit(fit.intercept + X @ b)
    g = X.T @ res / len(y)
    l1 = pen.lam * pen.alpha
    nz = b != 0
    viol = np.zeros_like(g)
    viol[nz] = np.abs(g[nz] - 2 * pen.lam * (1 - pen.alpha) * b[nz] - l1 * np.sign(b[nz]))
    viol[~nz] = np.maximum(np.abs(g[~nz]) - l1, 0.0)
    return float(max(abs(res.mean()), viol.max(initial=0.0)))
