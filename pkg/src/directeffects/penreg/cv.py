"""K-fold cross-validation of the penalty on binomial deviance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .. import _seeding
from ..errors import ConfigurationError, DegenerateResponseError
from .solver import CoefficientVector, Design, PathResult, PathWalker, check_response, default_min_ratio, lambda_grid

N_LAMBDA = 50
PATIENCE = 10
MAX_FOLD_ATTEMPTS = 100
PROB_CLIP = 1e-5


@dataclass
class CvResult:
    lam: float
    lambdas: np.ndarray
    cv_mean: np.ndarray
    cv_se: np.ndarray
    folds: int
    foldid: np.ndarray
    rule: str
    fit: CoefficientVector
    path: PathResult

    @property
    def index(self):
        return int(np.flatnonzero(self.lambdas == self.lam)[0])


def stratified_folds(y, folds, seed):
    """Fold labels 0..folds-1, balanced within each class.

    Redraws (up to 100 times) until every training split keeps both
    classes and every fold holds at least one observation.
    """
    y = np.asarray(y)
    if folds < 2:
        raise ConfigurationError("need at least 2 folds")
    if folds > len(y):
        raise DegenerateResponseError(f"{folds} folds for {len(y)} observations")
    rng = _seeding.rng(seed)
    classes = [np.flatnonzero(y == c) for c in (0, 1)]
    for _ in range(MAX_FOLD_ATTEMPTS):
        foldid = np.empty(len(y), dtype=np.int64)
        offset = int(rng.integers(folds))
        for idx in classes:
            perm = rng.permutation(idx)
            foldid[perm] = (np.arange(len(perm)) + offset) % folds
            offset = (offset + len(perm)) % folds
        ok = True
        for f in range(folds):
            train = y[foldid != f]
            if (foldid == f).sum() == 0 or train.min() == train.max():
                ok = False
                break
        if ok:
            return foldid
    raise DegenerateResponseError("could not build folds with both classes in every training split")


def binomial_deviance(y, eta):
    mu = np.clip(expit(eta), PROB_CLIP, 1 - PROB_CLIP)
    return -2.0 * (y * np.log(mu) + (1 - y) * np.log1p(-mu))


def cv_select(X, y, alpha=1.0, folds=10, seed=None, *, n_lambda=N_LAMBDA, lambda_min_ratio=None,
              rule="min", foldid=None, early_stop=True, patience=PATIENCE) -> CvResult:
    """Choose the penalty by stratified K-fold cross-validation.

    Every fold is fitted along the full-data penalty grid; the validation
    loss is mean binomial deviance. ``rule="min"`` takes the minimizing
    penalty, ``rule="1se"`` the largest penalty within one standard error
    of that minimum. The returned ``fit`` is the full-data solution at the
    chosen penalty.

    With ``early_stop`` the grid walk ends once the validation curve has
    sat above its running minimum for ``patience`` consecutive penalties
    and the current point exceeds that minimum by more than one standard
    error; ``lambdas`` then holds only the penalties actually evaluated.
    """
    design = X if isinstance(X, Design) else Design(X)
    y = check_response(y, design.n)
    if rule not in ("min", "1se"):
        raise ConfigurationError(f"unknown rule {rule!r}")
    if foldid is None:
        foldid = stratified_folds(y, folds, seed)
    else:
        foldid = np.asarray(foldid, dtype=np.int64)
        if foldid.shape != y.shape:
            raise ConfigurationError("foldid must match y in length")
        folds = int(foldid.max()) + 1
    if lambda_min_ratio is None:
        lambda_min_ratio = default_min_ratio(design.n, design.p)

    lambdas = lambda_grid(design.lambda_max(y, alpha), n_lambda, lambda_min_ratio)
    full = PathWalker(design, y, alpha)
    walkers, tests = [], []
    for f in range(folds):
        test = foldid == f
        ytr = y[~test]
        if ytr.min() == ytr.max():
            raise DegenerateResponseError(f"training split {f} has a single class")
        walkers.append(PathWalker(Design(design.X[~test]), ytr, alpha))
        tests.append((design.X[test], y[test]))
    sizes = np.array([len(yt) for _, yt in tests], dtype=float)
    w = sizes / sizes.sum()

    fits, rows = [], []
    for i, lam in enumerate(lambdas):
        fits.append(full.step(lam))
        row = np.empty(folds)
        for f, (walker, (Xte, yte)) in enumerate(zip(walkers, tests)):
            fit = walker.step(lam)
            row[f] = binomial_deviance(yte, fit.intercept + Xte @ fit.betas).mean()
        rows.append(row)
        if early_stop and i >= patience:
            losses = np.array(rows)
            cv_mean = losses @ w
            best = int(np.argmin(cv_mean))
            se_best = np.sqrt(w @ (losses[best] - cv_mean[best]) ** 2 / (folds - 1))
            if i - best >= patience and cv_mean[i] > cv_mean[best] + se_best:
                break

    losses = np.array(rows)
    lambdas = lambdas[: len(rows)]
    cv_mean = losses @ w
    cv_se = np.sqrt(((losses - cv_mean[:, None]) ** 2) @ w / (folds - 1))
    best = int(np.argmin(cv_mean))
    if rule == "1se":
        within = np.flatnonzero(cv_mean <= cv_mean[best] + cv_se[best])
        best = int(within.min())
    full = PathResult(lambdas, alpha, fits)
    return CvResult(float(lambdas[best]), lambdas, cv_mean, cv_se, folds, foldid, rule, fits[best], full)
