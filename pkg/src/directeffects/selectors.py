"""Variable selection methods mapping (X, y) to a set of declared finds.

All methods take the same inputs and return a :class:`SelectionResult`.
Randomness (fold assignment, data splits, subsamples) is drawn from child
streams of ``seed``; for a fixed seed, the lasso, stability selection and
direct effect testing share one cross-validation run, which callers may
compute once and pass as ``cv=``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _seeding
from .errors import ConfigurationError, DegenerateResponseError
from .penreg import (
    Design,
    PenaltySpec,
    cv_select,
    fisher_exact,
    fit_penalized,
    fit_wald,
    logistic_mle,
)
from .penreg.solver import _as_float, check_response
from .penreg.wald import independent_columns

__all__ = [
    "SelectionResult",
    "CvSettings",
    "StabilityConfig",
    "DetConfig",
    "select_lasso",
    "select_enet",
    "select_screen_clean",
    "select_stability",
    "select_det",
    "select_fisher",
    "METHODS",
    "run_method",
]

# child-stream keys under the method seed
_CV, _SPLIT, _SUBSAMPLE, _SUBSAMPLE_CV = 0, 1, 2, 3


@dataclass
class SelectionResult:
    method: str
    selected: tuple
    scores: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.selected = tuple(sorted(int(j) for j in set(self.selected)))

    def __contains__(self, j):
        return j in self.selected

    def __len__(self):
        return len(self.selected)


@dataclass(frozen=True)
class CvSettings:
    """How the penalty is cross-validated inside every selector."""

    folds: int = 10
    n_lambda: int = 50
    lambda_min_ratio: float | None = None
    rule: str = "min"
    early_stop: bool = True

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigurationError("folds must be >= 2")
        if self.rule not in ("min", "1se"):
            raise ConfigurationError(f"unknown CV rule {self.rule!r}")

    def run(self, X, y, alpha, seed):
        return cv_select(X, y, alpha, self.folds, seed, n_lambda=self.n_lambda,
                         lambda_min_ratio=self.lambda_min_ratio, rule=self.rule,
                         early_stop=self.early_stop)


@dataclass(frozen=True)
class StabilityConfig:
    B: int = 100
    pi_thr: float = 0.75
    per_subsample_cv: bool = False

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 1:
            raise ConfigurationError("B must be a positive integer")
        if not 0.0 < self.pi_thr < 1.0:
            raise ConfigurationError("pi_thr must lie in (0, 1)")


@dataclass(frozen=True)
class DetConfig:
    corr_threshold: float = 0.75
    ratio: float = 0.1
    bonferroni_level: float = 0.05

    def __post_init__(self):
        for name in ("corr_threshold", "ratio", "bonferroni_level"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v}")


def _inputs(X, y):
    Xf = _as_float(X)
    y = check_response(y, Xf.shape[0])
    return Xf, y


def lasso_cv(X, y, seed, settings=CvSettings()):
    """The cross-validation run shared by lasso, stability selection and DET."""
    return settings.run(X, y, 1.0, _seeding.child(seed, _CV))


def select_lasso(X, y, seed, *, cv=None, settings=CvSettings()) -> SelectionResult:
    """Predictors with nonzero coefficient at the cross-validated penalty."""
    return select_enet(X, y, 1.0, seed, cv=cv, settings=settings, method="lasso")


def select_enet(X, y, alpha=0.5, seed=None, *, cv=None, settings=CvSettings(), method="enet") -> SelectionResult:
    """Elastic net with mixing weight ``alpha`` at the cross-validated penalty."""
    Xf, y = _inputs(X, y)
    if cv is None:
        cv = settings.run(Xf, y, alpha, _seeding.child(seed, _CV))
    elif cv.path.alpha != alpha:
        raise ConfigurationError("supplied CV result was computed for a different alpha")
    sel = cv.fit.support
    return SelectionResult(
        method,
        sel,
        scores={int(j): float(cv.fit.betas[j]) for j in sel},
        diagnostics={"lambda": cv.lam, "alpha": alpha},
    )


def _split_halves(y, rng, attempts=100):
    n = len(y)
    for _ in range(attempts):
        perm = rng.permutation(n)
        a, b = np.sort(perm[: n // 2]), np.sort(perm[n // 2:])
        if np.ptp(y[a]) and np.ptp(y[b]):
            return a, b
    raise DegenerateResponseError("cannot split the data into halves holding both classes")


def select_screen_clean(X, y, seed, *, level=0.05, family="logistic", settings=CvSettings()) -> SelectionResult:
    """Lasso screening on one random half, unpenalized testing on the other.

    Significance in the clean stage is Bonferroni-corrected over the size of
    the screened set.
    """
    Xf, y = _inputs(X, y)
    if len(y) < 4:
        raise ConfigurationError("screen and clean needs n >= 4")
    screen_rows, clean_rows = _split_halves(y, _seeding.rng(_seeding.child(seed, _SPLIT)))
    cv = settings.run(Xf[screen_rows], y[screen_rows], 1.0, _seeding.child(seed, _CV))
    screened = cv.fit.support
    diag = {"screened": tuple(int(j) for j in screened), "lambda": cv.lam}
    if len(screened) == 0:
        diag["empty_screen"] = True
        return SelectionResult("screen_clean", (), {}, diag)
    limit = int(np.ceil(len(clean_rows) / 2)) - 1
    if len(screened) > limit:
        keep = np.argsort(-np.abs(cv.fit.betas[screened]), kind="stable")[:limit]
        screened = np.sort(screened[keep])
        diag["truncated_to"] = limit
    wald = fit_wald(Xf[clean_rows], y[clean_rows], screened, family=family)
    cutoff = level / len(screened)
    pv = wald.pvalue_map()
    diag["dropped"] = wald.dropped
    diag["unstable"] = wald.unstable
    return SelectionResult("screen_clean", [j for j, p in pv.items() if p < cutoff], pv, diag)


def _subsample(y, m, rng, attempts=100):
    for _ in range(attempts):
        rows = np.sort(rng.choice(len(y), size=m, replace=False))
        if np.ptp(y[rows]):
            return rows
    raise DegenerateResponseError("subsamples keep coming out single-class")


def stability_counts(X, y, lam, cfg: StabilityConfig, seed, settings=CvSettings(), start=None):
    """Nonzero counts over ``cfg.B`` half-size subsamples.

    Subsample ``b`` is drawn from its own child stream of ``seed``, so the
    counts do not depend on the order in which subsamples are fitted.
    """
    Xf, y = _inputs(X, y)
    n, p = Xf.shape
    m = n // 2
    counts = np.zeros(p, dtype=np.int64)
    for b in range(cfg.B):
        rows = _subsample(y, m, _seeding.rng(_seeding.child(seed, _SUBSAMPLE, b)))
        Xb, yb = Xf[rows], y[rows]
        if cfg.per_subsample_cv:
            fit = settings.run(Xb, yb, 1.0, _seeding.child(seed, _SUBSAMPLE_CV, b)).fit
        else:
            fit = fit_penalized(Design(Xb), yb, PenaltySpec(lam, 1.0), start=start)
        counts[fit.betas != 0] += 1
    return counts


def select_stability(X, y, cfg: StabilityConfig = StabilityConfig(), seed=None, *, cv=None,
                     settings=CvSettings()) -> SelectionResult:
    """Stability selection with the lasso as the base selector.

    By default the penalty is cross-validated once on the full data and
    reused on every subsample; ``cfg.per_subsample_cv`` cross-validates
    inside each subsample instead.
    """
    Xf, y = _inputs(X, y)
    if len(y) < 4:
        raise ConfigurationError("stability selection needs n >= 4")
    lam, start = None, None
    if not cfg.per_subsample_cv:
        if cv is None:
            cv = lasso_cv(Xf, y, seed, settings)
        lam, start = cv.lam, cv.fit
    counts = stability_counts(Xf, y, lam, cfg, seed, settings, start=start)
    pi = counts / cfg.B
    return SelectionResult(
        "stability",
        np.flatnonzero(pi > cfg.pi_thr),
        scores={j: float(v) for j, v in enumerate(pi)},
        diagnostics={"lambda": lam, "B": cfg.B, "pi_thr": cfg.pi_thr},
    )


def _abs_corr_with(Xf, k):
    Z = Xf - Xf.mean(axis=0)
    norms = np.sqrt((Z**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        c = (Z.T @ Z[:, k]) / (norms * norms[k])
    return np.nan_to_num(np.abs(c), nan=0.0)


def _loglik(Xf, y, cols):
    kept, _ = independent_columns(Xf, sorted(cols))
    X1 = np.column_stack([np.ones(len(y))] + [Xf[:, j] for j in kept])
    return logistic_mle(X1, y)[1]


def origin_probabilities(Xf, y, k, others, candidates):
    """Relative likelihood of each candidate being the origin of the effect
    detected on column ``k``.

    Each candidate replaces ``k`` in the unpenalized model that also holds
    the other detected effects; probabilities are proportional to the
    exponentiated maximized log-likelihoods.
    """
    ll = np.array([_loglik(Xf, y, set(others) | {j}) for j in candidates])
    w = np.exp(ll - ll.max())
    return dict(zip((int(j) for j in candidates), w / w.sum()))


def select_det(X, y, cfg: DetConfig = DetConfig(), seed=None, *, cv=None, settings=CvSettings()) -> SelectionResult:
    """Direct effect testing.

    Stage one tests the cross-validated lasso support with unpenalized Wald
    tests at a Bonferroni level over all p predictors. Stage two spreads each
    detected effect over its highly correlated neighbours by relative
    likelihood and keeps every candidate whose origin probability is at
    least ``cfg.ratio`` times the best one, plus the detected column.
    """
    Xf, y = _inputs(X, y)
    n, p = Xf.shape
    if cv is None:
        cv = lasso_cv(Xf, y, seed, settings)
    support = cv.fit.support
    diag = {"lambda": cv.lam, "support": tuple(int(j) for j in support)}
    if len(support) == 0:
        diag["stage_one"] = ()
        return SelectionResult("det", (), {}, diag)
    limit = int(np.ceil(n / 2)) - 1
    if len(support) > limit:
        keep = np.argsort(-np.abs(cv.fit.betas[support]), kind="stable")[:limit]
        support = np.sort(support[keep])
    wald = fit_wald(Xf, y, support)
    cutoff = cfg.bonferroni_level / p
    detected = sorted(j for j, pv in wald.pvalue_map().items() if pv < cutoff)
    diag["stage_one"] = tuple(detected)
    diag["stage_one_pvalues"] = wald.pvalue_map()
    if not detected:
        return SelectionResult("det", (), {}, diag)

    selected, scores, candidate_sets = set(), {}, {}
    for k in detected:
        corr = _abs_corr_with(Xf, k)
        cand = sorted(set(np.flatnonzero(corr >= cfg.corr_threshold).tolist()) | {k})
        candidate_sets[k] = tuple(cand)
        others = [j for j in detected if j != k]
        if len(cand) == 1:
            probs = {k: 1.0}
        else:
            probs = origin_probabilities(Xf, y, k, others, cand)
        pmax = max(probs.values())
        for j, pr in probs.items():
            # the detected column itself always stays in
            if pr >= cfg.ratio * pmax or j == k:
                selected.add(j)
                scores[j] = max(scores.get(j, 0.0), pr)
    diag["candidates"] = candidate_sets
    return SelectionResult("det", selected, scores, diag)


def select_fisher(X, y, level=0.05) -> SelectionResult:
    """Per-column Fisher exact tests with a Bonferroni cut at ``level / p``."""
    Xf = _as_float(X)
    y = np.asarray(y)
    p = Xf.shape[1]
    pv = np.array([fisher_exact(Xf[:, j], y) for j in range(p)])
    return SelectionResult(
        "fisher",
        np.flatnonzero(pv < level / p),
        scores={j: float(v) for j, v in enumerate(pv)},
        diagnostics={"cutoff": level / p},
    )


METHODS = ("lasso", "enet", "screen_clean", "stability", "det", "fisher")


def run_method(name, X, y, seed, options=None, cache=None):
    """Dispatch by method name; ``options`` holds that method's settings.

    ``cache`` (a dict) lets the methods that share the full-data lasso CV
    reuse one run for the same (X, y, seed).
    """
    options = dict(options or {})
    settings = options.pop("cv", CvSettings())
    cache = {} if cache is None else cache

    def shared_cv():
        if "lasso_cv" not in cache:
            cache["lasso_cv"] = lasso_cv(X, y, seed, settings)
        return cache["lasso_cv"]

    if name == "lasso":
        return select_lasso(X, y, seed, cv=shared_cv(), settings=settings)
    if name == "enet":
        alpha = options.get("alpha", 0.5)
        res = select_enet(X, y, alpha, seed, cv=shared_cv() if alpha == 1.0 else None, settings=settings)
        return res
    if name == "screen_clean":
        return select_screen_clean(X, y, seed, level=options.get("level", 0.05),
                                   family=options.get("family", "logistic"), settings=settings)
    if name == "stability":
        cfg = options.get("config", StabilityConfig())
        cv = None if cfg.per_subsample_cv else shared_cv()
        return select_stability(X, y, cfg, seed, cv=cv, settings=settings)
    if name == "det":
        return select_det(X, y, options.get("config", DetConfig()), seed, cv=shared_cv(), settings=settings)
    if name == "fisher":
        return select_fisher(X, y, level=options.get("level", 0.05))
    raise ConfigurationError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
