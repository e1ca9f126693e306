import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import logit

from oracles import grid_objective_min, newton_logistic
from directeffects.errors import ConfigurationError, ConvergenceError, DegenerateResponseError
from directeffects.penreg import (
    PenaltySpec,
    fit_penalized,
    kkt_residual,
    lambda_max,
    path,
    penalized_objective,
)
from directeffects.penreg.solver import lambda_grid
from directeffects.simgen import SerialConfig, gen_serial


def _data(n=300, p=20, rho=0.5, seed=0, effects=((3, 1.0),)):
    X = gen_serial(SerialConfig(n, p, rho), seed).values
    rng = np.random.default_rng(seed + 1000)
    eta = sum(b * X[:, j] for j, b in effects) - 0.5
    y = (rng.random(n) < 1 / (1 + np.exp(-eta))).astype(np.uint8)
    return X, y


@pytest.mark.parametrize("args", [(-1.0, 1.0), (1.0, 0.0), (1.0, 1.5), (np.nan, 1.0)])
def test_penalty_spec_validation(args):
    with pytest.raises(ConfigurationError):
        PenaltySpec(*args)


def test_degenerate_response():
    X = np.ones((5, 2))
    with pytest.raises(DegenerateResponseError):
        fit_penalized(X, np.zeros(5), PenaltySpec(0.1))
    with pytest.raises(DegenerateResponseError):
        fit_penalized(X[:1], np.array([1]), PenaltySpec(0.1))


@pytest.mark.parametrize("alpha", [1.0, 0.5, 0.1])
def test_above_lambda_max_is_null_fit(alpha):
    X, y = _data()
    lm = lambda_max(X, y, alpha)
    for lam in (lm, 2 * lm):
        fit = fit_penalized(X, y, PenaltySpec(lam, alpha))
        assert not fit.betas.any()
        assert fit.intercept == pytest.approx(logit(y.mean()), abs=1e-12)
    just_below = fit_penalized(X, y, PenaltySpec(0.99 * lm, alpha))
    assert just_below.betas.any()


def test_lambda_max_formula():
    X, y = _data()
    Xc = X - X.mean(0)
    expect = np.abs(Xc.T @ (y - y.mean())).max() / (len(y) * 0.5)
    assert lambda_max(X, y, 0.5) == pytest.approx(expect, rel=1e-12)


def test_unpenalized_single_predictor_matches_newton():
    # balanced 2x2 association
    x = np.repeat([0, 1], 100)
    y = np.concatenate([np.repeat([0, 1], [70, 30]), np.repeat([0, 1], [30, 70])])
    fit = fit_penalized(x[:, None], y, PenaltySpec(0.0), tol=1e-10)
    th, _ = newton_logistic(np.column_stack([np.ones(200), x]), y)
    assert fit.intercept == pytest.approx(th[0], abs=1e-6)
    assert fit.betas[0] == pytest.approx(th[1], abs=1e-6)
    assert th[1] == pytest.approx(2 * np.log(7 / 3), abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_two_predictors_match_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, (200, 2))
    X[:, 1] = np.where(rng.random(200) < 0.5, X[:, 0], X[:, 1])
    y = (rng.random(200) < 1 / (1 + np.exp(-(1.2 * X[:, 0] - 0.6)))).astype(int)
    alpha = [1.0, 0.5, 0.2][seed % 3]
    lam = rng.uniform(0.05, 0.6) * lambda_max(X, y, alpha)
    fit = fit_penalized(X, y, PenaltySpec(lam, alpha))
    ref, _ = grid_objective_min(X, y, lam, alpha)
    assert abs(penalized_objective(X, y, fit) - ref) < 1e-5
    assert penalized_objective(X, y, fit) <= ref + 1e-9
    assert kkt_residual(X, y, fit) <= 1e-6


@given(seed=st.integers(0, 10**6), alpha=st.sampled_from([1.0, 0.75, 0.5, 0.1]),
       frac=st.floats(0.02, 0.95), rho=st.sampled_from([0.0, 0.5, 0.9, 0.99]))
def test_kkt_on_random_instances(seed, alpha, frac, rho):
    X, y = _data(n=150, p=12, rho=rho, seed=seed % 1000)
    lam = frac * lambda_max(X, y, alpha)
    fit = fit_penalized(X, y, PenaltySpec(lam, alpha))
    assert np.all(np.isfinite(fit.betas)) and np.isfinite(fit.intercept)
    assert kkt_residual(X, y, fit) <= 1e-6


def test_duplicate_columns_are_handled():
    X, y = _data(p=6)
    Xd = np.column_stack([X, X[:, 3]])
    fit = fit_penalized(Xd, y, PenaltySpec(0.2 * lambda_max(Xd, y, 0.5), 0.5))
    assert kkt_residual(Xd, y, fit) <= 1e-6
    # ridge part splits the weight evenly between identical columns
    assert fit.betas[3] == pytest.approx(fit.betas[6], abs=1e-5)


def test_lasso_keeps_one_of_identical_columns():
    X, y = _data(p=6)
    Xd = np.column_stack([X, X[:, 3], 1 - X[:, 3]])
    for frac in (0.5, 0.2, 0.05):
        fit = fit_penalized(Xd, y, PenaltySpec(frac * lambda_max(Xd, y)))
        assert kkt_residual(Xd, y, fit) <= 1e-6
        assert fit.betas[6] == 0 and fit.betas[7] == 0
    # a complemented copy takes the opposite sign under the even split
    fit = fit_penalized(Xd, y, PenaltySpec(0.2 * lambda_max(Xd, y, 0.5), 0.5))
    assert fit.betas[7] == pytest.approx(-fit.betas[3], abs=1e-8)
    assert fit.betas[6] == pytest.approx(fit.betas[3], abs=1e-8)


def test_even_split_beats_lumping_on_one_copy():
    # same linear predictor, so only the ridge term differs
    X, y = _data(p=6)
    Xd = np.column_stack([X, X[:, 3]])
    lam = 0.3 * lambda_max(Xd, y, 0.5)
    fd = fit_penalized(Xd, y, PenaltySpec(lam, 0.5))
    assert penalized_objective(Xd, y, fd) <= penalized_objective(
        Xd, y, type(fd)(fd.intercept, np.r_[fd.betas[:3], fd.betas[3] + fd.betas[6], fd.betas[4:6], 0.0], fd.penalty)
    ) + 1e-12


def test_constant_column_stays_zero():
    X, y = _data(p=5)
    X = np.column_stack([X, np.ones(len(y))])
    fit = fit_penalized(X, y, PenaltySpec(0.05 * lambda_max(X, y)))
    assert fit.betas[-1] == 0.0
    assert kkt_residual(X, y, fit) <= 1e-6


def test_objective_trace_is_monotone():
    X, y = _data(n=400, p=40, rho=0.95, seed=3)
    fit = fit_penalized(X, y, PenaltySpec(0.05 * lambda_max(X, y)), trace=True)
    tr = np.asarray(fit.objective_trace)
    assert len(tr) >= 1
    assert np.all(np.diff(tr) <= 1e-12 * np.maximum(1, np.abs(tr[:-1])))


def test_warm_start_reaches_same_solution():
    X, y = _data(n=300, p=30, seed=4)
    pen = PenaltySpec(0.1 * lambda_max(X, y), 1.0)
    cold = fit_penalized(X, y, pen)
    start = fit_penalized(X, y, PenaltySpec(0.3 * lambda_max(X, y)))
    warm = fit_penalized(X, y, pen, start=start)
    assert np.allclose(cold.betas, warm.betas, atol=1e-5)


def test_convergence_error_carries_last_iterate():
    X, y = _data(n=300, p=30, rho=0.9, seed=5)
    with pytest.raises(ConvergenceError) as info:
        fit_penalized(X, y, PenaltySpec(0.01 * lambda_max(X, y)), max_sweeps=1)
    assert info.value.last_iterate is not None


def test_column_permutation_equivariance():
    X, y = _data(n=300, p=15, seed=6)
    perm = np.random.default_rng(0).permutation(15)
    pen = PenaltySpec(0.1 * lambda_max(X, y), 0.5)
    a = fit_penalized(X, y, pen, tol=1e-10)
    b = fit_penalized(X[:, perm], y, pen, tol=1e-10)
    assert np.allclose(a.betas[perm], b.betas, atol=1e-6)


def test_label_flip_symmetry():
    X, y = _data(n=300, p=10, seed=7)
    pen = PenaltySpec(0.1 * lambda_max(X, y), 1.0)
    a = fit_penalized(X, y, pen, tol=1e-10)
    b = fit_penalized(X, 1 - y, pen, tol=1e-10)
    assert np.allclose(a.betas, -b.betas, atol=1e-6)
    assert a.intercept == pytest.approx(-b.intercept, abs=1e-6)


# --- path ------------------------------------------------------------------

def test_lambda_grid_geometric():
    g = lambda_grid(2.0, 5, 1e-2)
    assert g[0] == 2.0 and g[-1] == pytest.approx(0.02)
    assert np.allclose(g[1:] / g[:-1], g[1] / g[0])
    with pytest.raises(DegenerateResponseError):
        lambda_grid(0.0, 5, 1e-2)


def test_path_contract():
    X, y = _data(n=300, p=25, seed=8)
    res = path(X, y, alpha=1.0, n_lambda=30, lambda_min_ratio=0.01)
    assert len(res) == 30
    assert np.all(np.diff(res.lambdas) < 0)
    assert res.lambdas[0] >= lambda_max(X, y)
    assert res.support_sizes[0] == 0
    for fit in res.fits:
        assert kkt_residual(X, y, fit) <= 1e-6


def test_path_of_two_equals_independent_fits():
    X, y = _data(n=300, p=25, seed=9)
    res = path(X, y, alpha=0.5, n_lambda=2, lambda_min_ratio=0.05)
    for lam, fit in zip(res.lambdas, res.fits):
        ref = fit_penalized(X, y, PenaltySpec(lam, 0.5))
        assert np.allclose(fit.betas, ref.betas, atol=1e-6)
        assert fit.intercept == pytest.approx(ref.intercept, abs=1e-6)


def test_path_explicit_lambdas_and_sweep_bookkeeping():
    X, y = _data(n=300, p=25, seed=10)
    lm = lambda_max(X, y)
    res = path(X, y, lambdas=[lm, 0.5 * lm, 0.1 * lm])
    assert list(res.lambdas) == [lm, 0.5 * lm, 0.1 * lm]
    assert all(s >= 0 for s in res.n_sweeps)
    assert res.betas.shape == (3, 25)
