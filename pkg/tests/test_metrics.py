import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from directeffects.errors import UsageError
from directeffects.metrics import FindMetrics, aggregate, score, score_hct
from directeffects.selectors import SelectionResult
from directeffects.simgen import GroundTruth

index_sets = st.sets(st.integers(0, 29), max_size=10)


def test_table_example_mixed():
    m = score(SelectionResult("x", [1, 3]), GroundTruth((1, 2), (0.81, 0.81)))
    assert m == FindMetrics(1, 1, False, True, False, 0.5)


def test_empty_selection():
    assert score([], [1]) == FindMetrics(0, 0, False, False, False, 0.0)


def test_exact_selection():
    assert score([1], [1]) == FindMetrics(1, 0, True, False, True, 0.0)


@given(sel=index_sets, truth=index_sets.filter(bool))
def test_score_invariants(sel, truth):
    m = score(sel, truth)
    assert m.true_finds + m.false_finds == len(sel)
    assert m.perfect_find == (m.strong_true_find and not m.strong_false_find)
    assert m.fdr == m.false_finds / max(1, len(sel))
    assert 0 <= m.fdr <= 1
    if m.perfect_find:
        assert m.fdr == 0 and m.true_finds == len(truth)


@given(sel=index_sets, truth=index_sets.filter(bool), seed=st.integers(0, 1000))
def test_score_relabel_invariance(sel, truth, seed):
    # relabel indices outside sel | truth
    others = sorted(set(range(30)) - sel - truth)
    rng = np.random.default_rng(seed)
    mapping = dict(zip(others, rng.permutation(others).tolist()))
    assert score(sel, truth) == score({mapping.get(j, j) for j in sel}, truth)


def _correlated_pair(rho_target, n=2000, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 2, n)
    z = np.where(rng.random(n) < rho_target, x, rng.integers(0, 2, n))
    return np.column_stack([x, z, rng.integers(0, 2, n)])


def test_hct_proxy_counts_as_true_find():
    X = _correlated_pair(0.96)
    c = np.corrcoef(X[:, 0], X[:, 1])[0, 1]
    assert c >= 0.9
    assert score_hct([1], [0], X) == FindMetrics(1, 0, True, False, True, 0.0)


def test_hct_weak_proxy_is_false_find():
    X = _correlated_pair(0.85)
    assert np.corrcoef(X[:, 0], X[:, 1])[0, 1] < 0.9
    assert score_hct([1], [0], X) == score([1], [0])


@given(sel=index_sets, truth=index_sets.filter(bool), seed=st.integers(0, 100))
def test_hct_dominates_strict(sel, truth, seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, (200, 30))
    X[:, 1] = X[:, 0]
    X[:, 5] = np.where(rng.random(200) < 0.95, X[:, 4], 1 - X[:, 4])
    h, s = score_hct(sel, truth, X), score(sel, truth)
    assert h.true_finds >= s.true_finds
    assert h.false_finds <= s.false_finds
    assert h.perfect_find == (h.strong_true_find and not h.strong_false_find)


@given(sel=index_sets, truth=index_sets.filter(bool), seed=st.integers(0, 100))
def test_hct_at_one_is_strict_for_distinct_columns(sel, truth, seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, (300, 30))
    assert score_hct(sel, truth, X, corr_min=1.0) == score(sel, truth)


def test_aggregate():
    a = FindMetrics(1, 0, True, False, True, 0.0)
    b = FindMetrics(1, 2, True, True, False, 1.0)
    one = aggregate([a])
    assert one.count == 1 and one.mean == {k: float(v) for k, v in a.as_dict().items()}
    two = aggregate([a, b])
    assert two["fdr"] == 0.5 and two["perfect_find"] == 0.5
    assert two.se["fdr"] == pytest.approx(np.std([0, 1], ddof=1) / np.sqrt(2))
    assert aggregate([a] * 5).mean["perfect_find"] == 1.0
    with pytest.raises(UsageError):
        aggregate([])
