import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fisher_two_sided
from directeffects.penreg import contingency, fisher_exact, table_pvalue

# two-sided values printed by R's fisher.test with sprintf("%.16f")
R_VALUES = [
    ([[100, 2], [1000, 5]], 0.1300759363430016),
    ([[2, 7], [8, 2]], 0.0230141375652212),
    ([[5, 1], [10, 10]], 0.1973244147157191),
    ([[5, 15], [20, 20]], 0.0958044001247763),
    ([[5, 16], [20, 25]], 0.1725864953812995),
    ([[10, 5], [10, 0]], 0.0612648221343874),
    ([[5, 0], [1, 4]], 0.0476190476190476),
    ([[0, 5], [1, 4]], 1.0),
    ([[0, 1], [3, 2]], 1.0),
]


@pytest.mark.parametrize("table,expected", R_VALUES)
def test_matches_reference_values(table, expected):
    (a, b), (c, d) = table
    assert table_pvalue(a, b, c, d) == pytest.approx(expected, rel=1e-10, abs=1e-14)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_matches_rational_oracle(a, b, c, d):
    assert abs(table_pvalue(a, b, c, d) - fisher_two_sided(a, b, c, d)) <= 1e-12


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_symmetries_and_range(a, b, c, d):
    p = table_pvalue(a, b, c, d)
    assert 0 < p <= 1
    assert p == pytest.approx(table_pvalue(b, a, d, c), rel=1e-12)  # swap columns
    assert p == pytest.approx(table_pvalue(c, d, a, b), rel=1e-12)  # swap rows
    assert p == pytest.approx(table_pvalue(a, c, b, d), rel=1e-12)  # transpose


def test_perfect_association():
    assert table_pvalue(10, 0, 0, 10) == pytest.approx(1.0825088224469026e-05, rel=1e-10)


def test_degenerate_margin_gives_one():
    assert table_pvalue(0, 0, 5, 7) == 1.0
    assert table_pvalue(3, 0, 4, 0) == 1.0


def test_contingency_layout():
    x = np.array([1, 1, 0, 0, 1])
    y = np.array([1, 0, 1, 0, 1])
    assert contingency(x, y) == (2, 1, 1, 1)
    assert fisher_exact(x, y) == table_pvalue(2, 1, 1, 1)
    with pytest.raises(ValueError):
        contingency(x, y[:3])


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        table_pvalue(-1, 2, 3, 4)
