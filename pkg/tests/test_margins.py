"""Hill tail index and Weissman quantile extrapolation."""

import math

import numpy as np
import pytest

from tailcovar.errors import BadK, BadLevel, NonFiniteData, NonPositiveThreshold, TooShort
from tailcovar.margins import hill, sort_series, weissman_var


def _pareto_grid(gamma: float, n: int) -> np.ndarray:
    """Deterministic sample whose empirical df matches a Pareto closely.

    Uses mid-point survival levels (i - 1/2)/n, so the j-th order statistic
    sits at the exact quantile of its plotting position.
    """
    levels = (np.arange(1, n + 1) - 0.5) / n
    return levels ** (-gamma)


def test_sort_series_sorts_ascending():
    s = sort_series([3.0, 1.0, 2.0])
    assert list(s.values) == [1.0, 2.0, 3.0]
    assert s.n == 3
    assert s.order_statistic(1) == 1.0
    assert s.order_statistic(3) == 3.0


def test_sort_series_rejects_non_finite():
    with pytest.raises(NonFiniteData):
        sort_series([1.0, float("nan"), 2.0])
    with pytest.raises(NonFiniteData):
        sort_series([1.0, float("inf"), 2.0])


def test_sort_series_rejects_tiny_samples():
    with pytest.raises(TooShort):
        sort_series([1.0, 2.0])


def test_order_statistic_bounds():
    s = sort_series([1.0, 2.0, 3.0])
    with pytest.raises(BadK):
        s.order_statistic(0)
    with pytest.raises(BadK):
        s.order_statistic(4)


def test_hill_hand_example():
    # y_j = exp(j/2): log-spacings are all 1/2, so the mean log excess of
    # the top two over the third largest is (1/2 + 1) / 2 = 3/4.
    series = sort_series(np.exp(np.arange(1, 6) / 2.0))
    est = hill(series, 2)
    assert est.gamma_hat == pytest.approx(0.75, abs=1e-15)
    assert est.k1 == 2


def test_hill_scale_invariance():
    rng = np.random.Generator(np.random.Philox(3))
    y = rng.pareto(2.0, size=500) + 1.0
    base = hill(sort_series(y), 100).gamma_hat
    scaled = hill(sort_series(37.0 * y), 100).gamma_hat
    assert scaled == pytest.approx(base, rel=1e-12)


def test_hill_recovers_index_on_pareto_grid():
    y = _pareto_grid(0.7, 20000)
    est = hill(sort_series(y), 2000)
    assert est.gamma_hat == pytest.approx(0.7, abs=0.02)


def test_hill_k_range_validation():
    series = sort_series([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(BadK):
        hill(series, 0)
    with pytest.raises(BadK):
        hill(series, 4)


def test_hill_requires_positive_threshold():
    series = sort_series([-1.0, 0.0, 1.0, 2.0])
    with pytest.raises(NonPositiveThreshold):
        hill(series, 3)


def test_weissman_formula_identity():
    series = sort_series(np.arange(1.0, 101.0))
    est = weissman_var(series, gamma_hat=0.5, k2=10, p=0.05)
    # anchor is the 11th largest (=90), scaled by (k2/(n p))**gamma
    assert est.value == pytest.approx(90.0 * (10 / 5.0) ** 0.5, rel=1e-15)
    assert est.level == 0.05
    assert est.k2 == 10


def test_weissman_extrapolates_pareto_tail():
    y = _pareto_grid(0.7, 20000)
    gamma = hill(sort_series(y), 2000).gamma_hat
    est = weissman_var(sort_series(y), gamma, 2000, 0.0005)
    assert est.value == pytest.approx(0.0005**-0.7, rel=0.02)


def test_weissman_monotone_in_level():
    series = sort_series(_pareto_grid(0.5, 1000))
    v_small = weissman_var(series, 0.5, 100, 0.001).value
    v_large = weissman_var(series, 0.5, 100, 0.01).value
    assert v_small > v_large


def test_weissman_level_validation():
    series = sort_series([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(BadLevel):
        weissman_var(series, 0.5, 2, 0.0)
    with pytest.raises(BadLevel):
        weissman_var(series, 0.5, 2, 1.0)
    with pytest.raises(BadK):
        weissman_var(series, 0.5, 4, 0.05)


def test_weissman_requires_positive_anchor():
    series = sort_series([-2.0, -1.0, 1.0, 2.0])
    with pytest.raises(NonPositiveThreshold):
        weissman_var(series, 0.5, 3, 0.05)


def test_weissman_at_anchor_level_returns_anchor():
    # k2 = n*p makes the extrapolation factor 1 regardless of gamma.
    series = sort_series(np.arange(1.0, 101.0))
    est = weissman_var(series, 0.83, 5, 0.05)
    assert est.value == pytest.approx(95.0, rel=1e-15)
