"""Univariate tail-margin estimation: Hill tail index and Weissman quantiles.

The quantile extrapolation here only sees the upper tail of one series;
everything multivariate lives in :mod:`tailcovar.dependence`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tailcovar.errors import BadK, BadLevel, NonFiniteData, NonPositiveThreshold, TooShort

__all__ = [
    "SortedSeries",
    "TailIndexEstimate",
    "VarEstimate",
    "sort_series",
    "hill",
    "weissman_var",
]


@dataclass(frozen=True)
class SortedSeries:
    """A validated sample stored in ascending order.

    Attributes:
        values: 1-D float64 array, ascending; ``values[j]`` is the
            ``(j+1)``-th order statistic.
    """

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def order_statistic(self, j: int) -> float:
        """The ``j``-th ascending order statistic, 1-based."""
        if not 1 <= j <= self.n:
            raise BadK(f"order statistic index {j} out of range 1..{self.n}")
        return float(self.values[j - 1])


def sort_series(raw) -> SortedSeries:
    """Validate a sample and return it sorted ascending.

    Args:
        raw: array-like of observations.

    Returns:
        SortedSeries: the sorted sample.

    Raises:
        NonFiniteData: if any value is NaN or infinite.
        TooShort: if fewer than 3 observations are supplied.
    """
    values = np.asarray(raw, dtype=np.float64).ravel()
    if values.size < 3:
        raise TooShort(f"need at least 3 observations, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteData("sample contains NaN or infinite values")
    return SortedSeries(values=np.sort(values, kind="stable"))


@dataclass(frozen=True)
class TailIndexEstimate:
    """Hill estimate of the extreme value index."""

    gamma_hat: float
    k1: int


@dataclass(frozen=True)
class VarEstimate:
    """Extrapolated tail quantile (value-at-risk) at a small level."""

    level: float
    value: float
    k2: int


def hill(series: SortedSeries, k1: int) -> TailIndexEstimate:
    """Hill estimator of the tail index from the top ``k1`` observations.

    Computes the mean of ``log`` excesses of the ``k1`` largest values over
    the ``(k1+1)``-th largest:

        gamma_hat = (1/k1) * sum_{i=1..k1} log X_{n,n-i+1} - log X_{n,n-k1}

    Args:
        series: sorted sample.
        k1: number of upper order statistics, ``1 <= k1 <= n - 1``.

    Returns:
        TailIndexEstimate with the estimated index ``gamma_hat``.

    Raises:
        BadK: if ``k1`` is out of range.
        NonPositiveThreshold: if the threshold order statistic is not
            strictly positive (shift negative data before calling).
    """
    n = series.n
    if not 1 <= k1 <= n - 1:
        raise BadK(f"k1={k1} out of range 1..{n - 1} for n={n}")
    threshold = series.values[n - 1 - k1]
    if threshold <= 0.0:
        raise NonPositiveThreshold(
            f"threshold order statistic {threshold!r} is not positive"
        )
    tail = series.values[n - k1 :]
    gamma = float(np.mean(np.log(tail)) - np.log(threshold))
    return TailIndexEstimate(gamma_hat=gamma, k1=k1)


def weissman_var(
    series: SortedSeries, gamma_hat: float, k2: int, p: float
) -> VarEstimate:
    """Weissman extrapolation of the ``(1-p)``-quantile beyond the sample.

    Scales the ``(k2+1)``-th largest observation by ``(k2/(n*p))**gamma_hat``.

    Args:
        series: sorted sample.
        gamma_hat: tail index estimate (from :func:`hill` or elsewhere).
        k2: number of upper order statistics, ``1 <= k2 <= n - 1``.
        p: tail probability in ``(0, 1)``; small values extrapolate.

    Returns:
        VarEstimate at level ``p``.

    Raises:
        BadK: if ``k2`` is out of range.
        BadLevel: if ``p`` is not in ``(0, 1)``.
        NonPositiveThreshold: if the anchor order statistic is not positive.
    """
    n = series.n
    if not 1 <= k2 <= n - 1:
        raise BadK(f"k2={k2} out of range 1..{n - 1} for n={n}")
    if not 0.0 < p < 1.0:
        raise BadLevel(f"p={p} must lie in (0, 1)")
    anchor = series.values[n - 1 - k2]
    if anchor <= 0.0:
        raise NonPositiveThreshold(f"anchor order statistic {anchor!r} is not positive")
    value = float(anchor * (k2 / (n * p)) ** gamma_hat)
    return VarEstimate(level=p, value=value, k2=k2)
