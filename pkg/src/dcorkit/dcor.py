"""Distance covariance and correlation for univariate real samples.

All estimators run in O(n log n) time and O(n) memory. The three raw sums
behind both the biased and unbiased estimators are exposed as
:class:`DistanceAggregates` so one pass serves every estimator.

With ``a_ij = |x_i - x_j|`` and ``b_ij = |y_i - y_j|``, the aggregates are

- ``pair_product_sum``   S1 = sum_{i != j} a_ij * b_ij
- ``row_sum_products``   S2 = sum_i a_i. * b_i.   (unnormalized row sums)
- ``grand_product``      S3 = a.. * b..           (product of grand sums)

The biased squared distance covariance is S1/n^2 - 2*S2/n^3 + S3/n^4, which
equals the mean of the elementwise product of the double-centered distance
matrices. The unbiased version replaces the powers of n with falling
factorials: S1/(n(n-3)) - 2*S2/(n(n-2)(n-3)) + S3/(n(n-1)(n-2)(n-3)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fast import merge_inversion_sum
from .exceptions import DataError, DimensionMismatchError, SampleSizeError

__all__ = [
    "DistanceAggregates",
    "DCorEstimate",
    "fast_distance_aggregates",
    "dcov_biased_sq",
    "dcov_unbiased",
    "dcor_biased_sq",
    "dcor_bias_corrected",
]


@dataclass(frozen=True)
class DistanceAggregates:
    """Raw distance sums shared by the biased and unbiased estimators."""

    pair_product_sum: float
    row_sum_products: float
    grand_product: float
    n: int


@dataclass(frozen=True)
class DCorEstimate:
    """A distance-correlation value.

    ``kind`` is ``"biased_sq"`` (squared correlation in [0, 1]) or
    ``"bias_corrected"`` (in [-1, 1]). ``degenerate`` marks samples whose
    distance variance vanished (constant input); the value is then 0.
    """

    value: float
    kind: str
    n: int
    degenerate: bool = False


def _as_sample(v, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DataError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains non-finite values")
    return arr


def _paired(x, y, min_n: int):
    xa = _as_sample(x, "x")
    ya = _as_sample(y, "y")
    if xa.size != ya.size:
        raise DimensionMismatchError(f"samples differ in length: {xa.size} vs {ya.size}")
    if xa.size < min_n:
        raise SampleSizeError(f"need at least {min_n} observations, got {xa.size}")
    return xa, ya


def _abs_row_sums(v: np.ndarray) -> np.ndarray:
    """Row sums of the absolute-distance matrix, in original index order."""
    n = v.size
    order = np.argsort(v, kind="stable")
    vs = v[order]
    csum = np.cumsum(vs)
    total = csum[-1]
    pre = csum - vs
    rows_sorted = (2.0 * np.arange(n) - n) * vs - 2.0 * pre + total
    rows = np.empty(n)
    rows[order] = rows_sorted
    return rows


def _pair_product_sum(x: np.ndarray, y: np.ndarray) -> float:
    """S1 = sum_{i != j} |x_i - x_j| * |y_i - y_j| in O(n log n)."""
    n = x.size
    order = np.argsort(x, kind="stable")
    xs = np.ascontiguousarray(x[order])
    ys = np.ascontiguousarray(y[order])
    inv = merge_inversion_sum(xs.copy(), ys, np.empty(n), np.empty(n))
    d = n * float(x @ y) - float(x.sum()) * float(y.sum())
    return 2.0 * (d + 2.0 * inv)


def fast_distance_aggregates(x, y) -> DistanceAggregates:
    """Compute the three raw distance sums for a univariate pair.

    Parameters
    ----------
    x, y : array-like
        Paired one-dimensional samples of equal length n >= 2, all finite.

    Returns
    -------
    DistanceAggregates
        Unnormalized sums; see the module docstring for definitions.
    """
    xa, ya = _paired(x, y, 2)
    a_row = _abs_row_sums(xa)
    b_row = _abs_row_sums(ya)
    return DistanceAggregates(
        pair_product_sum=_pair_product_sum(xa, ya),
        row_sum_products=float(a_row @ b_row),
        grand_product=float(a_row.sum()) * float(b_row.sum()),
        n=xa.size,
    )


def _self_aggregates(v: np.ndarray) -> DistanceAggregates:
    # Distance variance needs no merge pass: sorting v removes every
    # inversion, so S1 = 2 * (n * sum(v^2) - sum(v)^2).
    n = v.size
    row = _abs_row_sums(v)
    s1 = 2.0 * (n * float(v @ v) - float(v.sum()) ** 2)
    return DistanceAggregates(s1, float(row @ row), float(row.sum()) ** 2, n)


def _biased_from(agg: DistanceAggregates) -> float:
    n = float(agg.n)
    v = (agg.pair_product_sum / n**2
         - 2.0 * agg.row_sum_products / n**3
         + agg.grand_product / n**4)
    return max(v, 0.0)


def _unbiased_from(agg: DistanceAggregates) -> float:
    n = float(agg.n)
    return (agg.pair_product_sum / (n * (n - 3.0))
            - 2.0 * agg.row_sum_products / (n * (n - 2.0) * (n - 3.0))
            + agg.grand_product / (n * (n - 1.0) * (n - 2.0) * (n - 3.0)))


def dcov_biased_sq(x, y) -> float:
    """Biased squared distance covariance (n >= 2, always >= 0)."""
    xa, ya = _paired(x, y, 2)
    return _biased_from(fast_distance_aggregates(xa, ya))


def dcov_unbiased(x, y) -> float:
    """Unbiased squared distance covariance (n >= 4, may be negative)."""
    xa, ya = _paired(x, y, 4)
    return _unbiased_from(fast_distance_aggregates(xa, ya))


def dcor_biased_sq(x, y) -> DCorEstimate:
    """Biased squared distance correlation in [0, 1].

    Returns a degenerate zero estimate when either sample is constant.
    """
    xa, ya = _paired(x, y, 2)
    vx = _biased_from(_self_aggregates(xa))
    vy = _biased_from(_self_aggregates(ya))
    if vx <= 0.0 or vy <= 0.0:
        return DCorEstimate(0.0, "biased_sq", xa.size, degenerate=True)
    vxy = _biased_from(fast_distance_aggregates(xa, ya))
    return DCorEstimate(float(vxy / np.sqrt(vx * vy)), "biased_sq", xa.size)


def dcor_bias_corrected(x, y) -> DCorEstimate:
    """Bias-corrected distance correlation in [-1, 1] (n >= 4).

    The numerator and both denominator factors are the unbiased squared
    distance covariances; the estimate is exactly zero in expectation under
    independence. Degenerate (constant) samples give a flagged zero.
    """
    xa, ya = _paired(x, y, 4)
    vx = _unbiased_from(_self_aggregates(xa))
    vy = _unbiased_from(_self_aggregates(ya))
    if vx <= 0.0 or vy <= 0.0:
        return DCorEstimate(0.0, "bias_corrected", xa.size, degenerate=True)
    vxy = _unbiased_from(fast_distance_aggregates(xa, ya))
    return DCorEstimate(float(vxy / np.sqrt(vx * vy)), "bias_corrected", xa.size)
