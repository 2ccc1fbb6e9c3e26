"""Permutation and asymptotic hypothesis tests for (partial) distance correlation.

Permutation tests draw R relabelings from a named RNG stream, generated up
front so results are reproducible regardless of how the work is scheduled.
The p-value convention is (1 + #{s_r >= s_0}) / (R + 1), which is a valid
(conservative) p-value under exchangeability for any R.

The marginal test relabels y against fixed x. The partial test relabels the
first sample while holding (y, z) fixed; this is implemented by applying one
shared relabeling to y and z against fixed x, which yields the identical
statistic and lets every permutation reuse the x sort and all variance terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from . import _fast
from .dcor import (_abs_row_sums, _paired, _self_aggregates, _unbiased_from,
                   dcor_bias_corrected, fast_distance_aggregates)
from .exceptions import ParameterError
from .pdcor import pdcor
from .rng import RngStream

__all__ = [
    "TestResult",
    "asymptotic_pvalue",
    "dcor_test_permutation",
    "pdcor_test_permutation",
    "dcor_test_asymptotic",
    "pdcor_test_asymptotic",
]

# Permutation matrices are materialized in chunks of at most this many int64
# entries (64 MB) so large-n tests stay within modest memory.
_PERM_CHUNK_ELEMENTS = 8_000_000


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test.

    ``statistic`` is the observed test statistic: the bias-corrected
    (partial) distance correlation for permutation tests, n*r + 1 for
    asymptotic tests, the studentized Fisher transform for Pearson tests.
    ``n_permutations`` and ``seed`` are 0 when the method draws no randomness.
    """

    statistic: float
    p_value: float
    method: str
    n_permutations: int
    seed: int


def _check_permutations(n_permutations: int) -> int:
    r = int(n_permutations)
    if r < 1:
        raise ParameterError(f"n_permutations must be >= 1, got {n_permutations}")
    return r


def _perm_chunks(g: np.random.Generator, n: int, total: int):
    rows_cap = max(1, _PERM_CHUNK_ELEMENTS // n)
    base = np.arange(n, dtype=np.int64)
    produced = 0
    while produced < total:
        rows = min(rows_cap, total - produced)
        mat = np.tile(base, (rows, 1))
        g.permuted(mat, axis=1, out=mat)
        yield mat
        produced += rows


def _identity_perm(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.int64)[None, :]


def _tie_tol_cov(vx: float, vy: float) -> float:
    """Tie margin for covariance comparisons across permutations.

    Mathematically tied permutation statistics land a few ulps apart because
    every relabeling accumulates sums in a different order; counting a true
    tie as "below observed" would bias p-values downward. |cov| is bounded by
    sqrt(vx*vy), so this margin sits far above rounding noise yet far below
    any genuine gap between distinct configurations.
    """
    return 1e-9 * float(np.sqrt(vx * vy))


def _tie_tol_stat(stat0: float) -> float:
    """Tie margin for the partial statistic, which is already on unit scale."""
    return 1e-9 * (1.0 + abs(stat0))


class _PairParts:
    """Sorted views and row sums shared across all permutations."""

    __slots__ = ("x", "y", "x_order", "xs", "a_row", "b_row", "sx", "sy", "s3")

    def __init__(self, xa: np.ndarray, ya: np.ndarray,
                 b_row: np.ndarray | None = None, sy: float | None = None):
        self.x = xa
        self.y = ya
        self.x_order = np.argsort(xa, kind="stable").astype(np.int64)
        self.xs = np.ascontiguousarray(xa[self.x_order])
        self.a_row = _abs_row_sums(xa)
        self.b_row = _abs_row_sums(ya) if b_row is None else b_row
        self.sx = float(xa.sum())
        self.sy = float(ya.sum()) if sy is None else sy
        self.s3 = float(self.a_row.sum()) * float(self.b_row.sum())

    def cov_batch(self, perms: np.ndarray) -> np.ndarray:
        out = np.empty(perms.shape[0])
        _fast.ucov_perm_batch(self.x, self.y, self.a_row, self.b_row,
                              self.x_order, self.xs, self.sx, self.sy,
                              self.s3, perms, out)
        return out

    def exceed_count(self, perms: np.ndarray, cov0: float, stop_count: int) -> int:
        return int(_fast.ucov_exceed_count(self.x, self.y, self.a_row, self.b_row,
                                           self.x_order, self.xs, self.sx, self.sy,
                                           self.s3, perms, cov0, stop_count))


def dcor_test_permutation(x, y, n_permutations: int = 500,
                          rng: RngStream | None = None) -> TestResult:
    """Permutation test of independence using bias-corrected distance correlation.

    Parameters
    ----------
    x, y : array-like
        Paired univariate samples, n >= 4.
    n_permutations : int
        Number of relabelings R (>= 1).
    rng : RngStream, optional
        Source of the relabelings; defaults to ``RngStream(0)``.

    Returns
    -------
    TestResult
        ``p_value`` lies in [1/(R+1), 1]. Degenerate (constant) samples give
        statistic 0 and p-value 1: every relabeled statistic ties with the
        observed one.
    """
    r_total = _check_permutations(n_permutations)
    if rng is None:
        rng = RngStream(0)
    xa, ya = _paired(x, y, 4)
    vx = _unbiased_from(_self_aggregates(xa))
    vy = _unbiased_from(_self_aggregates(ya))
    if vx <= 0.0 or vy <= 0.0:
        return TestResult(0.0, 1.0, "permutation", r_total, rng.seed)

    parts = _PairParts(xa, ya)
    cov0 = float(parts.cov_batch(_identity_perm(xa.size))[0])
    # Shared positive denominator: comparing covariances equals comparing
    # correlations.
    threshold = cov0 - _tie_tol_cov(vx, vy)
    count = 0
    g = rng.generator()
    for perms in _perm_chunks(g, xa.size, r_total):
        count += parts.exceed_count(perms, threshold, r_total + 1)
    p = (1.0 + count) / (r_total + 1.0)
    statistic = cov0 / float(np.sqrt(vx * vy))
    return TestResult(statistic, p, "permutation", r_total, rng.seed)


class _TripleParts:
    """Extends the pair parts with the conditioning sample z."""

    __slots__ = ("pair", "z", "c_row", "sz", "s3_xz",
                 "inv_den_xy", "inv_den_xz", "r_yz", "fy")

    def __init__(self, xa: np.ndarray, ya: np.ndarray, za: np.ndarray):
        self.pair = _PairParts(xa, ya)
        self.z = za
        self.c_row = _abs_row_sums(za)
        self.sz = float(za.sum())
        self.s3_xz = float(self.pair.a_row.sum()) * float(self.c_row.sum())

        vx = _unbiased_from(_self_aggregates(xa))
        vy = _unbiased_from(_self_aggregates(ya))
        vz = _unbiased_from(_self_aggregates(za))
        # A nonpositive distance variance zeroes every correlation involving
        # that sample, exactly like the estimator's degenerate guard.
        self.inv_den_xy = 1.0 / float(np.sqrt(vx * vy)) if vx > 0.0 and vy > 0.0 else 0.0
        self.inv_den_xz = 1.0 / float(np.sqrt(vx * vz)) if vx > 0.0 and vz > 0.0 else 0.0
        if vy > 0.0 and vz > 0.0:
            self.r_yz = _unbiased_from(fast_distance_aggregates(ya, za)) / float(np.sqrt(vy * vz))
        else:
            self.r_yz = 0.0
        self.fy = 1.0 - self.r_yz * self.r_yz

    def stat_batch(self, perms: np.ndarray) -> np.ndarray:
        p = self.pair
        out = np.empty(perms.shape[0])
        _fast.pdcor_perm_batch(p.x, p.y, self.z, p.a_row, p.b_row, self.c_row,
                               p.x_order, p.xs, p.sx, p.sy, self.sz,
                               p.s3, self.s3_xz, self.inv_den_xy, self.inv_den_xz,
                               self.r_yz, self.fy, perms, out)
        return out

    def exceed_count(self, perms: np.ndarray, pd0: float, stop_count: int) -> int:
        p = self.pair
        return int(_fast.pdcor_exceed_count(
            p.x, p.y, self.z, p.a_row, p.b_row, self.c_row,
            p.x_order, p.xs, p.sx, p.sy, self.sz,
            p.s3, self.s3_xz, self.inv_den_xy, self.inv_den_xz,
            self.r_yz, self.fy, pd0, perms, stop_count))


def pdcor_test_permutation(x, y, z, n_permutations: int = 500,
                           rng: RngStream | None = None) -> TestResult:
    """Permutation test of conditional independence via partial distance correlation.

    Relabels x against fixed (y, z); see the module docstring for how the
    relabeling is applied. Degenerate guards mirror :func:`dcorkit.pdcor.pdcor`.
    """
    r_total = _check_permutations(n_permutations)
    if rng is None:
        rng = RngStream(0)
    xa, ya = _paired(x, y, 4)
    _, za = _paired(x, z, 4)

    parts = _TripleParts(xa, ya, za)
    pd0 = float(parts.stat_batch(_identity_perm(xa.size))[0])
    threshold = pd0 - _tie_tol_stat(pd0)
    count = 0
    g = rng.generator()
    for perms in _perm_chunks(g, xa.size, r_total):
        count += parts.exceed_count(perms, threshold, r_total + 1)
    p = (1.0 + count) / (r_total + 1.0)
    return TestResult(pd0, p, "permutation", r_total, rng.seed)


def asymptotic_pvalue(statistic: float, n: int) -> float:
    """Upper chi-square(1) tail probability of S = n*statistic + 1."""
    s = float(n) * float(statistic) + 1.0
    return float(chi2.sf(s, 1))


def dcor_test_asymptotic(x, y) -> TestResult:
    """Independence test from the limit law: S = n*r + 1 is chi-square(1) under H0.

    Conservative in finite samples; p_value = P(chi2_1 >= S) lies in (0, 1].
    """
    est = dcor_bias_corrected(x, y)
    s = float(est.n * est.value + 1.0)
    return TestResult(s, asymptotic_pvalue(est.value, est.n), "asymptotic", 0, 0)


def pdcor_test_asymptotic(x, y, z) -> TestResult:
    """Conditional-independence analogue of :func:`dcor_test_asymptotic`."""
    est = pdcor(x, y, z)
    s = float(est.n * est.value + 1.0)
    return TestResult(s, asymptotic_pvalue(est.value, est.n), "asymptotic", 0, 0)
