"""Compiled kernels for the O(n log n) univariate distance statistics.

Everything here works on pre-sorted/pre-aligned float64 arrays prepared by the
callers in :mod:`dcorkit.dcor` and :mod:`dcorkit.inference`. The kernels are
nogil so replication-level thread pools overlap on multicore hosts.

Conventions shared by all kernels:

- ``xs`` is x sorted ascending, ``x_order`` the argsort that produced it.
- ``a_row``/``b_row`` are unnormalized absolute-distance row sums of the
  original (unsorted) samples.
- A permutation row ``p`` means the relabeled sample ``y[p]`` is paired with
  the fixed ``x``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Width of the knife edge around zero for the partial-statistic denominator
# factors 1 - r^2. Samples whose centered distance matrices are proportional
# (guaranteed at n = 4, where they span three proportionality classes) make a
# factor mathematically zero, but each evaluation route computes it a few
# ulps to either side; dividing by such a factor amplifies that noise to
# ~1e-7. Treating the whole band as zero keeps the estimator, the batch
# kernels, and any reference implementation on the same side. Data that are
# not structurally degenerate never produce |r| > 1 - 5e-11.
FACTOR_TOL = 1e-10


@njit(cache=True, nogil=True)
def merge_inversion_sum(x, y, xb, yb):
    # x ascending, y aligned to it; bottom-up merge sort on y accumulating
    #   sum over pairs i < j (x order) with y_i > y_j of (x_j - x_i)*(y_i - y_j).
    # Mutates all four buffers. Ties in y contribute zero and are never
    # counted as inversions (left element wins on equality).
    n = x.shape[0]
    total = 0.0
    width = 1
    src_x, src_y, dst_x, dst_y = x, y, xb, yb
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i = lo
            j = mid
            k = lo
            cnt = 0.0
            sx = 0.0
            sy = 0.0
            sxy = 0.0
            while i < mid and j < hi:
                if src_y[i] <= src_y[j]:
                    xi = src_x[i]
                    yi = src_y[i]
                    total += yi * sx - sxy - xi * yi * cnt + xi * sy
                    dst_x[k] = xi
                    dst_y[k] = yi
                    i += 1
                else:
                    xj = src_x[j]
                    yj = src_y[j]
                    cnt += 1.0
                    sx += xj
                    sy += yj
                    sxy += xj * yj
                    dst_x[k] = xj
                    dst_y[k] = yj
                    j += 1
                k += 1
            while i < mid:
                xi = src_x[i]
                yi = src_y[i]
                total += yi * sx - sxy - xi * yi * cnt + xi * sy
                dst_x[k] = xi
                dst_y[k] = yi
                i += 1
                k += 1
            while j < hi:
                dst_x[k] = src_x[j]
                dst_y[k] = src_y[j]
                j += 1
                k += 1
        src_x, dst_x = dst_x, src_x
        src_y, dst_y = dst_y, src_y
        width *= 2
    return total


@njit(cache=True, nogil=True)
def _perm_ucov(x, y, a_row, b_row, x_order, xs, sx, sy, s3, p,
               xw, yw, xb, yb, c1, c2, c3):
    # Unbiased distance covariance of (x, y[p]) from shared precomputed parts.
    n = x.shape[0]
    dsum = 0.0
    s2 = 0.0
    for i in range(n):
        pi = p[i]
        dsum += x[i] * y[pi]
        s2 += a_row[i] * b_row[pi]
    for k in range(n):
        xw[k] = xs[k]
        yw[k] = y[p[x_order[k]]]
    inv = merge_inversion_sum(xw, yw, xb, yb)
    s1 = 2.0 * ((n * dsum - sx * sy) + 2.0 * inv)
    return s1 / c1 - 2.0 * s2 / c2 + s3 / c3


@njit(cache=True, nogil=True)
def ucov_perm_batch(x, y, a_row, b_row, x_order, xs, sx, sy, s3, perms, out):
    # out[r] = unbiased distance covariance of (x, y[perms[r]])
    n = x.shape[0]
    nf = float(n)
    c1 = nf * (nf - 3.0)
    c2 = nf * (nf - 2.0) * (nf - 3.0)
    c3 = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)
    xw = np.empty(n)
    yw = np.empty(n)
    xb = np.empty(n)
    yb = np.empty(n)
    for r in range(perms.shape[0]):
        out[r] = _perm_ucov(x, y, a_row, b_row, x_order, xs, sx, sy, s3,
                            perms[r], xw, yw, xb, yb, c1, c2, c3)


@njit(cache=True, nogil=True)
def ucov_exceed_count(x, y, a_row, b_row, x_order, xs, sx, sy, s3, perms,
                      cov0, stop_count):
    # Number of permutations with covariance >= cov0, leaving early once the
    # count reaches stop_count (pass stop_count > len(perms) to disable).
    # Valid for the correlation test because all permutations share one
    # positive denominator.
    n = x.shape[0]
    nf = float(n)
    c1 = nf * (nf - 3.0)
    c2 = nf * (nf - 2.0) * (nf - 3.0)
    c3 = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)
    xw = np.empty(n)
    yw = np.empty(n)
    xb = np.empty(n)
    yb = np.empty(n)
    count = 0
    for r in range(perms.shape[0]):
        cov = _perm_ucov(x, y, a_row, b_row, x_order, xs, sx, sy, s3,
                         perms[r], xw, yw, xb, yb, c1, c2, c3)
        if cov >= cov0:
            count += 1
            if count >= stop_count:
                break
    return count


@njit(cache=True, nogil=True)
def _pdcor_value(r_xy, r_xz, r_yz, fy):
    fx = 1.0 - r_xz * r_xz
    if fx <= FACTOR_TOL or fy <= FACTOR_TOL:
        return 0.0
    return (r_xy - r_xz * r_yz) / (np.sqrt(fx) * np.sqrt(fy))


@njit(cache=True, nogil=True)
def pdcor_perm_batch(x, y, z, a_row, b_row, c_row, x_order, xs, sx, sy, sz,
                     s3_xy, s3_xz, inv_den_xy, inv_den_xz, r_yz, fy,
                     perms, out):
    # out[r] = partial statistic of (x, y[perms[r]], z[perms[r]]).
    # Relabeling y and z together while holding x fixed is distributionally
    # identical to permuting x against fixed (y, z) and keeps the x sort and
    # the y-z correlation shared across permutations.
    n = x.shape[0]
    nf = float(n)
    c1 = nf * (nf - 3.0)
    c2 = nf * (nf - 2.0) * (nf - 3.0)
    c3 = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)
    xw = np.empty(n)
    yw = np.empty(n)
    xb = np.empty(n)
    yb = np.empty(n)
    for r in range(perms.shape[0]):
        cov_xy = _perm_ucov(x, y, a_row, b_row, x_order, xs, sx, sy, s3_xy,
                            perms[r], xw, yw, xb, yb, c1, c2, c3)
        cov_xz = _perm_ucov(x, z, a_row, c_row, x_order, xs, sx, sz, s3_xz,
                            perms[r], xw, yw, xb, yb, c1, c2, c3)
        out[r] = _pdcor_value(cov_xy * inv_den_xy, cov_xz * inv_den_xz, r_yz, fy)


@njit(cache=True, nogil=True)
def pdcor_exceed_count(x, y, z, a_row, b_row, c_row, x_order, xs, sx, sy, sz,
                       s3_xy, s3_xz, inv_den_xy, inv_den_xz, r_yz, fy,
                       pd0, perms, stop_count):
    # Early-exit exceedance count for the partial permutation test.
    n = x.shape[0]
    nf = float(n)
    c1 = nf * (nf - 3.0)
    c2 = nf * (nf - 2.0) * (nf - 3.0)
    c3 = nf * (nf - 1.0) * (nf - 2.0) * (nf - 3.0)
    xw = np.empty(n)
    yw = np.empty(n)
    xb = np.empty(n)
    yb = np.empty(n)
    count = 0
    for r in range(perms.shape[0]):
        cov_xy = _perm_ucov(x, y, a_row, b_row, x_order, xs, sx, sy, s3_xy,
                            perms[r], xw, yw, xb, yb, c1, c2, c3)
        cov_xz = _perm_ucov(x, z, a_row, c_row, x_order, xs, sx, sz, s3_xz,
                            perms[r], xw, yw, xb, yb, c1, c2, c3)
        pd = _pdcor_value(cov_xy * inv_den_xy, cov_xz * inv_den_xz, r_yz, fy)
        if pd >= pd0:
            count += 1
            if count >= stop_count:
                break
    return count


def warmup() -> None:
    """Force compilation of every kernel on tiny inputs."""
    n = 8
    x = np.arange(n, dtype=np.float64)
    y = x[::-1].copy()
    order = np.argsort(x, kind="stable").astype(np.int64)
    xs = x[order].copy()
    row = np.abs(x[:, None] - x[None, :]).sum(axis=1)
    perms = np.arange(n, dtype=np.int64)[None, :].copy()
    out = np.empty(1)
    sx = float(x.sum())
    s3 = float(row.sum()) ** 2
    ucov_perm_batch(x, y, row, row, order, xs, sx, sx, s3, perms, out)
    ucov_exceed_count(x, y, row, row, order, xs, sx, sx, s3, perms, out[0], 2)
    pdcor_perm_batch(x, y, y, row, row, row, order, xs, sx, sx, sx,
                     s3, s3, 1.0, 1.0, 0.0, 1.0, perms, out)
    pdcor_exceed_count(x, y, y, row, row, row, order, xs, sx, sx, sx,
                       s3, s3, 1.0, 1.0, 0.0, 1.0, out[0], perms, 2)
