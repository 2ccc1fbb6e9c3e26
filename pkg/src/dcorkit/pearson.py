"""Product-moment (partial) correlation and the Fisher-transform test."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as t_dist

from .dcor import _as_sample, _paired
from .exceptions import (ParameterError, SampleSizeError, SingularityError)
from .inference import TestResult

__all__ = [
    "PearsonEstimate",
    "pearson_corr",
    "partial_pearson",
    "fisher_transform",
    "pearson_test",
]


@dataclass(frozen=True)
class PearsonEstimate:
    """A (partial) product-moment correlation.

    ``conditioning_size`` is the number of variables partialled out (0 for a
    plain correlation). ``degenerate`` marks a constant x or y; the value is
    then 0.
    """

    r: float
    n: int
    conditioning_size: int = 0
    degenerate: bool = False


def pearson_corr(x, y) -> PearsonEstimate:
    """Sample product-moment correlation (n >= 3)."""
    xa, ya = _paired(x, y, 3)
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(xc @ xc)
    sy = float(yc @ yc)
    if sx <= 0.0 or sy <= 0.0:
        return PearsonEstimate(0.0, xa.size, degenerate=True)
    return PearsonEstimate(float(xc @ yc) / math.sqrt(sx * sy), xa.size)


def _conditioning_matrix(x: np.ndarray, z) -> np.ndarray:
    """Normalize z to an (n, k) float matrix aligned with x."""
    if isinstance(z, (list, tuple)):
        cols = [_as_sample(c, "z") for c in z]
        if not cols:
            raise ParameterError("conditioning set must contain at least one sample")
        mat = np.column_stack(cols)
    else:
        mat = np.asarray(z, dtype=np.float64)
        if mat.ndim == 1:
            mat = mat[:, None]
        if mat.ndim != 2:
            raise ParameterError(f"conditioning set must be 1- or 2-dimensional, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ParameterError("conditioning set contains non-finite values")
    if mat.shape[0] != x.size:
        raise ParameterError(
            f"conditioning samples have length {mat.shape[0]}, expected {x.size}")
    return mat


def partial_pearson(x, y, z) -> PearsonEstimate:
    """Partial correlation of x and y given one or more samples z.

    For a single conditioning variable this is the textbook formula
    (r_xy - r_xz * r_yz) / (sqrt(1 - r_xz^2) * sqrt(1 - r_yz^2)); for larger
    sets it is read off the inverse correlation matrix of (x, y, z_1..z_k).

    Raises
    ------
    SingularityError
        If the correlation matrix cannot be inverted, e.g. some |r_xz| = 1 or
        a constant conditioning sample.
    """
    xa, ya = _paired(x, y, 3)
    zmat = _conditioning_matrix(xa, z)
    k = zmat.shape[1]
    if xa.size < k + 3:
        raise SampleSizeError(
            f"partial correlation with {k} conditioning variables needs n >= {k + 3}")

    if k == 1:
        r_xy = pearson_corr(xa, ya)
        r_xz = pearson_corr(xa, zmat[:, 0])
        r_yz = pearson_corr(ya, zmat[:, 0])
        if r_xy.degenerate:
            return PearsonEstimate(0.0, xa.size, 1, degenerate=True)
        # r_xy is not degenerate here, so a degenerate r_xz/r_yz means z.
        if r_xz.degenerate or r_yz.degenerate:
            raise SingularityError("constant conditioning sample")
        fx = 1.0 - r_xz.r**2
        fy = 1.0 - r_yz.r**2
        # Exactly collinear data compute |r| = 1 give or take a few ulps, so
        # the factor lands within ~1e-15 of zero; no statistical sample gets
        # near 1e-12.
        if fx <= 1e-12 or fy <= 1e-12:
            raise SingularityError("conditioning sample is collinear with x or y")
        value = (r_xy.r - r_xz.r * r_yz.r) / (math.sqrt(fx) * math.sqrt(fy))
        return PearsonEstimate(value, xa.size, 1)

    cols = np.column_stack([xa, ya, zmat])
    sd = cols.std(axis=0)
    if np.any(sd <= 0.0):
        if sd[0] <= 0.0 or sd[1] <= 0.0:
            return PearsonEstimate(0.0, xa.size, k, degenerate=True)
        raise SingularityError("constant conditioning sample")
    corr = np.corrcoef(cols, rowvar=False)
    # inv() does not reliably reject an exactly singular matrix (duplicated
    # conditioning columns give det 0 yet can still "invert" to garbage).
    sign, logdet = np.linalg.slogdet(corr)
    if sign <= 0.0 or logdet < math.log(1e-12):
        raise SingularityError("singular correlation matrix")
    try:
        prec = np.linalg.inv(corr)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("singular correlation matrix") from exc
    den = prec[0, 0] * prec[1, 1]
    if not np.isfinite(den) or den <= 0.0:
        raise SingularityError("singular correlation matrix")
    return PearsonEstimate(float(-prec[0, 1] / math.sqrt(den)), xa.size, k)


def fisher_transform(r: float) -> float:
    """atanh(r); returns signed infinity at |r| >= 1 (degenerate correlation)."""
    if abs(r) >= 1.0:
        return math.copysign(math.inf, r)
    return math.atanh(r)


def pearson_test(estimate: PearsonEstimate, rho0: float = 0.0) -> TestResult:
    """Two-sided test of H0: rho = rho0 via the Fisher transform.

    The statistic (F(r) - F(rho0)) * sqrt(n - 3 - k) is referred to a t
    distribution with n - 3 - k degrees of freedom, k being the conditioning
    size. An |r| = 1 estimate transforms to infinity and forces p = 0.
    """
    if abs(rho0) >= 1.0:
        raise ParameterError(f"rho0 must lie in (-1, 1), got {rho0}")
    df = estimate.n - 3 - estimate.conditioning_size
    if df < 1:
        raise SampleSizeError(
            f"Fisher test needs n - 3 - k >= 1, got n={estimate.n}, k={estimate.conditioning_size}")
    t0 = (fisher_transform(estimate.r) - fisher_transform(rho0)) * math.sqrt(df)
    p = 2.0 * float(t_dist.sf(abs(t0), df))
    return TestResult(t0, min(p, 1.0), "pearson", 0, 0)
