"""Partial distance correlation for univariate triples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fast import FACTOR_TOL
from .dcor import _paired, _self_aggregates, _unbiased_from, fast_distance_aggregates

__all__ = ["PartialDCorEstimate", "pdcor"]


@dataclass(frozen=True)
class PartialDCorEstimate:
    """Partial distance correlation of x and y after removing z.

    ``components`` holds the three pairwise bias-corrected distance
    correlations (r_xy, r_xz, r_yz). ``degenerate`` is set when either
    denominator factor 1 - r^2 sits at or below the knife-edge width
    ``FACTOR_TOL`` (z fully explains x or y, a constant sample, or the
    structural n = 4 proportionality); the value is then 0 by convention.
    """

    value: float
    components: tuple[float, float, float]
    n: int
    degenerate: bool = False


def partial_from_components(r_xy: float, r_xz: float, r_yz: float) -> tuple[float, bool]:
    """Combine pairwise correlations; returns (value, degenerate flag).

    A mathematically zero denominator factor lands a few ulps on either side
    of zero depending on how r was accumulated, and dividing by it amplifies
    that noise by ~1e6; the FACTOR_TOL band maps every such case to the same
    degenerate zero regardless of route.
    """
    fx = 1.0 - r_xz * r_xz
    fy = 1.0 - r_yz * r_yz
    if fx <= FACTOR_TOL or fy <= FACTOR_TOL:
        return 0.0, True
    return float((r_xy - r_xz * r_yz) / (np.sqrt(fx) * np.sqrt(fy))), False


def pdcor(x, y, z) -> PartialDCorEstimate:
    """Bias-corrected partial distance correlation (n >= 4).

    Computes the three pairwise bias-corrected distance correlations and
    combines them like a partial product-moment correlation:
    (r_xy - r_xz * r_yz) / (sqrt(1 - r_xz^2) * sqrt(1 - r_yz^2)).
    """
    xa, ya = _paired(x, y, 4)
    _, za = _paired(x, z, 4)

    vx = _unbiased_from(_self_aggregates(xa))
    vy = _unbiased_from(_self_aggregates(ya))
    vz = _unbiased_from(_self_aggregates(za))

    def corr(u, v, vu, vv):
        if vu <= 0.0 or vv <= 0.0:
            return 0.0
        return float(_unbiased_from(fast_distance_aggregates(u, v)) / np.sqrt(vu * vv))

    r_xy = corr(xa, ya, vx, vy)
    r_xz = corr(xa, za, vx, vz)
    r_yz = corr(ya, za, vy, vz)
    value, degenerate = partial_from_components(r_xy, r_xz, r_yz)
    return PartialDCorEstimate(value, (r_xy, r_xz, r_yz), xa.size, degenerate)
