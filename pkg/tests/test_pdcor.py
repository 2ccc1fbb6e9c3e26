import numpy as np
import pytest

import oracles
from dcorkit.exceptions import DimensionMismatchError, SampleSizeError
from dcorkit.pdcor import partial_from_components, pdcor

X6 = np.array([0.1, 1.4, -0.7, 2.2, 0.9, -1.8])
Y6 = np.array([1.0, -0.3, 0.8, 2.5, -1.1, 0.4])
Z6 = np.array([0.6, 0.6, -1.2, 1.9, 0.0, -0.5])


def test_components_cancellation():
    value, degenerate = partial_from_components(0.06, 0.3, 0.2)
    assert value == pytest.approx(0.0, abs=1e-15)
    assert not degenerate


def test_components_guard():
    assert partial_from_components(0.5, 1.0, 0.2) == (0.0, True)
    assert partial_from_components(0.5, 0.2, -1.0) == (0.0, True)
    assert partial_from_components(0.5, 1.2, 0.0) == (0.0, True)


def test_components_plain_value():
    value, degenerate = partial_from_components(0.5, 0.5, 0.5)
    assert value == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert not degenerate


def test_six_point_golden():
    # frozen from the U-centered O(n^2) oracle
    est = pdcor(X6, Y6, Z6)
    assert est.value == pytest.approx(0.0656899203079439, rel=1e-10)
    assert est.n == 6
    assert not est.degenerate
    assert est.components[0] == pytest.approx(0.003976413338134255, rel=1e-10)


def test_matches_oracle_on_random_triples():
    g = np.random.default_rng(21)
    for n in (4, 6, 15, 60):
        for _ in range(3):
            x = g.standard_normal(n)
            y = 0.4 * x + g.standard_normal(n)
            z = 0.5 * x + 0.2 * y + g.standard_normal(n)
            est = pdcor(x, y, z)
            _, r_xz, r_yz = est.components
            if min(1.0 - r_xz**2, 1.0 - r_yz**2) < 1e-10:
                # knife edge: a denominator factor vanishes up to rounding, so
                # the quotient is noise; both routes must agree the value is ~0
                assert abs(est.value) < 1e-6
                assert abs(oracles.pdcor_naive(x, y, z)) < 1e-6
            else:
                assert est.value == pytest.approx(
                    oracles.pdcor_naive(x, y, z), rel=1e-9, abs=1e-12)


def test_symmetric_in_first_two_arguments():
    g = np.random.default_rng(22)
    x, y, z = (g.standard_normal(20) for _ in range(3))
    assert pdcor(x, y, z).value == pytest.approx(pdcor(y, x, z).value, rel=1e-12)


def test_constant_z_reduces_to_pairwise():
    g = np.random.default_rng(23)
    x, y = g.standard_normal(12), g.standard_normal(12)
    est = pdcor(x, y, np.full(12, 3.0))
    # constant z carries no signal: r_xz = r_yz = 0, value is plain r_xy
    assert est.components[1] == 0.0 and est.components[2] == 0.0
    assert est.value == pytest.approx(est.components[0], rel=1e-12)
    assert not est.degenerate


def test_z_equal_to_x_is_degenerate():
    g = np.random.default_rng(24)
    x, y = g.standard_normal(10), g.standard_normal(10)
    est = pdcor(x, y, x)
    assert est.degenerate
    assert est.value == 0.0
    assert est.components[1] == pytest.approx(1.0, rel=1e-12)


def test_validation():
    with pytest.raises(SampleSizeError):
        pdcor([1.0, 2, 3], [1.0, 2, 3], [1.0, 2, 3])
    with pytest.raises(DimensionMismatchError):
        pdcor([1.0, 2, 3, 4], [1.0, 2, 3, 4], [1.0, 2, 3])
