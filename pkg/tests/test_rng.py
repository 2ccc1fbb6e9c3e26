import numpy as np
import pytest

from dcorkit.exceptions import ParameterError
from dcorkit.rng import RngStream, as_generator, derive_seed


def test_same_stream_same_draws():
    a = RngStream(11, 3).generator().standard_normal(16)
    b = RngStream(11, 3).generator().standard_normal(16)
    assert np.array_equal(a, b)


def test_distinct_indices_distinct_draws():
    a = RngStream(11, 0).generator().standard_normal(16)
    b = RngStream(11, 1).generator().standard_normal(16)
    assert not np.array_equal(a, b)


def test_distinct_seeds_distinct_draws():
    a = RngStream(1, 0).generator().standard_normal(16)
    b = RngStream(2, 0).generator().standard_normal(16)
    assert not np.array_equal(a, b)


def test_child_offsets_index():
    s = RngStream(5, 10)
    assert s.child(4) == RngStream(5, 14)
    assert s.child(0) == s


def test_generator_is_fresh_each_call():
    s = RngStream(7, 1)
    first = s.generator().standard_normal(8)
    again = s.generator().standard_normal(8)
    assert np.array_equal(first, again)


@pytest.mark.parametrize("bad", [-1, 1.5, "3", None])
def test_rejects_bad_seed(bad):
    with pytest.raises(ParameterError):
        RngStream(bad, 0)


@pytest.mark.parametrize("bad", [-2, 0.5, "0"])
def test_rejects_bad_stream_index(bad):
    with pytest.raises(ParameterError):
        RngStream(0, bad)


def test_as_generator_accepts_both():
    g = np.random.default_rng(0)
    assert as_generator(g) is g
    assert isinstance(as_generator(RngStream(0)), np.random.Generator)
    with pytest.raises(ParameterError):
        as_generator(42)


def test_derive_seed_deterministic_and_keyed():
    assert derive_seed(9, 1, 2) == derive_seed(9, 1, 2)
    assert derive_seed(9, 1, 2) != derive_seed(9, 2, 1)
    assert derive_seed(9, 1) != derive_seed(10, 1)
    assert 0 <= derive_seed(0) < 2**64
