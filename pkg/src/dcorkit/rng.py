"""Deterministic random-number streams.

A stream is addressed by (seed, stream_index). Distinct indices under the same
seed yield statistically independent generators, so simulation cells can draw
in parallel without sharing state. Construction is cheap; generators are not
cached.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError


@dataclass(frozen=True)
class RngStream:
    """Address of a reproducible generator.

    Parameters
    ----------
    seed : int
        Nonnegative base seed shared by a whole run.
    stream_index : int
        Nonnegative substream index; distinct indices give independent streams.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ParameterError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if not isinstance(self.stream_index, (int, np.integer)) or self.stream_index < 0:
            raise ParameterError(
                f"stream_index must be a nonnegative integer, got {self.stream_index!r}"
            )

    def generator(self) -> np.random.Generator:
        """Return a fresh Generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_index),))
        return np.random.default_rng(ss)

    def child(self, offset: int) -> "RngStream":
        """Stream at ``stream_index + offset`` under the same seed."""
        return RngStream(self.seed, self.stream_index + offset)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream or a ready Generator; return a Generator."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ParameterError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def derive_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit seed for a namespaced subcomponent of a run."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])
