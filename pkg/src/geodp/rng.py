"""Deterministic, counter-addressable random streams.

An ``RngState`` names a stream by a (seed, counter) pair.  Distinct
counters under one seed give statistically independent streams, so
parallel workers can be handed disjoint counters and still reproduce a
single-threaded run bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngState:
    seed: int
    counter: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator for this (seed, counter) pair.

        Every call returns an identical stream; callers own the
        generator and never share it across threads.
        """
        ss = np.random.SeedSequence((self.seed & _MASK64, self.counter & _MASK64))
        return np.random.Generator(np.random.PCG64(ss))

    def with_counter(self, counter: int) -> "RngState":
        return RngState(self.seed, counter)
