"""Splittable, counter-based seed streams.

Every random decision in the package is keyed by a path of integers
(trial id, position in the recursion, ...) below a root seed, so that
subgraph samples are independent of each other and reproducible in
isolation.
"""
from __future__ import annotations

import numpy as np


class SeedStream:
    """A node in a tree of seeds: ``SeedStream(seed).child(trial, 3, 7)``."""

    __slots__ = ("seed", "key")

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)

    def child(self, *key: int) -> SeedStream:
        return SeedStream(self.seed, self.key + key)

    def _sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=self.key)

    def generator(self) -> np.random.Generator:
        """Philox generator keyed by this node."""
        return np.random.Generator(np.random.Philox(self._sequence()))

    def bits(self, count: int) -> tuple[int, ...]:
        """``count`` (<= 32) fair bits derived directly from this node's key."""
        if not 0 <= count <= 32:
            raise ValueError("at most 32 bits per node")
        word = int(self._sequence().generate_state(1, dtype=np.uint32)[0])
        return tuple((word >> i) & 1 for i in range(count))

    def __repr__(self) -> str:
        return f"SeedStream({self.seed}, {self.key})"
