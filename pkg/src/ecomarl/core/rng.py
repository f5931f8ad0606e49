"""Seeded random streams.

Each environment instance owns independent streams so that, e.g., world
generation draws never shift when dynamics consume a different number of
samples. Identical (seed, stream_id) pairs always replay the identical
draw sequence, on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STREAM_IDS = {
    "worldgen": 0,
    "dynamics": 1,
    "policy-init": 2,
}


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: str

    def __post_init__(self):
        if self.stream_id not in STREAM_IDS:
            raise ValueError(f"unknown stream_id {self.stream_id!r}; expected one of {sorted(STREAM_IDS)}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence([self.seed, STREAM_IDS[self.stream_id]])
        return np.random.Generator(np.random.PCG64(ss))


def worldgen_rng(seed: int) -> np.random.Generator:
    return RngStream(seed, "worldgen").generator()


def dynamics_rng(seed: int) -> np.random.Generator:
    return RngStream(seed, "dynamics").generator()


def policy_init_rng(seed: int) -> np.random.Generator:
    return RngStream(seed, "policy-init").generator()
