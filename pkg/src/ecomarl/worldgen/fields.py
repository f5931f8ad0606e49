"""Seeded scalar fields: smooth functions of (position, time).

Fields are pure functions -- no internal state advances -- so a field
sample depends only on (kind, seed, position, step) and replays exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ecomarl.worldgen import noise

FIELD_KINDS = ("wind-direction", "temperature", "humidity", "overcast")

# keeps the per-kind noise lattices decorrelated for one base seed;
# spaced far enough apart that per-octave seed offsets never collide
_KIND_SEED_OFFSET = {
    "wind-direction": 0x10,
    "temperature": 0x20,
    "humidity": 0x30,
    "overcast": 0x40,
}


@dataclass(frozen=True)
class ScalarField:
    """Smooth seeded field with values in [lo, hi].

    ``spatial_scale`` is the feature size in meters, ``temporal_scale``
    the feature duration in steps. ``half_extent``, when given, clamps
    query positions to the env bounds.
    """

    kind: str
    seed: int
    spatial_scale: float
    temporal_scale: float
    lo: float
    hi: float
    octaves: int = 3
    half_extent: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.spatial_scale <= 0 or self.temporal_scale <= 0:
            raise ValueError("scales must be positive")

    @property
    def _noise_seed(self) -> int:
        return self.seed + _KIND_SEED_OFFSET[self.kind]

    def sample(self, x, y, t) -> np.ndarray:
        """Field value(s) at position (x, y) and step t, always in [lo, hi]."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if self.half_extent is not None:
            x = np.clip(x, -self.half_extent, self.half_extent)
            y = np.clip(y, -self.half_extent, self.half_extent)
        raw = noise.fbm3(
            x / self.spatial_scale,
            y / self.spatial_scale,
            np.asarray(t, dtype=np.float64) / self.temporal_scale,
            self._noise_seed,
            octaves=self.octaves,
        )
        return self.lo + (self.hi - self.lo) * raw


@dataclass(frozen=True)
class WindField:
    """Direction field: a seed-drawn base bearing plus smooth deviation.

    The deviation field drifts slowly in time and varies gently in space,
    so nearby probes see nearly the same wind.
    """

    angle: ScalarField
    base_bearing: float

    @classmethod
    def create(
        cls,
        seed: int,
        deviation: float = 0.5,
        spatial_scale: float = 400.0,
        temporal_scale: float = 1200.0,
        half_extent: Optional[float] = None,
    ) -> "WindField":
        base = 2.0 * np.pi * noise.hash01(1, seed) - np.pi
        field = ScalarField(
            kind="wind-direction",
            seed=seed,
            spatial_scale=spatial_scale,
            temporal_scale=temporal_scale,
            lo=base - deviation,
            hi=base + deviation,
            half_extent=half_extent,
        )
        return cls(angle=field, base_bearing=base)

    def bearing(self, x, y, t) -> np.ndarray:
        return self.angle.sample(x, y, t)

    def direction(self, x, y, t) -> np.ndarray:
        """Unit direction vector(s), shape (..., 2)."""
        a = self.bearing(x, y, t)
        return np.stack([np.cos(a), np.sin(a)], axis=-1)


def weather_fields(seed: int, half_extent: Optional[float] = None) -> dict[str, ScalarField]:
    """Temperature/humidity/overcast bundle shared by the fire scenarios."""
    out = {}
    for kind in ("temperature", "humidity", "overcast"):
        out[kind] = ScalarField(
            kind=kind,
            seed=seed,
            spatial_scale=500.0,
            temporal_scale=400.0,
            lo=0.0,
            hi=1.0,
            half_extent=half_extent,
        )
    return out
