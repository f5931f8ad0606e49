"""Procedural heightmaps parameterized by an elevation level.

Higher levels mean steeper, higher terrain with smaller features. The
height ceiling of 40 m is shared with the reward calculus (height-delta
rewards are bounded by it), so every generated grid stays within [0, 40].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecomarl.core.errors import ConfigurationError
from ecomarl.worldgen import noise

MAX_HEIGHT = 40.0
MIN_LEVEL, MAX_LEVEL = 1, 10


def _amplitude(level: int) -> float:
    # level 1 -> 12 m, level 10 -> 35.4 m peak height
    return MAX_HEIGHT * (0.30 + 0.065 * (level - 1))


def _feature_size(level: int, half_extent: float) -> float:
    # level 1 -> one broad hill per arena, level 10 -> ~4 ridges
    return 1.9 * half_extent / (1.0 + 0.30 * (level - 1))


def _gain(level: int) -> float:
    return 0.40 + 0.02 * (level - 1)


@dataclass(frozen=True)
class TerrainGrid:
    resolution: int
    cell_size: float
    heights: np.ndarray  # (resolution, resolution) node heights, meters
    elevation_level: int

    @property
    def half_extent(self) -> float:
        return 0.5 * self.cell_size * (self.resolution - 1)

    def height_at(self, x, y) -> np.ndarray:
        """Bilinear height at world coordinates; positions clamp to the grid."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        gx = np.clip((x + self.half_extent) / self.cell_size, 0.0, self.resolution - 1.000001)
        gy = np.clip((y + self.half_extent) / self.cell_size, 0.0, self.resolution - 1.000001)
        ix = gx.astype(np.int64)
        iy = gy.astype(np.int64)
        fx = gx - ix
        fy = gy - iy
        h = self.heights
        top = h[iy, ix] * (1.0 - fx) + h[iy, ix + 1] * fx
        bot = h[iy + 1, ix] * (1.0 - fx) + h[iy + 1, ix + 1] * fx
        return top * (1.0 - fy) + bot * fy

    def slope_magnitudes(self) -> np.ndarray:
        gy, gx = np.gradient(self.heights, self.cell_size)
        return np.sqrt(gx * gx + gy * gy)

    def mean_abs_slope(self) -> float:
        return float(self.slope_magnitudes().mean())


def generate_terrain(
    level: int, seed: int, resolution: int = 65, half_extent: float = 200.0
) -> TerrainGrid:
    """Deterministic heightmap for one (level, seed) pair."""
    if not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ConfigurationError(
            f"terrain level {level} out of range [{MIN_LEVEL}, {MAX_LEVEL}]"
        )
    xs = np.linspace(-half_extent, half_extent, resolution)
    gx, gy = np.meshgrid(xs, xs)
    scale = _feature_size(level, half_extent)
    raw = noise.fbm2(gx / scale, gy / scale, seed=seed, octaves=4, gain=_gain(level))
    lo, hi = float(raw.min()), float(raw.max())
    shaped = (raw - lo) / (hi - lo) if hi > lo else np.zeros_like(raw)
    heights = shaped * _amplitude(level)
    cell = 2.0 * half_extent / (resolution - 1)
    return TerrainGrid(resolution=resolution, cell_size=cell, heights=heights, elevation_level=level)
