"""Seeded entity scattering: forest trees and floating trash.

Trash forms cluster blobs (most pebbles sit near a cluster center).
Forests thin out and concentrate along mid elevations as the terrain
level rises: steep worlds have sparser, ridge-hugging tree cover.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ecomarl.worldgen.terrain import TerrainGrid

TRASH_COUNT = 400
TRASH_CLUSTERS = 6
TRASH_CLUSTER_SIGMA = 9.0
TRASH_BACKGROUND_FRACTION = 0.10

_FOREST_BASE_CANDIDATES = 520
_FOREST_CANDIDATE_DROP = 30  # fewer candidate sites per elevation level


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tag])))


def scatter_trash(seed: int, half_extent: float = 200.0, count: int = TRASH_COUNT) -> np.ndarray:
    """Pebble positions: seeded mixture of Gaussian blobs plus sparse background."""
    rng = _rng(seed, 11)
    centers = rng.uniform(-0.75 * half_extent, 0.75 * half_extent, size=(TRASH_CLUSTERS, 2))
    n_background = int(round(count * TRASH_BACKGROUND_FRACTION))
    n_clustered = count - n_background
    which = rng.integers(0, TRASH_CLUSTERS, size=n_clustered)
    offsets = rng.normal(0.0, TRASH_CLUSTER_SIGMA, size=(n_clustered, 2))
    clustered = centers[which] + offsets
    background = rng.uniform(-0.95 * half_extent, 0.95 * half_extent, size=(n_background, 2))
    pts = np.concatenate([clustered, background], axis=0)
    return np.clip(pts, -(half_extent - 1.0), half_extent - 1.0)


def trash_cluster_centers(seed: int, half_extent: float = 200.0) -> np.ndarray:
    """The cluster centers the same seed scatters around (for calibration checks)."""
    rng = _rng(seed, 11)
    return rng.uniform(-0.75 * half_extent, 0.75 * half_extent, size=(TRASH_CLUSTERS, 2))


def scatter_forest(
    seed: int, terrain: TerrainGrid, half_extent: Optional[float] = None
) -> np.ndarray:
    """Tree positions on the terrain.

    Candidate sites are filtered by an elevation-band acceptance rule whose
    concentration grows with the terrain level, yielding fewer trees overall
    and a band of forest along the mid elevations of rugged worlds.
    """
    level = terrain.elevation_level
    if half_extent is None:
        half_extent = terrain.half_extent
    rng = _rng(seed, 13)
    n_candidates = _FOREST_BASE_CANDIDATES - _FOREST_CANDIDATE_DROP * (level - 1)
    pts = rng.uniform(-half_extent, half_extent, size=(n_candidates, 2))
    h = terrain.height_at(pts[:, 0], pts[:, 1])
    h_max = float(terrain.heights.max())
    h_norm = h / h_max if h_max > 0 else np.zeros_like(h)
    concentration = (level - 1) / 9.0
    band = np.exp(-((h_norm - 0.5) ** 2) / (2.0 * 0.16**2))
    accept_p = (1.0 - concentration) * 0.85 + concentration * 0.75 * band
    keep = rng.random(n_candidates) < accept_p
    return pts[keep]
