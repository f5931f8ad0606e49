"""Turbine layout patterns.

Patterns 0-7 are fixed shapes (seed-independent); pattern 8 draws
positions from the seed. Every pattern generalizes to any agent count
>= 1 so scalability runs can reuse them; shapes are rescaled into the
arena when a large count would overflow it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecomarl.core.errors import ConfigurationError
from ecomarl.worldgen.noise import hash01

PATTERN_NAMES = (
    "default",
    "grid",
    "chain",
    "circle",
    "square",
    "cross",
    "two_rows",
    "field",
    "random",
)

ARENA_HALF_EXTENT = 500.0
_FIT_LIMIT = 450.0  # positions are rescaled to stay inside this box
_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class LayoutPattern:
    pattern_id: int
    positions: np.ndarray  # (n, 2) meters


def _default(n: int) -> np.ndarray:
    k = np.arange(n, dtype=np.float64)
    r = 55.0 * np.sqrt(k + 1.0)
    a = k * _GOLDEN_ANGLE
    return np.stack([r * np.cos(a), r * np.sin(a)], axis=1)


def _grid(n: int, spacing: float = 90.0) -> np.ndarray:
    cols = int(np.ceil(np.sqrt(n)))
    rows = int(np.ceil(n / cols))
    pts = []
    for i in range(n):
        r, c = divmod(i, cols)
        pts.append((c * spacing, r * spacing))
    pts = np.asarray(pts, dtype=np.float64)
    return pts - pts.mean(axis=0)


def _chain(n: int, spacing: float = 70.0) -> np.ndarray:
    xs = (np.arange(n) - (n - 1) / 2.0) * spacing
    return np.stack([xs, np.zeros(n)], axis=1)


def _circle(n: int) -> np.ndarray:
    radius = max(120.0, 14.0 * n)
    a = 2.0 * np.pi * np.arange(n) / max(n, 1)
    return np.stack([radius * np.cos(a), radius * np.sin(a)], axis=1)


def _square(n: int, side: float = 320.0) -> np.ndarray:
    # evenly spaced walk along the perimeter, corner first
    perimeter = 4.0 * side
    d = perimeter * np.arange(n) / max(n, 1)
    pts = np.zeros((n, 2))
    half = side / 2.0
    for i, dist in enumerate(d):
        edge, off = int(dist // side), dist % side
        if edge == 0:
            pts[i] = (-half + off, -half)
        elif edge == 1:
            pts[i] = (half, -half + off)
        elif edge == 2:
            pts[i] = (half - off, half)
        else:
            pts[i] = (-half, half - off)
    return pts


def _cross(n: int, spacing: float = 75.0) -> np.ndarray:
    pts = [(0.0, 0.0)]
    arms = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    k = 0
    while len(pts) < n:
        ax, ay = arms[k % 4]
        dist = spacing * (k // 4 + 1)
        pts.append((ax * dist, ay * dist))
        k += 1
    return np.asarray(pts[:n], dtype=np.float64)


def _two_rows(n: int, spacing: float = 85.0, gap: float = 120.0) -> np.ndarray:
    top = (n + 1) // 2
    pts = []
    for i in range(top):
        pts.append(((i - (top - 1) / 2.0) * spacing, gap / 2.0))
    bottom = n - top
    for i in range(bottom):
        pts.append(((i - (bottom - 1) / 2.0) * spacing, -gap / 2.0))
    return np.asarray(pts, dtype=np.float64)


def _field(n: int, spacing: float = 95.0) -> np.ndarray:
    # jittered grid; jitter comes from an index hash, not the seed
    base = _grid(n, spacing)
    jitter = np.asarray(
        [
            (
                (hash01(2 * i, 77) * 2.0 - 1.0) * 0.28 * spacing,
                (hash01(2 * i + 1, 77) * 2.0 - 1.0) * 0.28 * spacing,
            )
            for i in range(n)
        ]
    )
    return base + jitter


def _random(n: int, seed: int, min_separation: float = 45.0) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 8])))
    pts: list[np.ndarray] = []
    while len(pts) < n:
        cand = rng.uniform(-_FIT_LIMIT, _FIT_LIMIT, size=2)
        if all(np.linalg.norm(cand - p) >= min_separation for p in pts):
            pts.append(cand)
    return np.asarray(pts)


def _fit(pts: np.ndarray) -> np.ndarray:
    extent = np.abs(pts).max(initial=0.0)
    if extent > _FIT_LIMIT:
        pts = pts * (_FIT_LIMIT / extent)
    return pts


def layout_turbines(pattern_id: int, seed: int, count: int = 8) -> LayoutPattern:
    if not 0 <= pattern_id <= 8:
        raise ConfigurationError(f"pattern {pattern_id} out of range [0, 8]")
    if count < 1:
        raise ConfigurationError("turbine count must be >= 1")
    if pattern_id == 0:
        pts = _default(count)
    elif pattern_id == 1:
        pts = _grid(count)
    elif pattern_id == 2:
        pts = _chain(count)
    elif pattern_id == 3:
        pts = _circle(count)
    elif pattern_id == 4:
        pts = _square(count)
    elif pattern_id == 5:
        pts = _cross(count)
    elif pattern_id == 6:
        pts = _two_rows(count)
    elif pattern_id == 7:
        pts = _field(count)
    else:
        pts = _random(count, seed)
    return LayoutPattern(pattern_id=pattern_id, positions=_fit(pts))
