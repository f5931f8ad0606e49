"""Thin wrappers over the noise kernels plus a scalar integer hash."""

from __future__ import annotations

import numpy as np

from ecomarl import kernels

_MASK32 = 0xFFFFFFFF


def hash01(i: int, seed: int = 0) -> float:
    """Deterministic scalar hash of an index into [0, 1)."""
    h = ((i & _MASK32) * 0x8DA6B343 ^ (seed & _MASK32) * 0x9E3779B9) & _MASK32
    h ^= h >> 16
    h = (h * 0x7FEB352D) & _MASK32
    h ^= h >> 15
    h = (h * 0x846CA68B) & _MASK32
    h ^= h >> 16
    return h / 4294967296.0


def fbm2(x, y, seed: int, octaves: int = 4, lacunarity: float = 2.0, gain: float = 0.5) -> np.ndarray:
    return kernels.fbm2(x, y, seed, octaves, lacunarity, gain)


def fbm3(x, y, z, seed: int, octaves: int = 3, lacunarity: float = 2.0, gain: float = 0.5) -> np.ndarray:
    return kernels.fbm3(x, y, z, seed, octaves, lacunarity, gain)
