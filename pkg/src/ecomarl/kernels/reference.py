"""Numpy reference implementation of the hot per-step kernels.

The compiled backend in ``_native.pyx`` mirrors these functions operation
for operation (same IEEE double arithmetic, same evaluation order, FMA
contraction disabled), so both backends produce bitwise-identical output.
That equivalence is load-bearing: episode streams must not depend on
which backend an installation ended up with.
"""

from __future__ import annotations

import numpy as np

_INV_2_32 = 1.0 / 4294967296.0

_C1 = np.uint32(0x8DA6B343)
_C2 = np.uint32(0xD8163841)
_C3 = np.uint32(0xCB1AB31F)
_CS = np.uint32(0x9E3779B9)
_M1 = np.uint32(0x7FEB352D)
_M2 = np.uint32(0x846CA68B)
_S16 = np.uint32(16)
_S15 = np.uint32(15)


def _mix(h: np.ndarray) -> np.ndarray:
    h = h ^ (h >> _S16)
    h = h * _M1
    h = h ^ (h >> _S15)
    h = h * _M2
    h = h ^ (h >> _S16)
    return h


def _lattice(ix: np.ndarray, iy: np.ndarray, iz: np.ndarray, seed_term: np.uint32) -> np.ndarray:
    """Deterministic lattice value in [0, 1) from integer coordinates."""
    h = (
        ix.astype(np.uint32) * _C1
        ^ iy.astype(np.uint32) * _C2
        ^ iz.astype(np.uint32) * _C3
        ^ seed_term
    )
    return _mix(h).astype(np.float64) * _INV_2_32


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _lerp(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    return a + t * (b - a)


def noise3(x: np.ndarray, y: np.ndarray, z: np.ndarray, seed: int) -> np.ndarray:
    """Smooth value noise in [0, 1), trilinearly interpolated on a hashed lattice."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    x0 = np.floor(x)
    y0 = np.floor(y)
    z0 = np.floor(z)
    fx = x - x0
    fy = y - y0
    fz = z - z0
    ix = x0.astype(np.int64)
    iy = y0.astype(np.int64)
    iz = z0.astype(np.int64)
    one = np.int64(1)
    # masked python-int product sidesteps numpy scalar-overflow warnings
    seed_term = np.uint32(((int(seed) & 0xFFFFFFFF) * 0x9E3779B9) & 0xFFFFFFFF)

    v000 = _lattice(ix, iy, iz, seed_term)
    v100 = _lattice(ix + one, iy, iz, seed_term)
    v010 = _lattice(ix, iy + one, iz, seed_term)
    v110 = _lattice(ix + one, iy + one, iz, seed_term)
    v001 = _lattice(ix, iy, iz + one, seed_term)
    v101 = _lattice(ix + one, iy, iz + one, seed_term)
    v011 = _lattice(ix, iy + one, iz + one, seed_term)
    v111 = _lattice(ix + one, iy + one, iz + one, seed_term)

    u = _fade(fx)
    v = _fade(fy)
    w = _fade(fz)

    a = _lerp(_lerp(v000, v100, u), _lerp(v010, v110, u), v)
    b = _lerp(_lerp(v001, v101, u), _lerp(v011, v111, u), v)
    return _lerp(a, b, w)


def fbm3(
    x: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    seed: int,
    octaves: int,
    lacunarity: float,
    gain: float,
) -> np.ndarray:
    """Fractal sum of ``octaves`` noise3 layers, normalized into [0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    total = np.zeros(np.broadcast(x, y, z).shape, dtype=np.float64)
    amp = 1.0
    freq = 1.0
    norm = 0.0
    for o in range(octaves):
        total = total + amp * noise3(x * freq, y * freq, z * freq, seed + o)
        norm += amp
        amp *= gain
        freq *= lacunarity
    return total / norm


def fbm2(
    x: np.ndarray, y: np.ndarray, seed: int, octaves: int, lacunarity: float, gain: float
) -> np.ndarray:
    """2D fractal value noise: fbm3 on the z=0 plane."""
    x = np.asarray(x, dtype=np.float64)
    return fbm3(x, np.asarray(y, dtype=np.float64), np.zeros_like(x), seed, octaves, lacunarity, gain)


def raster_counts(
    px: np.ndarray,
    py: np.ndarray,
    cx: float,
    cy: float,
    fx: float,
    fy: float,
    res: int,
    cell_size: float,
) -> np.ndarray:
    """Bin points into an egocentric grid centered on (cx, cy), aligned to heading (fx, fy).

    Row index grows toward the heading, column index toward the right-hand
    side. Returns (res, res) int64 counts; points falling outside the
    window are dropped.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    dx = px - cx
    dy = py - cy
    fwd = dx * fx + dy * fy
    right = dx * fy - dy * fx
    half = res // 2
    rows = np.floor(fwd / cell_size).astype(np.int64) + half
    cols = np.floor(right / cell_size).astype(np.int64) + half
    ok = (rows >= 0) & (rows < res) & (cols >= 0) & (cols < res)
    counts = np.zeros((res, res), dtype=np.int64)
    np.add.at(counts, (rows[ok], cols[ok]), 1)
    return counts


def gae_backward(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    lam: float,
    bootstrap: float,
) -> np.ndarray:
    """Backward GAE recursion with resets at episode boundaries.

    ``values[t]`` is V(s_t); ``bootstrap`` is V(s_T) for a rollout cut
    mid-episode (ignored when the final transition is terminal).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones)
    n = rewards.shape[0]
    adv = np.empty(n, dtype=np.float64)
    last = 0.0
    for t in range(n - 1, -1, -1):
        nonterminal = 0.0 if dones[t] else 1.0
        next_value = bootstrap if t == n - 1 else values[t + 1]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        last = delta + gamma * lam * nonterminal * last
        adv[t] = last
    return adv
