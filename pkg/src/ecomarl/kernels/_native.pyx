# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels, bitwise-equivalent to ecomarl.kernels.reference.

Every arithmetic expression mirrors the numpy backend's evaluation order;
the extension is compiled with -ffp-contract=off so no FMA contraction can
change results. Keep the two files in sync op for op.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()

cdef double INV_2_32 = 1.0 / 4294967296.0

cdef unsigned int C1 = 0x8DA6B343u
cdef unsigned int C2 = 0xD8163841u
cdef unsigned int C3 = 0xCB1AB31Fu
cdef unsigned int CS = 0x9E3779B9u
cdef unsigned int M1 = 0x7FEB352Du
cdef unsigned int M2 = 0x846CA68Bu


cdef inline unsigned int _mix(unsigned int h) nogil:
    h = h ^ (h >> 16)
    h = h * M1
    h = h ^ (h >> 15)
    h = h * M2
    h = h ^ (h >> 16)
    return h


cdef inline double _lattice(long long ix, long long iy, long long iz, unsigned int seed) nogil:
    cdef unsigned int h = (
        (<unsigned int> ix) * C1
        ^ (<unsigned int> iy) * C2
        ^ (<unsigned int> iz) * C3
        ^ seed * CS
    )
    return (<double> _mix(h)) * INV_2_32


cdef inline double _fade(double t) nogil:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


cdef inline double _lerp(double a, double b, double t) nogil:
    return a + t * (b - a)


cdef inline double _noise3(double x, double y, double z, unsigned int seed) nogil:
    cdef double x0 = floor(x)
    cdef double y0 = floor(y)
    cdef double z0 = floor(z)
    cdef double fx = x - x0
    cdef double fy = y - y0
    cdef double fz = z - z0
    cdef long long ix = <long long> x0
    cdef long long iy = <long long> y0
    cdef long long iz = <long long> z0

    cdef double v000 = _lattice(ix, iy, iz, seed)
    cdef double v100 = _lattice(ix + 1, iy, iz, seed)
    cdef double v010 = _lattice(ix, iy + 1, iz, seed)
    cdef double v110 = _lattice(ix + 1, iy + 1, iz, seed)
    cdef double v001 = _lattice(ix, iy, iz + 1, seed)
    cdef double v101 = _lattice(ix + 1, iy, iz + 1, seed)
    cdef double v011 = _lattice(ix, iy + 1, iz + 1, seed)
    cdef double v111 = _lattice(ix + 1, iy + 1, iz + 1, seed)

    cdef double u = _fade(fx)
    cdef double v = _fade(fy)
    cdef double w = _fade(fz)

    cdef double a = _lerp(_lerp(v000, v100, u), _lerp(v010, v110, u), v)
    cdef double b = _lerp(_lerp(v001, v101, u), _lerp(v011, v111, u), v)
    return _lerp(a, b, w)


cdef unsigned int _seed32(unsigned long long seed):
    return <unsigned int> (seed & 0xFFFFFFFFULL)


def noise3(x, y, z, unsigned long long seed):
    xb, yb, zb = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64),
        np.asarray(y, dtype=np.float64),
        np.asarray(z, dtype=np.float64),
    )
    shape = xb.shape
    cdef const double[::1] xv = np.ascontiguousarray(xb).ravel()
    cdef const double[::1] yv = np.ascontiguousarray(yb).ravel()
    cdef const double[::1] zv = np.ascontiguousarray(zb).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef unsigned int s = _seed32(seed)
    cdef Py_ssize_t i
    for i in range(n):
        ov[i] = _noise3(xv[i], yv[i], zv[i], s)
    return out.reshape(shape)


def fbm3(x, y, z, unsigned long long seed, int octaves, double lacunarity, double gain):
    xb, yb, zb = np.broadcast_arrays(
        np.asarray(x, dtype=np.float64),
        np.asarray(y, dtype=np.float64),
        np.asarray(z, dtype=np.float64),
    )
    shape = xb.shape
    cdef const double[::1] xv = np.ascontiguousarray(xb).ravel()
    cdef const double[::1] yv = np.ascontiguousarray(yb).ravel()
    cdef const double[::1] zv = np.ascontiguousarray(zb).ravel()
    cdef Py_ssize_t n = xv.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double amp, freq, norm, total
    cdef unsigned int s
    cdef Py_ssize_t i
    cdef int o
    for i in range(n):
        total = 0.0
        amp = 1.0
        freq = 1.0
        norm = 0.0
        for o in range(octaves):
            s = _seed32(seed + <unsigned long long> o)
            total = total + amp * _noise3(xv[i] * freq, yv[i] * freq, zv[i] * freq, s)
            norm += amp
            amp *= gain
            freq *= lacunarity
        ov[i] = total / norm
    return out.reshape(shape)


def fbm2(x, y, unsigned long long seed, int octaves, double lacunarity, double gain):
    xa = np.asarray(x, dtype=np.float64)
    return fbm3(xa, np.asarray(y, dtype=np.float64), np.zeros_like(xa), seed, octaves, lacunarity, gain)


def raster_counts(px, py, double cx, double cy, double fx, double fy, int res, double cell_size):
    cdef const double[::1] pxv = np.ascontiguousarray(np.asarray(px, dtype=np.float64)).ravel()
    cdef const double[::1] pyv = np.ascontiguousarray(np.asarray(py, dtype=np.float64)).ravel()
    cdef Py_ssize_t n = pxv.shape[0]
    counts = np.zeros((res, res), dtype=np.int64)
    cdef long long[:, ::1] cv = counts
    cdef int half = res // 2
    cdef double dx, dy, fwd, right
    cdef long long row, col
    cdef Py_ssize_t i
    for i in range(n):
        dx = pxv[i] - cx
        dy = pyv[i] - cy
        fwd = dx * fx + dy * fy
        right = dx * fy - dy * fx
        row = (<long long> floor(fwd / cell_size)) + half
        col = (<long long> floor(right / cell_size)) + half
        if 0 <= row < res and 0 <= col < res:
            cv[row, col] += 1
    return counts


def gae_backward(rewards, values, dones, double gamma, double lam, double bootstrap):
    cdef const double[::1] rv = np.ascontiguousarray(np.asarray(rewards, dtype=np.float64))
    cdef const double[::1] vv = np.ascontiguousarray(np.asarray(values, dtype=np.float64))
    cdef const unsigned char[::1] dv = np.ascontiguousarray(np.asarray(dones) != 0).view(np.uint8)
    cdef Py_ssize_t n = rv.shape[0]
    adv = np.empty(n, dtype=np.float64)
    cdef double[::1] av = adv
    cdef double last = 0.0
    cdef double nonterminal, next_value, delta
    cdef Py_ssize_t t
    for t in range(n - 1, -1, -1):
        nonterminal = 0.0 if dv[t] else 1.0
        next_value = bootstrap if t == n - 1 else vv[t + 1]
        delta = rv[t] + gamma * next_value * nonterminal - vv[t]
        last = delta + gamma * lam * nonterminal * last
        av[t] = last
    return adv
