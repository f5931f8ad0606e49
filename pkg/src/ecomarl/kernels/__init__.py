"""Kernel backend selection: compiled extension if present, numpy otherwise.

Set ``ECOMARL_KERNELS=reference`` to force the numpy backend (e.g. for
benchmark baselines) or ``ECOMARL_KERNELS=native`` to fail loudly when the
extension is missing. Both backends are bitwise-equivalent.
"""

from __future__ import annotations

import importlib
import os

from ecomarl.kernels import reference

_requested = os.environ.get("ECOMARL_KERNELS", "").strip().lower()

_native = None
if _requested != "reference":
    try:
        _native = importlib.import_module("ecomarl.kernels._native")
    except ImportError:
        _native = None
        if _requested == "native":
            raise ImportError(
                "ECOMARL_KERNELS=native requested but the compiled extension "
                "is not available; reinstall with a C toolchain present"
            ) from None

if _native is not None:
    BACKEND = "native"
    noise3 = _native.noise3
    fbm2 = _native.fbm2
    fbm3 = _native.fbm3
    raster_counts = _native.raster_counts
    gae_backward = _native.gae_backward
else:
    BACKEND = "reference"
    noise3 = reference.noise3
    fbm2 = reference.fbm2
    fbm3 = reference.fbm3
    raster_counts = reference.raster_counts
    gae_backward = reference.gae_backward

__all__ = [
    "BACKEND",
    "noise3",
    "fbm2",
    "fbm3",
    "raster_counts",
    "gae_backward",
    "reference",
]
