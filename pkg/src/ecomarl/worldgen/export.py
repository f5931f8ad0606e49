"""Plain-text export of grids and field samples for visual inspection."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def write_matrix(path: str | Path, matrix: np.ndarray, fmt: str = "%.6g") -> Path:
    """Write a 2D array as row-major, space-separated text."""
    path = Path(path)
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2D array, got shape {matrix.shape}")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        for row in matrix:
            fh.write(" ".join(fmt % v for v in row))
            fh.write("\n")
    return path
