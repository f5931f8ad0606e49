"""Plot-ready CSV metrics with stable schema across environments."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

RUN_COLUMNS = [
    "env",
    "task",
    "scenario",
    "mode",
    "repeat",
    "seed",
    "step",
    "cumulative_reward",
    "env_metric",
    "wall_time",
]

AGGREGATE_COLUMNS = [
    "env",
    "task",
    "scenario",
    "repeat",
    "train_seed",
    "test_seed",
    "train_cumulative_reward",
    "train_env_metric",
    "test_cumulative_reward",
    "test_env_metric",
]

SUMMARY_COLUMNS = [
    "env",
    "task",
    "scenario",
    "mode",
    "repeats",
    "mean_cumulative_reward",
    "std_cumulative_reward",
    "mean_env_metric",
    "std_env_metric",
]


@dataclass
class MetricsRow:
    env: str
    task: int
    scenario: Optional[int]
    mode: str
    repeat: int
    seed: int
    step: int
    cumulative_reward: float
    env_metric: float
    wall_time: float

    def validate(self) -> "MetricsRow":
        for name in ("cumulative_reward", "env_metric", "wall_time"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite metric {name}")
        return self


class MetricsWriter:
    """Append-only CSV writer; one file per run."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(RUN_COLUMNS)
        self._last_step = -1

    def write(self, row: MetricsRow) -> None:
        row.validate()
        if row.step <= self._last_step:
            raise ValueError(f"steps must be increasing, got {row.step} after {self._last_step}")
        self._last_step = row.step
        self._writer.writerow(
            [
                row.env,
                row.task,
                "" if row.scenario is None else row.scenario,
                row.mode,
                row.repeat,
                row.seed,
                row.step,
                f"{row.cumulative_reward:.6g}",
                f"{row.env_metric:.6g}",
                f"{row.wall_time:.3f}",
            ]
        )
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "MetricsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def mean_and_sample_std(values: Iterable[float]) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (ddof=1; 0 for n=1)."""
    arr = np.asarray(list(values), dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
    return mean, std


def read_final_rows(path: str | Path) -> Optional[dict]:
    """Last metrics row of a run CSV, or None for an empty file."""
    path = Path(path)
    if not path.exists():
        return None
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    return rows[-1] if rows else None


def _write_rows(path: str | Path, rows: list[dict], columns: list[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_aggregate(path: str | Path, rows: list[dict]) -> Path:
    return _write_rows(path, rows, AGGREGATE_COLUMNS)


def write_summary(path: str | Path, rows: list[dict]) -> Path:
    return _write_rows(path, rows, SUMMARY_COLUMNS)
