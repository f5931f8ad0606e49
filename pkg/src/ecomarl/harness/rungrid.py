"""Train/test orchestration over the (task x scenario x repeat) grid.

Every grid cell trains with a train seed, then evaluates with a distinct
test seed. Completed cells are skipped when their output files already
exist, so an interrupted grid resumes where it stopped. Cell failures are
recorded and the grid continues.
"""

from __future__ import annotations

import dataclasses
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from ecomarl.core.spaces import EnvConfig
from ecomarl.harness.config import RunConfig, parse_config_file
from ecomarl.harness.metrics import (
    MetricsRow,
    MetricsWriter,
    mean_and_sample_std,
    read_final_rows,
    write_aggregate,
    write_summary,
)
from ecomarl.ppo.trainer import Trainer


def _cell_name(env_id: str, task: int, scenario, repeat: int, mode: str) -> str:
    scen = "none" if scenario is None else scenario
    return f"{env_id}_task{task}_scen{scen}_rep{repeat}_{mode}"


def run_single(
    run: RunConfig,
    task: int,
    scenario: Optional[int],
    repeat: int,
    mode: str,
    out_dir: Path,
    max_steps: Optional[int] = None,
    checkpoint: Optional[Path] = None,
) -> Path:
    """One train or test run; writes its metrics CSV and returns the path."""
    name = _cell_name(run.env_id, task, scenario, repeat, mode)
    csv_path = out_dir / f"{name}.csv"

    trainer_cfg = dataclasses.replace(run.trainer)
    base_seed = run.seed if mode == "train" else run.test_seed
    trainer_cfg.seed = base_seed + repeat
    if max_steps is not None:
        trainer_cfg.max_steps = max_steps
    if mode == "test":
        trainer_cfg.learning_rate = 0.0
        trainer_cfg.learning_rate_schedule = "constant"

    env_cfg = EnvConfig(
        env_id=run.env_id, task=task, level_or_pattern=scenario, seed=trainer_cfg.seed
    )
    trainer = Trainer(trainer_cfg, env_cfg)
    if checkpoint is not None:
        trainer.load_checkpoint(checkpoint)
        trainer.global_step = 0

    with MetricsWriter(csv_path) as writer:
        def on_summary(row):
            writer.write(
                MetricsRow(
                    env=run.env_id,
                    task=task,
                    scenario=scenario,
                    mode=mode,
                    repeat=repeat,
                    seed=trainer_cfg.seed,
                    step=row.step,
                    cumulative_reward=row.mean_episode_reward,
                    env_metric=row.env_metric,
                    wall_time=row.wall_time,
                )
            )

        trainer.train(on_summary)

    if mode == "train":
        trainer.save_checkpoint(out_dir / f"{name}.pt")
    return csv_path


def _run_cell(args) -> tuple[str, Optional[str]]:
    """(cell key, error message or None); used by the worker pool."""
    train_run, test_run, task, scenario, repeat, out_dir, max_steps = args
    key = _cell_name(train_run.env_id, task, scenario, repeat, "cell")
    env_id = train_run.env_id
    try:
        train_csv = out_dir / f"{_cell_name(env_id, task, scenario, repeat, 'train')}.csv"
        test_csv = out_dir / f"{_cell_name(env_id, task, scenario, repeat, 'test')}.csv"
        ckpt = out_dir / f"{_cell_name(env_id, task, scenario, repeat, 'train')}.pt"
        if not (train_csv.exists() and ckpt.exists()):
            run_single(train_run, task, scenario, repeat, "train", out_dir, max_steps)
        if not test_csv.exists():
            test_steps = max_steps if max_steps is None else max(max_steps // 10, 1)
            run_single(
                test_run, task, scenario, repeat, "test", out_dir, test_steps, checkpoint=ckpt
            )
        return key, None
    except Exception:  # noqa: BLE001 -- cell failures must not kill the grid
        return key, traceback.format_exc()


def grid_cells(
    tasks: list[int], scenarios: list[Optional[int]], repeats: int
) -> list[tuple[int, Optional[int], int]]:
    """All (task, scenario, repeat) cells of a grid, in run order."""
    return [
        (task, scenario, repeat)
        for task in tasks
        for scenario in scenarios
        for repeat in range(repeats)
    ]


def run_grid(
    config_path: str | Path,
    out_dir: str | Path,
    repeats: int = 3,
    max_steps: Optional[int] = None,
    workers: int = 0,
    tasks: Optional[list[int]] = None,
    scenarios: Optional[list[Optional[int]]] = None,
) -> Path:
    """Run the whole grid; returns the aggregate CSV path.

    The aggregate holds one row per run cell (task x scenario x repeat)
    carrying the final train and test metrics; summary.csv reduces those
    across repeats to a mean and a sample standard deviation.
    ``max_steps`` overrides the config's training budget (test runs get a
    tenth of it).
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_run = parse_config_file(config_path, mode="train")
    test_run = parse_config_file(config_path, mode="test")
    grid_tasks = tasks if tasks is not None else train_run.tasks
    grid_scenarios = scenarios if scenarios is not None else train_run.scenarios
    cells = grid_cells(grid_tasks, grid_scenarios, repeats)

    jobs = [
        (train_run, test_run, task, scenario, repeat, out_dir, max_steps)
        for task, scenario, repeat in cells
    ]
    failures: dict[str, str] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, err in pool.map(_run_cell, jobs):
                if err:
                    failures[key] = err
    else:
        for job in jobs:
            key, err = _run_cell(job)
            if err:
                failures[key] = err
    if failures:
        log = out_dir / "failures.log"
        log.write_text("\n\n".join(f"{k}\n{v}" for k, v in failures.items()))

    env_id = train_run.env_id
    rows = []
    for task, scenario, repeat in cells:
        train_final = read_final_rows(
            out_dir / f"{_cell_name(env_id, task, scenario, repeat, 'train')}.csv"
        )
        test_final = read_final_rows(
            out_dir / f"{_cell_name(env_id, task, scenario, repeat, 'test')}.csv"
        )
        if train_final is None and test_final is None:
            continue

        def _field(final, key):
            return "" if final is None else final[key]

        rows.append(
            {
                "env": env_id,
                "task": task,
                "scenario": "" if scenario is None else scenario,
                "repeat": repeat,
                "train_seed": _field(train_final, "seed"),
                "test_seed": _field(test_final, "seed"),
                "train_cumulative_reward": _field(train_final, "cumulative_reward"),
                "train_env_metric": _field(train_final, "env_metric"),
                "test_cumulative_reward": _field(test_final, "cumulative_reward"),
                "test_env_metric": _field(test_final, "env_metric"),
            }
        )
    aggregate_path = write_aggregate(out_dir / "aggregate.csv", rows)

    summary = []
    for task in grid_tasks:
        for scenario in grid_scenarios:
            cell_rows = [
                r
                for r in rows
                if r["task"] == task and r["scenario"] == ("" if scenario is None else scenario)
            ]
            for mode in ("train", "test"):
                finals = [
                    float(r[f"{mode}_cumulative_reward"])
                    for r in cell_rows
                    if r[f"{mode}_cumulative_reward"] != ""
                ]
                metrics = [
                    float(r[f"{mode}_env_metric"])
                    for r in cell_rows
                    if r[f"{mode}_env_metric"] != ""
                ]
                if not finals:
                    continue
                mean_r, std_r = mean_and_sample_std(finals)
                mean_m, std_m = mean_and_sample_std(metrics)
                summary.append(
                    {
                        "env": env_id,
                        "task": task,
                        "scenario": "" if scenario is None else scenario,
                        "mode": mode,
                        "repeats": len(finals),
                        "mean_cumulative_reward": f"{mean_r:.6g}",
                        "std_cumulative_reward": f"{std_r:.6g}",
                        "mean_env_metric": f"{mean_m:.6g}",
                        "std_env_metric": f"{std_m:.6g}",
                    }
                )
    write_summary(out_dir / "summary.csv", summary)
    return aggregate_path
