"""Command-line harness.

Subcommands: train, test, scale, dump-scales, export-field.
Exit codes: 0 success, 1 configuration error, 2 runtime failure.
The output root defaults to ./runs and can be overridden with the
ECOMARL_OUTPUT_ROOT environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from ecomarl import tasks
from ecomarl.core.errors import ConfigurationError, EcomarlError
from ecomarl.core.spaces import ENV_IDS


def _output_root(override: str | None) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get("ECOMARL_OUTPUT_ROOT", "runs"))


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecomarl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="run the train+test grid from a config file")
    train.add_argument("--config", required=True, type=Path)
    train.add_argument("--out", type=Path, default=None, help="output directory")
    train.add_argument("--repeats", type=int, default=3)
    train.add_argument("--max-steps", type=int, default=None, help="override training budget")
    train.add_argument("--tasks", type=_int_list, default=None, help="subset of task indices")
    train.add_argument("--scenarios", type=_int_list, default=None, help="subset of patterns/levels")
    train.add_argument("--workers", type=int, default=0, help="process pool size for grid cells")

    test = sub.add_parser("test", help="evaluate a checkpoint with test-mode settings")
    test.add_argument("--config", required=True, type=Path)
    test.add_argument("--checkpoint", required=True, type=Path)
    test.add_argument("--out", type=Path, default=None)
    test.add_argument("--max-steps", type=int, default=None)
    test.add_argument("--task", type=int, default=None)
    test.add_argument("--scenario", type=int, default=None)

    scale = sub.add_parser("scale", help="agent-count scalability protocol")
    scale.add_argument("--env", required=True, choices=ENV_IDS)
    scale.add_argument("--counts", required=True, type=_int_list)
    scale.add_argument("--steps", type=int, default=1000)
    scale.add_argument("--seed", type=int, default=5000)
    scale.add_argument("--out", type=Path, default=None)

    dump = sub.add_parser("dump-scales", help="print a task reward-scale matrix")
    dump.add_argument("--env", choices=ENV_IDS + ("all",), default="all")

    export = sub.add_parser("export-field", help="write a field/terrain sample as a text matrix")
    export.add_argument(
        "--kind",
        required=True,
        choices=["temperature", "humidity", "overcast", "wind-direction", "terrain"],
    )
    export.add_argument("--seed", required=True, type=int)
    export.add_argument("--level", type=int, default=5, help="terrain elevation level")
    export.add_argument("--resolution", type=int, default=65)
    export.add_argument("--t", dest="t", type=float, default=0.0, help="time step to sample")
    export.add_argument("--out", type=Path, default=None)
    return parser


def cmd_train(args) -> int:
    from ecomarl.harness.rungrid import run_grid

    out_dir = _output_root(args.out)
    aggregate = run_grid(
        args.config,
        out_dir,
        repeats=args.repeats,
        max_steps=args.max_steps,
        workers=args.workers,
        tasks=args.tasks,
        scenarios=args.scenarios,
    )
    print(f"aggregate written to {aggregate}")
    return 0


def cmd_test(args) -> int:
    from ecomarl.harness.config import parse_config_file
    from ecomarl.harness.rungrid import run_single

    run = parse_config_file(args.config, mode="test")
    out_dir = _output_root(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    task = args.task if args.task is not None else run.tasks[0]
    scenario = args.scenario if args.scenario is not None else run.scenarios[0]
    csv_path = run_single(
        run,
        task,
        scenario,
        repeat=0,
        mode="test",
        out_dir=out_dir,
        max_steps=args.max_steps,
        checkpoint=args.checkpoint,
    )
    print(f"test metrics written to {csv_path}")
    return 0


def cmd_scale(args) -> int:
    from ecomarl.harness.scalability import run_scalability

    out = args.out or (_output_root(None) / f"scalability_{args.env}.csv")
    path = run_scalability(args.env, args.counts, out, steps=args.steps, seed=args.seed)
    print(path.read_text(), end="")
    print(f"scalability table written to {path}")
    return 0


def cmd_dump_scales(args) -> int:
    env_ids = ENV_IDS if args.env == "all" else (args.env,)
    chunks = [tasks.format_scale_table(env_id) for env_id in env_ids]
    print("\n".join(chunks), end="")
    return 0


def cmd_export_field(args) -> int:
    from ecomarl.worldgen.export import write_matrix
    from ecomarl.worldgen.fields import ScalarField, WindField
    from ecomarl.worldgen.terrain import generate_terrain

    out = args.out or (_output_root(None) / f"field_{args.kind}_seed{args.seed}.txt")
    if args.kind == "terrain":
        grid = generate_terrain(args.level, args.seed, resolution=args.resolution)
        matrix = grid.heights
    else:
        xs = np.linspace(-750.0, 750.0, args.resolution)
        gx, gy = np.meshgrid(xs, xs)
        if args.kind == "wind-direction":
            matrix = WindField.create(args.seed).bearing(gx, gy, args.t)
        else:
            field = ScalarField(
                kind=args.kind, seed=args.seed, spatial_scale=500.0, temporal_scale=400.0,
                lo=0.0, hi=1.0,
            )
            matrix = field.sample(gx, gy, args.t)
    path = write_matrix(out, matrix)
    print(f"matrix written to {path}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "test": cmd_test,
    "scale": cmd_scale,
    "dump-scales": cmd_dump_scales,
    "export-field": cmd_export_field,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except EcomarlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
