"""Training-config reader.

Reads the experiment config format: a two-space-indented tree of
``key: value`` pairs with inline ``[a, b, c]`` lists. Trailing
``# testing: <value>`` comments carry the test-mode override for that key,
which is why this is a purpose-built reader rather than a stock YAML load:
the overrides live in comments and must survive parsing.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from typing import Any, Optional

from ecomarl.core.errors import ConfigurationError
from ecomarl.core.spaces import ENV_IDS, LEVEL_RANGE, PATTERN_RANGE, TASK_COUNTS
from ecomarl.ppo.trainer import CuriosityConfig, TrainerConfig

_ENV_PATH_HINTS = {
    "WindFarmControl": "wfc",
    "WildfireResourceManagement": "wrm",
    "OceanPlasticCollection": "opc",
    "DroneBasedReforestation": "dbr",
    "AerialWildfireSuppression": "aws",
}

_TESTING_RE = re.compile(r"testing:\s*(.+?)\s*$")

_KNOWN_KEYS = {
    "behaviors",
    "trainer_type",
    "hyperparameters",
    "batch_size",
    "buffer_size",
    "learning_rate",
    "beta",
    "epsilon",
    "lambd",
    "num_epoch",
    "learning_rate_schedule",
    "network_settings",
    "normalize",
    "hidden_units",
    "num_layers",
    "vis_encode_type",
    "reward_signals",
    "extrinsic",
    "gamma",
    "strength",
    "curiosity",
    "encoding_size",
    "keep_checkpoints",
    "max_steps",
    "time_horizon",
    "summary_freq",
    "threaded",
    "engine_settings",
    "no_graphics",
    "env_settings",
    "env_path",
    "env",
    "num_envs",
    "seed",
    "environment_parameters",
    "pattern",
    "terrain_level",
    "task",
}


class ParseError(ConfigurationError):
    """Malformed config document; message carries the line number."""


def _scalar(token: str, line_no: int) -> Any:
    token = token.strip()
    if token == "":
        raise ParseError(f"line {line_no}: missing value")
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    return token


def _value(token: str, line_no: int) -> Any:
    token = token.strip()
    if token.startswith("["):
        if not token.endswith("]"):
            raise ParseError(f"line {line_no}: unterminated list")
        inner = token[1:-1].strip()
        if not inner:
            return []
        return [_scalar(part, line_no) for part in inner.split(",")]
    return _scalar(token, line_no)


@dataclass
class ConfigDoc:
    tree: dict
    testing_overrides: dict[tuple[str, ...], Any] = field(default_factory=dict)


def parse_tree(text: str) -> ConfigDoc:
    """Parse the document into a nested dict plus test-mode overrides."""
    tree: dict = {}
    overrides: dict[tuple[str, ...], Any] = {}
    # stack of (indent, mapping) with the path taken to reach it
    stack: list[tuple[int, dict, tuple[str, ...]]] = [(-1, tree, ())]

    for line_no, raw in enumerate(text.splitlines(), start=1):
        if "\t" in raw:
            raise ParseError(f"line {line_no}: tabs are not allowed; indent with two spaces")
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2 != 0:
            raise ParseError(f"line {line_no}: indentation must be a multiple of two spaces")

        comment = None
        body = raw
        if "#" in raw:
            body, comment = raw.split("#", 1)
        if ":" not in body:
            raise ParseError(f"line {line_no}: expected 'key: value'")
        key, _, rest = body.strip().partition(":")
        key = key.strip()
        if not key:
            raise ParseError(f"line {line_no}: empty key")

        while stack and indent <= stack[-1][0]:
            stack.pop()
        if not stack:
            raise ParseError(f"line {line_no}: bad indentation")
        parent_indent, parent, parent_path = stack[-1]
        if indent != parent_indent + 2 and parent_indent != -1:
            raise ParseError(f"line {line_no}: indent jumps from {parent_indent} to {indent}")

        path = parent_path + (key,)
        if rest.strip():
            parent[key] = _value(rest, line_no)
            if comment:
                m = _TESTING_RE.search(comment)
                if m:
                    overrides[path] = _value(m.group(1), line_no)
        else:
            child: dict = {}
            parent[key] = child
            stack.append((indent, child, path))
    return ConfigDoc(tree=tree, testing_overrides=overrides)


@dataclass
class RunConfig:
    """One experiment grid: trainer settings plus the scenario axes."""

    env_id: str
    tasks: list[int]
    scenarios: list[Optional[int]]
    trainer: TrainerConfig
    seed: int
    test_seed: int
    num_envs: int
    mode: str = "train"


def _get(tree: dict, *path, default=None):
    node = tree
    for key in path:
        if not isinstance(node, dict) or key not in node:
            return default
        node = node[key]
    return node


def _warn_unknown_keys(tree: dict, path: tuple[str, ...] = ()) -> None:
    for key, value in tree.items():
        if key not in _KNOWN_KEYS and key != "Agent":
            warnings.warn(f"unknown config key {'.'.join(path + (key,))!r}", stacklevel=2)
        if isinstance(value, dict):
            _warn_unknown_keys(value, path + (key,))


def _apply_overrides(tree: dict, overrides: dict[tuple[str, ...], Any]) -> dict:
    import copy

    out = copy.deepcopy(tree)
    for path, value in overrides.items():
        node = out
        for key in path[:-1]:
            node = node.setdefault(key, {})
        node[path[-1]] = value
    return out


def _detect_env_id(tree: dict) -> str:
    env = _get(tree, "env_settings", "env")
    if env:
        if env not in ENV_IDS:
            raise ConfigurationError(f"env: unknown environment {env!r}")
        return env
    path = _get(tree, "env_settings", "env_path", default="")
    for hint, env_id in _ENV_PATH_HINTS.items():
        if hint in str(path):
            return env_id
    raise ConfigurationError("env_settings must name an environment (env: or env_path:)")


def parse_config(text: str, mode: str = "train") -> RunConfig:
    """Validated RunConfig from config text.

    Test mode applies the ``# testing:`` overrides and always forces
    learning_rate 0 with a constant schedule.
    """
    if mode not in ("train", "test"):
        raise ConfigurationError(f"mode must be train or test, got {mode!r}")
    doc = parse_tree(text)
    _warn_unknown_keys(doc.tree)
    tree = doc.tree if mode == "train" else _apply_overrides(doc.tree, doc.testing_overrides)

    agent = _get(tree, "behaviors", "Agent")
    if not isinstance(agent, dict):
        raise ConfigurationError("missing behaviors.Agent section")
    trainer_type = agent.get("trainer_type", "ppo")
    if trainer_type != "ppo":
        raise ConfigurationError(f"trainer_type: unsupported value {trainer_type!r}")

    hp = agent.get("hyperparameters", {})
    net = agent.get("network_settings", {})
    signals = agent.get("reward_signals", {})
    extrinsic = signals.get("extrinsic", {})
    curiosity_cfg = None
    if "curiosity" in signals:
        cur = signals["curiosity"]
        curiosity_cfg = CuriosityConfig(
            strength=float(cur.get("strength", 0.02)),
            encoding_size=int(cur.get("encoding_size", 256)),
            learning_rate=float(cur.get("learning_rate", 3e-4)),
        )

    env_id = _detect_env_id(tree)
    seed = int(_get(tree, "env_settings", "seed", default=0))
    num_envs = int(_get(tree, "env_settings", "num_envs", default=4))

    trainer = TrainerConfig(
        gamma=float(extrinsic.get("gamma", 0.99)),
        lam=float(hp.get("lambd", 0.95)),
        buffer_size=int(hp.get("buffer_size", 2048)),
        batch_size=int(hp.get("batch_size", 256)),
        num_epoch=int(hp.get("num_epoch", 3)),
        learning_rate=float(hp.get("learning_rate", 3e-4)),
        learning_rate_schedule=str(hp.get("learning_rate_schedule", "linear")),
        beta=float(hp.get("beta", 5e-3)),
        epsilon=float(hp.get("epsilon", 0.2)),
        hidden_units=int(net.get("hidden_units", 128)),
        num_layers=int(net.get("num_layers", 2)),
        normalize=bool(net.get("normalize", False)),
        max_steps=int(agent.get("max_steps", 500_000)),
        summary_freq=int(agent.get("summary_freq", 10_000)),
        time_horizon=int(agent.get("time_horizon", 2048)),
        vis_encode_type=str(net.get("vis_encode_type", "simple")),
        extrinsic_strength=float(extrinsic.get("strength", 1.0)),
        curiosity=curiosity_cfg,
        num_envs=num_envs,
        seed=seed,
    )
    if trainer.learning_rate_schedule not in ("linear", "constant"):
        raise ConfigurationError(
            f"learning_rate_schedule: invalid value {trainer.learning_rate_schedule!r}"
        )
    if mode == "test":
        trainer.learning_rate = 0.0
        trainer.learning_rate_schedule = "constant"

    params = _get(tree, "environment_parameters", default={}) or {}
    tasks = params.get("task")
    if tasks is None or tasks == []:
        raise ParseError("environment_parameters.task: empty or missing task list")
    if not isinstance(tasks, list):
        tasks = [tasks]
    for t in tasks:
        if not isinstance(t, int) or not 0 <= t < TASK_COUNTS[env_id]:
            raise ConfigurationError(
                f"task: index {t} invalid for {env_id} (0..{TASK_COUNTS[env_id] - 1})"
            )

    if env_id in PATTERN_RANGE:
        scenarios = params.get("pattern", [PATTERN_RANGE[env_id][0]])
    elif env_id in LEVEL_RANGE:
        scenarios = params.get("terrain_level", [LEVEL_RANGE[env_id][0]])
    else:
        scenarios = [None]
    if not isinstance(scenarios, list):
        scenarios = [scenarios]
    lo, hi = PATTERN_RANGE.get(env_id, LEVEL_RANGE.get(env_id, (None, None)))
    if lo is not None:
        for s in scenarios:
            if not isinstance(s, int) or not lo <= s <= hi:
                raise ConfigurationError(
                    f"pattern/terrain_level: value {s} out of range [{lo}, {hi}] for {env_id}"
                )

    test_seed = doc.testing_overrides.get(("env_settings", "seed"), seed + 1000)
    if mode == "train":
        for msg in trainer.range_warnings():
            warnings.warn(msg, stacklevel=2)

    return RunConfig(
        env_id=env_id,
        tasks=list(tasks),
        scenarios=list(scenarios),
        trainer=trainer,
        seed=seed,
        test_seed=int(test_seed),
        num_envs=num_envs,
        mode=mode,
    )


def parse_config_file(path, mode: str = "train") -> RunConfig:
    from pathlib import Path

    return parse_config(Path(path).read_text(), mode=mode)
