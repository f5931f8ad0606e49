"""Agent-count scalability protocol.

Only the environments whose worlds scale with the agent count take part:
wind farm layouts tile to any turbine count, and reforestation/suppression
simply field more aircraft. The tower grid (wrm) is a fixed 3x3 layout,
and ocean cleanup (opc) has a fixed trash budget that an extra vessel
would dilute, so both are rejected.

Each agent count runs a seeded random-policy rollout and reports the
cumulative reward, the env metric and the stepping throughput.
"""

from __future__ import annotations

import csv
import time
from pathlib import Path

import numpy as np

from ecomarl.core.base import make_env
from ecomarl.core.errors import ConfigurationError
from ecomarl.core.spaces import Actions, EnvConfig, SCALABLE_ENVS

SCALE_COLUMNS = [
    "env",
    "agent_count",
    "steps",
    "cumulative_reward",
    "env_metric",
    "steps_per_sec",
    "per_step_ms",
]

_EXCLUSION_REASON = {
    "wrm": "wrm is excluded from scalability tests (fixed tower layout and agent count)",
    "opc": "opc is excluded from scalability tests (fixed floating-plastic budget)",
}


def random_rollout(env, steps: int, seed: int) -> tuple[float, float, float]:
    """(cumulative reward, env metric, wall seconds) of a random policy."""
    spec = env.spec
    rng = np.random.default_rng(seed)
    env.reset(seed)
    total = 0.0
    start = time.monotonic()
    for _ in range(min(steps, spec.episode_length)):
        actions = Actions(
            continuous=rng.uniform(-1.0, 1.0, (spec.agent_count, spec.continuous_actions)),
            discrete=np.stack(
                [rng.integers(0, b, spec.agent_count) for b in spec.discrete_branches], axis=1
            )
            if spec.discrete_branches
            else np.zeros((spec.agent_count, 0), dtype=np.int64),
        )
        outcome = env.step(actions)
        total += float(outcome.rewards.sum())
        if outcome.episode_done:
            break
    return total, env.metric(), time.monotonic() - start


def run_scalability(
    env_id: str,
    agent_counts: list[int],
    out_path: str | Path,
    steps: int = 1000,
    seed: int = 5000,
) -> Path:
    """One aggregate row per agent count; returns the CSV path."""
    if env_id in _EXCLUSION_REASON:
        raise ConfigurationError(_EXCLUSION_REASON[env_id])
    if env_id not in SCALABLE_ENVS:
        raise ConfigurationError(f"unknown environment {env_id!r}")
    if not agent_counts:
        raise ConfigurationError("agent_counts must not be empty")

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for count in agent_counts:
        config = EnvConfig(env_id=env_id, task=0, seed=seed, agent_count_override=int(count))
        env = make_env(config)
        reward, metric, elapsed = random_rollout(env, steps, seed)
        done_steps = env.step_count
        rows.append(
            {
                "env": env_id,
                "agent_count": count,
                "steps": done_steps,
                "cumulative_reward": f"{reward:.6g}",
                "env_metric": f"{metric:.6g}",
                "steps_per_sec": f"{done_steps / elapsed:.2f}" if elapsed > 0 else "inf",
                "per_step_ms": f"{1000.0 * elapsed / done_steps:.4f}" if done_steps else "0",
            }
        )
    with out_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SCALE_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return out_path
