"""The four bound calls plus the environment constants table."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ecomarl.core.base import make_env
from ecomarl.core.spaces import (
    ENV_IDS,
    ENV_NAMES,
    LEVEL_RANGE,
    PATTERN_RANGE,
    SCALABLE_ENVS,
    TASK_COUNTS,
    Actions,
    EnvConfig,
)
from ecomarl.tasks import TASK_NAMES
from ecomarl_bindings.errors import BindingConfigurationError, translate_native_errors

ENVIRONMENTS: dict[str, dict[str, Any]] = {
    env_id: {
        "name": ENV_NAMES[env_id],
        "task_count": TASK_COUNTS[env_id],
        "task_names": list(TASK_NAMES[env_id]),
        "scenario_kind": (
            "pattern" if env_id in PATTERN_RANGE else "terrain_level" if env_id in LEVEL_RANGE else None
        ),
        "scenario_range": PATTERN_RANGE.get(env_id) or LEVEL_RANGE.get(env_id),
        "supports_agent_count_override": env_id in SCALABLE_ENVS,
    }
    for env_id in ENV_IDS
}


@dataclass
class FlatStep:
    """One tick's results as caller-owned flat buffers.

    ``vector``: (n_agents, stacked_vector_len) float64, C-contiguous.
    ``visual``: (n_agents, channels, height, width) float64 or None.
    ``rewards``: (n_agents,) float64. ``dones``: (n_agents,) bool.
    ``info``: one JSON string per agent (reward breakdown + env metrics).
    """

    vector: np.ndarray
    visual: Optional[np.ndarray]
    rewards: np.ndarray
    dones: np.ndarray
    info: list[str]

    def pack(self) -> bytes:
        """Lossless byte serialization (manifest header + raw buffers)."""
        manifest = {
            "vector_shape": list(self.vector.shape),
            "visual_shape": None if self.visual is None else list(self.visual.shape),
            "n_agents": int(self.vector.shape[0]),
            "info": self.info,
            "rewards": [float.hex(float(r)) for r in self.rewards],
            "dones": [bool(d) for d in self.dones],
        }
        header = json.dumps(manifest).encode()
        blobs = [self.vector.tobytes()]
        if self.visual is not None:
            blobs.append(self.visual.tobytes())
        return len(header).to_bytes(8, "little") + header + b"".join(blobs)

    @classmethod
    def unpack(cls, data: bytes) -> "FlatStep":
        header_len = int.from_bytes(data[:8], "little")
        manifest = json.loads(data[8 : 8 + header_len])
        offset = 8 + header_len
        vec_shape = tuple(manifest["vector_shape"])
        vec_bytes = int(np.prod(vec_shape)) * 8
        vector = np.frombuffer(data[offset : offset + vec_bytes], dtype=np.float64).reshape(
            vec_shape
        )
        offset += vec_bytes
        visual = None
        if manifest["visual_shape"] is not None:
            vis_shape = tuple(manifest["visual_shape"])
            vis_bytes = int(np.prod(vis_shape)) * 8
            visual = np.frombuffer(data[offset : offset + vis_bytes], dtype=np.float64).reshape(
                vis_shape
            )
        rewards = np.asarray([float.fromhex(h) for h in manifest["rewards"]])
        dones = np.asarray(manifest["dones"], dtype=bool)
        return cls(vector=vector.copy(), visual=None if visual is None else visual.copy(),
                   rewards=rewards, dones=dones, info=list(manifest["info"]))


def _info_strings(info: dict, n_agents: int) -> list[str]:
    breakdowns = info.get("breakdown", [{}] * n_agents)
    metrics = info.get("metrics", {})
    return [
        json.dumps({"breakdown": breakdowns[i], "metrics": metrics}, sort_keys=True)
        for i in range(n_agents)
    ]


class BoundEnv:
    """One bound environment instance.

    Not shareable across interpreter threads; create one handle per
    concurrent user. Buffers returned from reset/step are caller-owned
    snapshots, never views of live state.
    """

    def __init__(self, env):
        self._env = env

    def spec(self) -> dict[str, Any]:
        return self._env.spec.as_dict()

    def reset(self, seed: Optional[int] = None) -> FlatStep:
        with translate_native_errors():
            vec, vis = self._env.reset(seed)
        n = self._env.spec.agent_count
        return FlatStep(
            vector=np.ascontiguousarray(vec, dtype=np.float64),
            visual=None if vis is None else np.ascontiguousarray(vis, dtype=np.float64),
            rewards=np.zeros(n),
            dones=np.zeros(n, dtype=bool),
            info=[json.dumps({}) for _ in range(n)],
        )

    def step(
        self,
        continuous: Optional[np.ndarray] = None,
        discrete: Optional[np.ndarray] = None,
    ) -> FlatStep:
        """Advance one tick for all agents at once.

        ``continuous``: (n_agents, n_continuous) floats in [-1, 1];
        ``discrete``: (n_agents, n_branches) integers. Either may be
        omitted when the environment has no actions of that kind.
        """
        spec = self._env.spec
        n = spec.agent_count
        cont = (
            np.zeros((n, spec.continuous_actions))
            if continuous is None
            else np.asarray(continuous, dtype=np.float64)
        )
        disc = (
            np.zeros((n, len(spec.discrete_branches)), dtype=np.int64)
            if discrete is None
            else np.asarray(discrete)
        )
        if disc.dtype.kind not in "iu":
            raise BindingConfigurationError("discrete actions must be integers")
        actions = Actions(continuous=cont, discrete=disc.astype(np.int64))
        with translate_native_errors():
            outcome = self._env.step(actions)
        return FlatStep(
            vector=np.ascontiguousarray(outcome.vector_obs, dtype=np.float64),
            visual=(
                None
                if outcome.visual_obs is None
                else np.ascontiguousarray(outcome.visual_obs, dtype=np.float64)
            ),
            rewards=outcome.rewards.copy(),
            dones=outcome.agent_dones.copy(),
            info=_info_strings(outcome.info, n),
        )

    @property
    def episode_done(self) -> bool:
        return self._env.episode_done


def bound_make(
    env_id: str,
    task: int = 0,
    scenario: Optional[int] = None,
    seed: int = 0,
    agent_count: Optional[int] = None,
) -> BoundEnv:
    """Construct a bound environment; arguments are validated before the
    native world is built."""
    if env_id not in ENV_IDS:
        raise BindingConfigurationError(
            f"unknown environment {env_id!r}; expected one of {sorted(ENV_IDS)}"
        )
    with translate_native_errors():
        config = EnvConfig(
            env_id=env_id,
            task=task,
            level_or_pattern=scenario,
            seed=seed,
            agent_count_override=agent_count,
        )
        return BoundEnv(make_env(config))


def bound_reset(env: BoundEnv, seed: Optional[int] = None) -> FlatStep:
    return env.reset(seed)


def bound_step(env: BoundEnv, continuous=None, discrete=None) -> FlatStep:
    return env.step(continuous, discrete)


def bound_spec(env: BoundEnv) -> dict[str, Any]:
    return env.spec()
