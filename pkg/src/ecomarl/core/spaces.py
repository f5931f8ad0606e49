"""Declarative observation/action space descriptions and step containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ecomarl.core.errors import ActionError, ConfigurationError

ENV_IDS = ("wfc", "wrm", "opc", "dbr", "aws")

ENV_NAMES = {
    "wfc": "Wind Farm Control",
    "wrm": "Wildfire Resource Management",
    "opc": "Ocean Plastic Collection",
    "dbr": "Drone-Based Reforestation",
    "aws": "Aerial Wildfire Suppression",
}

# main task + sub-tasks per environment
TASK_COUNTS = {"wfc": 2, "wrm": 3, "opc": 4, "dbr": 8, "aws": 9}

# wfc selects a layout pattern 0..8; wrm/dbr/aws a terrain elevation level
# 1..10; opc has no extra scenario dimension.
PATTERN_RANGE = {"wfc": (0, 8)}
LEVEL_RANGE = {"wrm": (1, 10), "dbr": (1, 10), "aws": (1, 10)}

# agent-count overrides are supported only where the world scales with the
# agent count; wrm's tower lattice and opc's fixed trash budget do not.
SCALABLE_ENVS = ("wfc", "dbr", "aws")


@dataclass(frozen=True)
class SpaceSpec:
    """Observation/action layout of one environment.

    ``vector_len`` is the per-frame vector length; agents emit
    ``vector_len * vector_stacks`` values. ``visual_dims`` is
    (width, height, channels) of a single frame, stacked along channels.
    """

    vector_len: int
    vector_stacks: int
    visual_dims: Optional[tuple[int, int, int]]
    visual_stacks: int
    continuous_actions: int
    discrete_branches: tuple[int, ...]
    agent_count: int
    episode_length: int

    def __post_init__(self):
        if self.vector_len < 0 or self.vector_stacks < 1:
            raise ConfigurationError("vector_len must be >= 0 and vector_stacks >= 1")
        if self.episode_length <= 0:
            raise ConfigurationError("episode_length must be positive")
        if self.agent_count < 1:
            raise ConfigurationError("agent_count must be >= 1")
        for size in self.discrete_branches:
            if size < 2:
                raise ConfigurationError(f"discrete branch size {size} < 2")

    @property
    def stacked_vector_len(self) -> int:
        return self.vector_len * self.vector_stacks

    @property
    def stacked_visual_shape(self) -> Optional[tuple[int, int, int]]:
        """(channels, height, width) of the stacked visual tensor."""
        if self.visual_dims is None:
            return None
        w, h, c = self.visual_dims
        return (c * self.visual_stacks, h, w)

    def as_dict(self) -> dict[str, Any]:
        return {
            "vector_len": self.vector_len,
            "vector_stacks": self.vector_stacks,
            "visual_dims": self.visual_dims,
            "visual_stacks": self.visual_stacks,
            "continuous_actions": self.continuous_actions,
            "discrete_branches": list(self.discrete_branches),
            "agent_count": self.agent_count,
            "episode_length": self.episode_length,
        }


@dataclass(frozen=True)
class EnvConfig:
    """Selects an environment scenario: task, layout/terrain, seed."""

    env_id: str
    task: int = 0
    level_or_pattern: Optional[int] = None
    seed: int = 0
    agent_count_override: Optional[int] = None

    def __post_init__(self):
        if self.env_id not in ENV_IDS:
            raise ConfigurationError(f"env_id: unknown environment {self.env_id!r}")
        if not 0 <= self.task < TASK_COUNTS[self.env_id]:
            raise ConfigurationError(
                f"task: index {self.task} out of range for {self.env_id} "
                f"(expected 0..{TASK_COUNTS[self.env_id] - 1})"
            )
        if self.env_id in PATTERN_RANGE:
            lo, hi = PATTERN_RANGE[self.env_id]
            value = self.level_or_pattern if self.level_or_pattern is not None else lo
            if not lo <= value <= hi:
                raise ConfigurationError(
                    f"level_or_pattern: pattern {value} out of range [{lo}, {hi}] for wfc"
                )
        elif self.env_id in LEVEL_RANGE:
            lo, hi = LEVEL_RANGE[self.env_id]
            value = self.level_or_pattern if self.level_or_pattern is not None else lo
            if not lo <= value <= hi:
                raise ConfigurationError(
                    f"level_or_pattern: terrain level {value} out of range [{lo}, {hi}] "
                    f"for {self.env_id}"
                )
        elif self.level_or_pattern is not None:
            raise ConfigurationError("level_or_pattern: opc takes no pattern or terrain level")
        if self.seed < 0:
            raise ConfigurationError("seed: must be non-negative")
        if self.agent_count_override is not None:
            if self.env_id not in SCALABLE_ENVS:
                raise ConfigurationError(
                    f"agent_count_override: {self.env_id} has a fixed agent count"
                )
            if self.agent_count_override < 1:
                raise ConfigurationError("agent_count_override: must be >= 1")

    @property
    def scenario(self) -> int:
        """Pattern/level with the env default filled in (0 for wfc, 1 for levels)."""
        if self.level_or_pattern is not None:
            return self.level_or_pattern
        return PATTERN_RANGE.get(self.env_id, LEVEL_RANGE.get(self.env_id, (0, 0)))[0]


@dataclass
class Actions:
    """One tick of actions for every agent.

    ``continuous``: (n_agents, n_continuous) float array, values in [-1, 1].
    ``discrete``: (n_agents, n_branches) integer array of branch indices.
    """

    continuous: np.ndarray
    discrete: np.ndarray

    @classmethod
    def zeros(cls, spec: SpaceSpec) -> "Actions":
        return cls(
            continuous=np.zeros((spec.agent_count, spec.continuous_actions), dtype=np.float64),
            discrete=np.zeros((spec.agent_count, len(spec.discrete_branches)), dtype=np.int64),
        )

    @classmethod
    def of(
        cls,
        spec: SpaceSpec,
        continuous: Optional[Sequence[Sequence[float]]] = None,
        discrete: Optional[Sequence[Sequence[int]]] = None,
    ) -> "Actions":
        act = cls.zeros(spec)
        if continuous is not None:
            act.continuous = np.asarray(continuous, dtype=np.float64).reshape(
                spec.agent_count, spec.continuous_actions
            )
        if discrete is not None:
            act.discrete = np.asarray(discrete, dtype=np.int64).reshape(
                spec.agent_count, len(spec.discrete_branches)
            )
        return act

    def validate(self, spec: SpaceSpec) -> None:
        cont = np.asarray(self.continuous)
        disc = np.asarray(self.discrete)
        if cont.shape != (spec.agent_count, spec.continuous_actions):
            raise ActionError(
                f"continuous actions shape {cont.shape} != "
                f"{(spec.agent_count, spec.continuous_actions)}"
            )
        if disc.shape != (spec.agent_count, len(spec.discrete_branches)):
            raise ActionError(
                f"discrete actions shape {disc.shape} != "
                f"{(spec.agent_count, len(spec.discrete_branches))}"
            )
        if not np.issubdtype(disc.dtype, np.integer):
            raise ActionError("discrete actions must be integers")
        for b, size in enumerate(spec.discrete_branches):
            col = disc[:, b]
            if col.min(initial=0) < 0 or col.max(initial=0) >= size:
                raise ActionError(f"discrete branch {b} index out of range [0, {size})")


@dataclass
class StepOutcome:
    """Result of advancing the world one tick.

    ``vector_obs``: (n_agents, stacked_vector_len) in [-1, 1].
    ``visual_obs``: (n_agents, C, H, W) in [0, 1], or None.
    ``rewards``: task-scaled per-agent scalars.
    ``agent_dones``: True where an agent's episode ended this tick (its
    reward stream should reset for advantage estimation).
    ``episode_done``: True when the whole instance finished.
    ``info``: per-agent reward breakdowns plus env-specific metrics.
    """

    vector_obs: np.ndarray
    visual_obs: Optional[np.ndarray]
    rewards: np.ndarray
    episode_done: bool
    agent_dones: np.ndarray
    info: dict[str, Any] = field(default_factory=dict)
