"""Environment-agnostic episode engine.

Concrete environments implement world generation, dynamics and base reward
components; this module owns everything uniform across them: seeded RNG
streams, observation stacking, step/lifecycle bookkeeping, action
validation, and task scaling of the per-component reward breakdowns.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from ecomarl import tasks
from ecomarl.core.errors import ConfigurationError, LifecycleError
from ecomarl.core.rng import dynamics_rng, worldgen_rng
from ecomarl.core.spaces import Actions, EnvConfig, SpaceSpec, StepOutcome


class Stacker:
    """Newest-first frame stacking; reset fills every slot with frame 0."""

    def __init__(self, spec: SpaceSpec):
        self.spec = spec
        self._vec: list[np.ndarray] = []
        self._vis: list[np.ndarray] = []

    def reset(self, vec_frame: np.ndarray, vis_frame: Optional[np.ndarray]) -> None:
        self._vec = [vec_frame.copy() for _ in range(self.spec.vector_stacks)]
        if vis_frame is not None:
            self._vis = [vis_frame.copy() for _ in range(self.spec.visual_stacks)]

    def push(self, vec_frame: np.ndarray, vis_frame: Optional[np.ndarray]) -> None:
        self._vec.insert(0, vec_frame.copy())
        self._vec.pop()
        if vis_frame is not None:
            self._vis.insert(0, vis_frame.copy())
            self._vis.pop()

    def reset_agent(self, agent: int, vec_frame: np.ndarray, vis_frame: Optional[np.ndarray]) -> None:
        """Refill one agent's slots after its episode restarted mid-run."""
        for buf in self._vec:
            buf[agent] = vec_frame[agent]
        for buf in self._vis:
            buf[agent] = vis_frame[agent]

    def vector(self) -> np.ndarray:
        return np.concatenate(self._vec, axis=1)

    def visual(self) -> Optional[np.ndarray]:
        if not self._vis:
            return None
        return np.concatenate(self._vis, axis=1)


class MultiAgentEnv(ABC):
    """Uniform interface all five environments implement.

    One instance is single-threaded; independent instances may be stepped
    in parallel. A step applies all agents' actions simultaneously
    (conflicts resolved in ascending agent-id order), advances the world,
    then evaluates rewards.
    """

    ENV_ID: str = ""
    METRIC_NAME: str = ""

    def __init__(self, config: EnvConfig):
        if config.env_id != self.ENV_ID:
            raise ConfigurationError(f"config is for {config.env_id!r}, not {self.ENV_ID!r}")
        self.config = config
        self._spec = self._build_spec(config)
        self._stacker = Stacker(self._spec)
        self._step_count = 0
        self._episode_done = False
        self.reset(config.seed)

    # -- subclass surface ------------------------------------------------

    @abstractmethod
    def _build_spec(self, config: EnvConfig) -> SpaceSpec: ...

    @abstractmethod
    def _reset_world(self) -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Regenerate the world; return the initial observation frames."""

    @abstractmethod
    def _step_world(
        self, actions: Actions
    ) -> tuple[np.ndarray, Optional[np.ndarray], list[dict], np.ndarray, dict]:
        """Advance one tick.

        Returns (vector_frames, visual_frames, per-agent reward breakdowns,
        per-agent done flags, env-specific metrics).
        """

    def metric(self) -> float:
        """Current value of the env-specific headline metric."""
        return 0.0

    # -- uniform engine ---------------------------------------------------

    @property
    def spec(self) -> SpaceSpec:
        return self._spec

    @property
    def step_count(self) -> int:
        return self._step_count

    @property
    def episode_done(self) -> bool:
        return self._episode_done

    def observations(self) -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Current stacked observations without advancing the world."""
        return self._stacker.vector(), self._stacker.visual()

    def reset(self, seed: Optional[int] = None) -> tuple[np.ndarray, Optional[np.ndarray]]:
        """Deterministically regenerate the world and return initial observations."""
        if seed is None:
            seed = self.config.seed
        if seed < 0:
            raise ConfigurationError("seed: must be non-negative")
        self.seed = seed
        self.world_rng = worldgen_rng(seed)
        self.dyn_rng = dynamics_rng(seed)
        self._step_count = 0
        self._episode_done = False
        vec, vis = self._reset_world()
        self._stacker.reset(vec, vis)
        return self._stacker.vector(), self._stacker.visual()

    def step(self, actions: Actions) -> StepOutcome:
        if self._episode_done:
            raise LifecycleError("episode is done; call reset() before stepping again")
        actions.validate(self._spec)
        self._step_count += 1
        vec, vis, breakdowns, agent_dones, metrics = self._step_world(actions)
        rewards = tasks.scaled_rewards(self.ENV_ID, self.config.task, breakdowns)
        self._stacker.push(vec, vis)
        for agent in np.flatnonzero(agent_dones):
            self._stacker.reset_agent(int(agent), vec, vis)
        if self._step_count >= self._spec.episode_length:
            self._episode_done = True
            agent_dones = np.ones(self._spec.agent_count, dtype=bool)
        info = {"breakdown": breakdowns, "metrics": metrics}
        return StepOutcome(
            vector_obs=self._stacker.vector(),
            visual_obs=self._stacker.visual(),
            rewards=rewards,
            episode_done=self._episode_done,
            agent_dones=np.asarray(agent_dones, dtype=bool),
            info=info,
        )


def make_env(config: EnvConfig) -> MultiAgentEnv:
    """Construct the environment selected by ``config``.

    The config's invariants (task index, pattern/level range, override
    rules) were validated when the config was built.
    """
    from ecomarl.envs import ENV_CLASSES

    return ENV_CLASSES[config.env_id](config)
