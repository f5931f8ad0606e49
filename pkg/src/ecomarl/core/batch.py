"""Batch stepping of independent environment instances.

Instances never share mutable state, so they may be fanned across a
thread pool; per-instance step ordering is preserved because each
instance is advanced by exactly one task per tick.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from ecomarl.core.base import MultiAgentEnv, make_env
from ecomarl.core.spaces import Actions, EnvConfig, StepOutcome


class EnvBatch:
    """N independent instances of one scenario, stepped together.

    Instance i is seeded with ``base_seed + i`` so the batch replays
    exactly for a given config.
    """

    def __init__(self, config: EnvConfig, num_envs: int, workers: int = 0):
        if num_envs < 1:
            raise ValueError("num_envs must be >= 1")
        self.config = config
        self.envs: list[MultiAgentEnv] = [
            make_env(replace(config, seed=config.seed + i)) for i in range(num_envs)
        ]
        self._pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def __len__(self) -> int:
        return len(self.envs)

    @property
    def spec(self):
        return self.envs[0].spec

    def reset(self, base_seed: Optional[int] = None) -> list[tuple[np.ndarray, Optional[np.ndarray]]]:
        if base_seed is None:
            return [env.reset() for env in self.envs]
        return [env.reset(base_seed + i) for i, env in enumerate(self.envs)]

    def reset_done(self) -> list[int]:
        """Reset instances whose episode finished; returns their indices.

        Each reset re-seeds with a fresh, deterministic seed derived from
        the instance's previous one so successive episodes differ.
        """
        indices = []
        for i, env in enumerate(self.envs):
            if env.episode_done:
                env.reset(env.seed + len(self.envs))
                indices.append(i)
        return indices

    def step(self, actions: Sequence[Actions]) -> list[StepOutcome]:
        if len(actions) != len(self.envs):
            raise ValueError(f"expected {len(self.envs)} action sets, got {len(actions)}")
        if self._pool is None:
            return [env.step(a) for env, a in zip(self.envs, actions)]
        futures = [self._pool.submit(env.step, a) for env, a in zip(self.envs, actions)]
        return [f.result() for f in futures]

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
