"""Generalized advantage estimation over per-agent reward streams."""

from __future__ import annotations

import numpy as np

from ecomarl import kernels
from ecomarl.core.errors import ContractError


def compute_gae(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    gamma: float,
    lam: float,
    bootstrap_value: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """(advantages, returns) for one stream of transitions.

    ``values[t]`` is V(s_t). ``bootstrap_value`` is V of the state after
    the final transition, used when the rollout was cut mid-episode; it is
    ignored when ``dones[-1]`` is set. Returns are advantages + values.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones)
    if not (rewards.shape == values.shape == dones.shape) or rewards.ndim != 1:
        raise ContractError(
            f"misaligned GAE inputs: rewards {rewards.shape}, values {values.shape}, "
            f"dones {dones.shape}"
        )
    advantages = kernels.gae_backward(rewards, values, dones, gamma, lam, bootstrap_value)
    return advantages, advantages + values


def ppo_clip_objective(ratio, advantage, epsilon: float):
    """Pessimistic clipped surrogate: min(r*A, clip(r, 1-eps, 1+eps)*A)."""
    ratio = np.asarray(ratio, dtype=np.float64)
    advantage = np.asarray(advantage, dtype=np.float64)
    clipped = np.clip(ratio, 1.0 - epsilon, 1.0 + epsilon)
    return np.minimum(ratio * advantage, clipped * advantage)
