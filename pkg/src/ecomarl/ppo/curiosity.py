"""Optional forward-model exploration bonus.

A small encoder embeds the vector observation; a forward model predicts
the next embedding from (embedding, action). The squared prediction error
is paid as an intrinsic reward and minimized as an auxiliary loss. This is
deliberately a reduced scheme: no inverse model, and visual observations
are not encoded.
"""

from __future__ import annotations

import torch
from torch import nn

from ecomarl.core.spaces import SpaceSpec


class ForwardCuriosity(nn.Module):
    def __init__(self, spec: SpaceSpec, encoding_size: int, strength: float):
        super().__init__()
        self.strength = strength
        obs_dim = spec.stacked_vector_len
        action_dim = spec.continuous_actions + sum(spec.discrete_branches)
        self.spec = spec
        self.encoder = nn.Sequential(
            nn.Linear(obs_dim, encoding_size), nn.Tanh(), nn.Linear(encoding_size, encoding_size)
        )
        self.forward_model = nn.Sequential(
            nn.Linear(encoding_size + action_dim, encoding_size),
            nn.Tanh(),
            nn.Linear(encoding_size, encoding_size),
        )

    def action_features(self, cont: torch.Tensor, disc: torch.Tensor) -> torch.Tensor:
        parts = [cont]
        for b, size in enumerate(self.spec.discrete_branches):
            parts.append(
                torch.nn.functional.one_hot(disc[:, b].long(), size).to(torch.float32)
            )
        return torch.cat(parts, dim=1)

    def prediction_error(
        self, obs: torch.Tensor, next_obs: torch.Tensor, cont: torch.Tensor, disc: torch.Tensor
    ) -> torch.Tensor:
        """Per-sample 0.5 * ||f(phi(s), a) - phi(s')||^2."""
        phi = self.encoder(obs)
        phi_next = self.encoder(next_obs)
        pred = self.forward_model(torch.cat([phi, self.action_features(cont, disc)], dim=1))
        return 0.5 * (pred - phi_next).pow(2).sum(dim=1)

    @torch.no_grad()
    def bonus(
        self, obs: torch.Tensor, next_obs: torch.Tensor, cont: torch.Tensor, disc: torch.Tensor
    ) -> torch.Tensor:
        return self.strength * self.prediction_error(obs, next_obs, cont, disc)
