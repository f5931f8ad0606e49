"""Actor-critic networks for mixed vector/visual observations.

One shared network serves every agent (parameter sharing); it conditions
only on the agent's own observation. Discrete action branches get
independent categorical heads; continuous actions a Gaussian head with a
state-independent, bounded log-std.
"""

from __future__ import annotations

import numpy as np
import torch
from torch import nn
from torch.distributions import Categorical, Normal

from ecomarl.core.spaces import SpaceSpec

LOG_STD_MIN, LOG_STD_MAX = -4.0, 1.0


def _orthogonal(layer: nn.Linear, gain: float) -> nn.Linear:
    nn.init.orthogonal_(layer.weight, gain=gain)
    nn.init.zeros_(layer.bias)
    return layer


def _mlp(in_dim: int, hidden: int, layers: int) -> nn.Sequential:
    mods: list[nn.Module] = []
    last = in_dim
    for _ in range(layers):
        mods += [_orthogonal(nn.Linear(last, hidden), gain=np.sqrt(2.0)), nn.Tanh()]
        last = hidden
    return nn.Sequential(*mods)


class SimpleVisualEncoder(nn.Module):
    """Two strided conv layers, the lightweight default."""

    def __init__(self, channels: int, height: int, width: int, out_dim: int = 128):
        super().__init__()
        self.conv = nn.Sequential(
            nn.Conv2d(channels, 16, kernel_size=8, stride=4),
            nn.ReLU(),
            nn.Conv2d(16, 32, kernel_size=4, stride=2),
            nn.ReLU(),
        )
        with torch.no_grad():
            flat = self.conv(torch.zeros(1, channels, height, width)).numel()
        self.head = nn.Sequential(nn.Linear(flat, out_dim), nn.ReLU())
        self.out_dim = out_dim

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.conv(x).flatten(1))


class _ResBlock(nn.Module):
    def __init__(self, channels: int):
        super().__init__()
        self.c1 = nn.Conv2d(channels, channels, kernel_size=3, padding=1)
        self.c2 = nn.Conv2d(channels, channels, kernel_size=3, padding=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = torch.relu(self.c1(torch.relu(x)))
        return x + self.c2(h)


class ResNetVisualEncoder(nn.Module):
    """Deeper residual encoder selected by vis_encode_type: resnet."""

    def __init__(self, channels: int, height: int, width: int, out_dim: int = 128):
        super().__init__()
        blocks: list[nn.Module] = []
        last = channels
        for ch in (16, 32):
            blocks += [
                nn.Conv2d(last, ch, kernel_size=3, padding=1),
                nn.MaxPool2d(3, stride=2),
                _ResBlock(ch),
            ]
            last = ch
        self.body = nn.Sequential(*blocks)
        with torch.no_grad():
            flat = self.body(torch.zeros(1, channels, height, width)).numel()
        self.head = nn.Sequential(nn.Linear(flat, out_dim), nn.ReLU())
        self.out_dim = out_dim

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(torch.relu(self.body(x)).flatten(1))


def make_visual_encoder(kind: str, channels: int, height: int, width: int) -> nn.Module:
    if kind == "resnet":
        return ResNetVisualEncoder(channels, height, width)
    if kind == "simple":
        return SimpleVisualEncoder(channels, height, width)
    raise ValueError(f"unknown vis_encode_type {kind!r}")


class ActorCritic(nn.Module):
    def __init__(
        self,
        spec: SpaceSpec,
        hidden_units: int,
        num_layers: int,
        vis_encode_type: str = "simple",
    ):
        super().__init__()
        self.spec = spec
        in_dim = spec.stacked_vector_len
        self.visual_encoder = None
        if spec.visual_dims is not None:
            c, h, w = spec.stacked_visual_shape
            self.visual_encoder = make_visual_encoder(vis_encode_type, c, h, w)
            in_dim += self.visual_encoder.out_dim
        self.body = _mlp(in_dim, hidden_units, num_layers)
        # near-uniform initial action heads keep early exploration unbiased
        self.branch_heads = nn.ModuleList(
            [_orthogonal(nn.Linear(hidden_units, size), gain=0.01) for size in spec.discrete_branches]
        )
        self.mean_head = (
            _orthogonal(nn.Linear(hidden_units, spec.continuous_actions), gain=0.01)
            if spec.continuous_actions
            else None
        )
        if spec.continuous_actions:
            self.log_std = nn.Parameter(torch.zeros(spec.continuous_actions))
        self.value_head = _orthogonal(nn.Linear(hidden_units, 1), gain=1.0)

    def _joined(self, vec: torch.Tensor, vis: torch.Tensor | None) -> torch.Tensor:
        if self.visual_encoder is not None:
            if vis is None:
                raise ValueError("this policy requires visual observations")
            vec = torch.cat([vec, self.visual_encoder(vis)], dim=1)
        return vec

    def _distributions(self, features: torch.Tensor):
        branches = [Categorical(logits=head(features)) for head in self.branch_heads]
        gaussian = None
        if self.mean_head is not None:
            mean = self.mean_head(features)
            log_std = self.log_std.clamp(LOG_STD_MIN, LOG_STD_MAX)
            gaussian = Normal(mean, log_std.exp())
        return branches, gaussian

    def value(self, vec: torch.Tensor, vis: torch.Tensor | None) -> torch.Tensor:
        return self.value_head(self.body(self._joined(vec, vis))).squeeze(-1)

    @torch.no_grad()
    def act(
        self, vec: torch.Tensor, vis: torch.Tensor | None, deterministic: bool = False
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
        """Sample actions; returns (continuous, discrete, log_prob, value)."""
        features = self.body(self._joined(vec, vis))
        branches, gaussian = self._distributions(features)
        n = vec.shape[0]
        logp = torch.zeros(n)
        if branches:
            disc_cols = []
            for dist in branches:
                col = dist.probs.argmax(dim=-1) if deterministic else dist.sample()
                logp = logp + dist.log_prob(col)
                disc_cols.append(col)
            disc = torch.stack(disc_cols, dim=1)
        else:
            disc = torch.zeros(n, 0, dtype=torch.long)
        if gaussian is not None:
            cont = gaussian.mean if deterministic else gaussian.sample()
            logp = logp + gaussian.log_prob(cont).sum(dim=-1)
        else:
            cont = torch.zeros(n, 0)
        value = self.value_head(features).squeeze(-1)
        return cont, disc, logp, value

    def evaluate(
        self,
        vec: torch.Tensor,
        vis: torch.Tensor | None,
        cont_actions: torch.Tensor,
        disc_actions: torch.Tensor,
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        """(log_prob, entropy, value) of given actions under the current policy."""
        features = self.body(self._joined(vec, vis))
        branches, gaussian = self._distributions(features)
        n = vec.shape[0]
        logp = torch.zeros(n, device=vec.device)
        entropy = torch.zeros(n, device=vec.device)
        for b, dist in enumerate(branches):
            logp = logp + dist.log_prob(disc_actions[:, b])
            entropy = entropy + dist.entropy()
        if gaussian is not None:
            logp = logp + gaussian.log_prob(cont_actions).sum(dim=-1)
            entropy = entropy + gaussian.entropy().sum(dim=-1)
        value = self.value_head(features).squeeze(-1)
        return logp, entropy, value

