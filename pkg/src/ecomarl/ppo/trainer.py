"""PPO-Clip with parameter sharing across agents.

All agents' transitions pool into one buffer; advantage estimation runs
per (instance, agent) stream so episode boundaries never leak across
streams. Updates run ``num_epoch`` passes of minibatch gradient ascent on
the clipped surrogate, with value regression, an entropy bonus, and an
optional curiosity term.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import torch

from ecomarl.core.batch import EnvBatch
from ecomarl.core.rng import policy_init_rng
from ecomarl.core.spaces import Actions, EnvConfig
from ecomarl.ppo.curiosity import ForwardCuriosity
from ecomarl.ppo.gae import compute_gae
from ecomarl.ppo.networks import ActorCritic

# typical ranges from the hyperparameter guidance; violations warn only
HYPERPARAMETER_RANGES = {
    "gamma": (0.8, 0.995),
    "lam": (0.9, 0.95),
    "buffer_size": (2048, 409600),
    "batch_size": (32, 5120),
    "num_epoch": (3, 10),
    "learning_rate": (1e-5, 1e-3),
    "time_horizon": (32, 2048),
    "max_steps": (5e5, 1e7),
    "beta": (1e-4, 1e-2),
    "epsilon": (0.1, 0.3),
    "num_layers": (1, 3),
    "hidden_units": (32, 512),
    "curiosity_encoding_size": (64, 256),
    "curiosity_strength": (0.001, 0.1),
}


@dataclass
class CuriosityConfig:
    strength: float = 0.02
    encoding_size: int = 256
    learning_rate: float = 3e-4


@dataclass
class TrainerConfig:
    gamma: float = 0.99
    lam: float = 0.95
    buffer_size: int = 2048
    batch_size: int = 256
    num_epoch: int = 3
    learning_rate: float = 3e-4
    learning_rate_schedule: str = "linear"  # or "constant"
    beta: float = 5e-3
    epsilon: float = 0.2
    hidden_units: int = 64
    num_layers: int = 2
    normalize: bool = False
    max_steps: int = 500_000
    summary_freq: int = 40_000
    time_horizon: int = 2048
    vis_encode_type: str = "simple"
    extrinsic_strength: float = 1.0
    curiosity: Optional[CuriosityConfig] = None
    num_envs: int = 4
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    seed: int = 0

    def range_warnings(self) -> list[str]:
        """Out-of-range hyperparameters per the published typical ranges."""
        values = {
            "gamma": self.gamma,
            "lam": self.lam,
            "buffer_size": self.buffer_size,
            "batch_size": self.batch_size,
            "num_epoch": self.num_epoch,
            "learning_rate": self.learning_rate,
            "time_horizon": self.time_horizon,
            "max_steps": self.max_steps,
            "beta": self.beta,
            "epsilon": self.epsilon,
            "num_layers": self.num_layers,
            "hidden_units": self.hidden_units,
        }
        if self.curiosity is not None:
            values["curiosity_encoding_size"] = self.curiosity.encoding_size
            values["curiosity_strength"] = self.curiosity.strength
        out = []
        for key, value in values.items():
            lo, hi = HYPERPARAMETER_RANGES[key]
            if not lo <= value <= hi:
                out.append(f"{key}={value} outside typical range [{lo}, {hi}]")
        return out

    def warn_ranges(self) -> None:
        for msg in self.range_warnings():
            warnings.warn(msg, stacklevel=2)


@dataclass
class UpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    curiosity_loss: float
    learning_rate: float


@dataclass
class SummaryRow:
    step: int
    mean_episode_reward: float
    env_metric: float
    wall_time: float
    stats: Optional[UpdateStats] = None


class _StreamBuffer:
    """Rollout storage for the pooled (instance x agent) streams."""

    def __init__(self, n_streams: int, spec, horizon: int):
        self.n = n_streams
        self.horizon = horizon
        self.vec = np.zeros((horizon, n_streams, spec.stacked_vector_len), dtype=np.float32)
        vis_shape = spec.stacked_visual_shape
        self.vis = (
            np.zeros((horizon, n_streams, *vis_shape), dtype=np.float32)
            if vis_shape is not None
            else None
        )
        self.cont = np.zeros((horizon, n_streams, spec.continuous_actions), dtype=np.float32)
        self.disc = np.zeros((horizon, n_streams, len(spec.discrete_branches)), dtype=np.int64)
        self.logp = np.zeros((horizon, n_streams), dtype=np.float64)
        self.value = np.zeros((horizon, n_streams), dtype=np.float64)
        self.reward = np.zeros((horizon, n_streams), dtype=np.float64)
        self.norm_reward = np.zeros((horizon, n_streams), dtype=np.float64)
        self.done = np.zeros((horizon, n_streams), dtype=bool)
        self.t = 0


class _ReturnScale:
    """Running std of the discounted return, used to condition the critic.

    The critic regresses returns divided by this scale; policy updates are
    unaffected (advantages are re-standardized per batch anyway), but value
    targets stay O(1) whatever the env's raw reward magnitudes are.
    """

    def __init__(self, gamma: float, n_streams: int):
        self.gamma = gamma
        self.running = np.zeros(n_streams)
        self.count = 0.0
        self.mean = 0.0
        self.m2 = 0.0

    def observe(self, rewards: np.ndarray, dones: np.ndarray) -> None:
        self.running = self.gamma * self.running * (~dones) + rewards
        for value in self.running:
            self.count += 1.0
            delta = value - self.mean
            self.mean += delta / self.count
            self.m2 += delta * (value - self.mean)

    @property
    def scale(self) -> float:
        if self.count < 2:
            return 1.0
        return max(float(np.sqrt(self.m2 / self.count)), 1e-4)


class Trainer:
    def __init__(self, config: TrainerConfig, env_config: EnvConfig):
        config.warn_ranges()
        self.config = config
        self.env_config = env_config
        torch_seed = int(policy_init_rng(config.seed).integers(0, 2**31 - 1))
        torch.manual_seed(torch_seed)

        self.envs = EnvBatch(env_config, config.num_envs)
        spec = self.envs.spec
        self.spec = spec
        self.policy = ActorCritic(
            spec, config.hidden_units, config.num_layers, config.vis_encode_type
        )
        params = list(self.policy.parameters())
        self.curiosity = None
        if config.curiosity is not None:
            self.curiosity = ForwardCuriosity(
                spec, config.curiosity.encoding_size, config.curiosity.strength
            )
            params += list(self.curiosity.parameters())
        self.optimizer = torch.optim.Adam(params, lr=config.learning_rate)

        self.global_step = 0
        self.n_streams = config.num_envs * spec.agent_count
        self.rollout_len = max(1, min(config.buffer_size // self.n_streams, config.time_horizon))
        self._obs_vec, self._obs_vis = self._gather_obs(self.envs.reset())
        self._episode_return = np.zeros(config.num_envs)
        self._finished_returns: list[float] = []
        self._obs_stats = _RunningNorm(spec.stacked_vector_len) if config.normalize else None
        self._return_scale = _ReturnScale(config.gamma, self.n_streams)

    # -- observation plumbing ----------------------------------------------

    def _gather_obs(self, reset_out) -> tuple[np.ndarray, Optional[np.ndarray]]:
        vecs = np.concatenate([vec for vec, _ in reset_out], axis=0)
        if self.envs.spec.visual_dims is not None:
            viss = np.concatenate([vis for _, vis in reset_out], axis=0)
        else:
            viss = None
        return vecs.astype(np.float32), None if viss is None else viss.astype(np.float32)

    def _normalized(self, vec: np.ndarray) -> np.ndarray:
        if self._obs_stats is None:
            return vec
        return self._obs_stats.apply(vec)

    def _policy_inputs(self, vec, vis):
        tv = torch.as_tensor(self._normalized(vec), dtype=torch.float32)
        ti = torch.as_tensor(vis, dtype=torch.float32) if vis is not None else None
        return tv, ti

    # -- collection -----------------------------------------------------------

    def collect(self) -> _StreamBuffer:
        """Run the shared policy for one rollout across all instances."""
        cfg = self.config
        spec = self.spec
        n_agents = spec.agent_count
        buf = _StreamBuffer(self.n_streams, spec, self.rollout_len)

        for t in range(self.rollout_len):
            if self._obs_stats is not None:
                self._obs_stats.update(self._obs_vec)
            tv, ti = self._policy_inputs(self._obs_vec, self._obs_vis)
            cont, disc, logp, value = self.policy.act(tv, ti)
            cont_np = cont.numpy()
            disc_np = disc.numpy()

            action_sets = []
            for e in range(cfg.num_envs):
                sl = slice(e * n_agents, (e + 1) * n_agents)
                action_sets.append(
                    Actions(
                        continuous=np.clip(cont_np[sl].astype(np.float64), -1.0, 1.0),
                        discrete=disc_np[sl],
                    )
                )
            outcomes = self.envs.step(action_sets)

            buf.vec[t] = self._obs_vec
            if buf.vis is not None:
                buf.vis[t] = self._obs_vis
            buf.cont[t] = cont_np
            buf.disc[t] = disc_np
            buf.logp[t] = logp.numpy()
            buf.value[t] = value.numpy()

            next_vec = np.concatenate([o.vector_obs for o in outcomes], axis=0).astype(np.float32)
            next_vis = None
            if spec.visual_dims is not None:
                next_vis = np.concatenate([o.visual_obs for o in outcomes], axis=0).astype(
                    np.float32
                )
            rewards = np.concatenate([o.rewards for o in outcomes])
            dones = np.concatenate([o.agent_dones for o in outcomes])

            mixed = cfg.extrinsic_strength * rewards
            if self.curiosity is not None:
                bonus = self.curiosity.bonus(
                    torch.as_tensor(self._normalized(self._obs_vec)),
                    torch.as_tensor(self._normalized(next_vec)),
                    cont,
                    disc,
                ).numpy()
                mixed = mixed + bonus
            buf.reward[t] = mixed
            self._return_scale.observe(mixed, dones)
            buf.norm_reward[t] = mixed / self._return_scale.scale
            buf.done[t] = dones

            for e, outcome in enumerate(outcomes):
                self._episode_return[e] += float(outcome.rewards.sum())
                if outcome.episode_done:
                    self._finished_returns.append(self._episode_return[e])
                    self._episode_return[e] = 0.0
            for e in self.envs.reset_done():
                vec_e, vis_e = self.envs.envs[e].observations()
                sl = slice(e * n_agents, (e + 1) * n_agents)
                next_vec[sl] = vec_e
                if next_vis is not None:
                    next_vis[sl] = vis_e

            self._obs_vec, self._obs_vis = next_vec, next_vis
            self.global_step += self.n_streams
        buf.t = self.rollout_len
        return buf

    # -- update ---------------------------------------------------------------

    def _current_lr(self) -> float:
        if self.config.learning_rate_schedule == "constant":
            return self.config.learning_rate
        frac = 1.0 - min(self.global_step / self.config.max_steps, 1.0)
        return self.config.learning_rate * frac

    def update(self, buf: _StreamBuffer) -> UpdateStats:
        cfg = self.config
        with torch.no_grad():
            tv, ti = self._policy_inputs(self._obs_vec, self._obs_vis)
            bootstrap = self.policy.value(tv, ti).numpy().astype(np.float64)

        # the critic lives in return-normalized space; see _ReturnScale
        advantages = np.zeros_like(buf.reward)
        returns = np.zeros_like(buf.reward)
        for s in range(buf.n):
            advantages[:, s], returns[:, s] = compute_gae(
                buf.norm_reward[:, s],
                buf.value[:, s],
                buf.done[:, s],
                cfg.gamma,
                cfg.lam,
                bootstrap_value=float(bootstrap[s]),
            )

        n = buf.t * buf.n
        flat_vec = buf.vec.reshape(n, -1)
        flat_vis = buf.vis.reshape(n, *buf.vis.shape[2:]) if buf.vis is not None else None
        flat_cont = buf.cont.reshape(n, -1)
        flat_disc = buf.disc.reshape(n, -1)
        flat_logp = buf.logp.reshape(n)
        flat_adv = advantages.reshape(n)
        flat_ret = returns.reshape(n)

        # next observations for the curiosity forward model: shift within
        # each stream; the final row reuses the current obs (one stale pair
        # per stream per rollout)
        if self.curiosity is not None:
            next_vec = np.concatenate([buf.vec[1:], buf.vec[-1:]], axis=0).reshape(n, -1)

        flat_adv = (flat_adv - flat_adv.mean()) / (flat_adv.std() + 1e-8)

        lr = self._current_lr()
        for group in self.optimizer.param_groups:
            group["lr"] = lr

        stats = {"policy": 0.0, "value": 0.0, "entropy": 0.0, "curiosity": 0.0}
        n_minibatches = 0
        batch_size = min(cfg.batch_size, n)
        gen = torch.Generator().manual_seed(int(self.global_step) + cfg.seed)
        for _ in range(cfg.num_epoch):
            order = torch.randperm(n, generator=gen).numpy()
            for start in range(0, n - batch_size + 1, batch_size):
                idx = order[start : start + batch_size]
                mb_vec = torch.as_tensor(self._normalized(flat_vec[idx]), dtype=torch.float32)
                mb_vis = (
                    torch.as_tensor(flat_vis[idx], dtype=torch.float32)
                    if flat_vis is not None
                    else None
                )
                mb_cont = torch.as_tensor(flat_cont[idx], dtype=torch.float32)
                mb_disc = torch.as_tensor(flat_disc[idx], dtype=torch.long)
                mb_old_logp = torch.as_tensor(flat_logp[idx], dtype=torch.float32)
                mb_adv = torch.as_tensor(flat_adv[idx], dtype=torch.float32)
                mb_ret = torch.as_tensor(flat_ret[idx], dtype=torch.float32)

                logp, entropy, value = self.policy.evaluate(mb_vec, mb_vis, mb_cont, mb_disc)
                ratio = torch.exp(logp - mb_old_logp)
                clipped = torch.clamp(ratio, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon)
                policy_objective = torch.min(ratio * mb_adv, clipped * mb_adv).mean()
                value_loss = (value - mb_ret).pow(2).mean()
                entropy_mean = entropy.mean()

                loss = -policy_objective + cfg.value_coef * value_loss - cfg.beta * entropy_mean
                curiosity_loss = torch.zeros(())
                if self.curiosity is not None:
                    mb_next = torch.as_tensor(
                        self._normalized(next_vec[idx]), dtype=torch.float32
                    )
                    curiosity_loss = self.curiosity.prediction_error(
                        mb_vec, mb_next, mb_cont, mb_disc
                    ).mean()
                    loss = loss + curiosity_loss

                if not torch.isfinite(loss):
                    raise RuntimeError(
                        f"non-finite loss at step {self.global_step}: "
                        f"policy={policy_objective.item()} value={value_loss.item()} "
                        f"entropy={entropy_mean.item()}"
                    )
                self.optimizer.zero_grad()
                loss.backward()
                torch.nn.utils.clip_grad_norm_(
                    [p for g in self.optimizer.param_groups for p in g["params"]],
                    cfg.max_grad_norm,
                )
                self.optimizer.step()

                stats["policy"] += policy_objective.item()
                stats["value"] += value_loss.item()
                stats["entropy"] += entropy_mean.item()
                stats["curiosity"] += curiosity_loss.item()
                n_minibatches += 1

        k = max(n_minibatches, 1)
        return UpdateStats(
            policy_loss=-stats["policy"] / k,
            value_loss=stats["value"] / k,
            entropy=stats["entropy"] / k,
            curiosity_loss=stats["curiosity"] / k,
            learning_rate=lr,
        )

    # -- driver ------------------------------------------------------------------

    def train(
        self, on_summary: Optional[Callable[[SummaryRow], None]] = None
    ) -> list[SummaryRow]:
        cfg = self.config
        rows: list[SummaryRow] = []
        started = time.monotonic()
        next_summary = cfg.summary_freq
        while self.global_step < cfg.max_steps:
            buf = self.collect()
            stats = self.update(buf)
            if self.global_step >= next_summary or self.global_step >= cfg.max_steps:
                row = SummaryRow(
                    step=self.global_step,
                    mean_episode_reward=self.mean_recent_return(),
                    env_metric=float(np.mean([env.metric() for env in self.envs.envs])),
                    wall_time=time.monotonic() - started,
                    stats=stats,
                )
                rows.append(row)
                if on_summary is not None:
                    on_summary(row)
                while next_summary <= self.global_step:
                    next_summary += cfg.summary_freq
        return rows

    def mean_recent_return(self, window: int = 20) -> float:
        if self._finished_returns:
            return float(np.mean(self._finished_returns[-window:]))
        return float(np.mean(self._episode_return))

    # -- checkpoints ----------------------------------------------------------------

    def save_checkpoint(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "policy": self.policy.state_dict(),
            "optimizer": self.optimizer.state_dict(),
            "curiosity": self.curiosity.state_dict() if self.curiosity else None,
            "global_step": self.global_step,
            "config": self.config.__dict__ | {
                "curiosity": self.config.curiosity.__dict__ if self.config.curiosity else None
            },
            "env_config": {
                "env_id": self.env_config.env_id,
                "task": self.env_config.task,
                "level_or_pattern": self.env_config.level_or_pattern,
                "seed": self.env_config.seed,
                "agent_count_override": self.env_config.agent_count_override,
            },
        }
        torch.save(payload, path)
        return path

    def load_checkpoint(self, path: str | Path) -> None:
        payload = torch.load(path, weights_only=False)
        self.policy.load_state_dict(payload["policy"])
        if self.curiosity is not None and payload.get("curiosity"):
            self.curiosity.load_state_dict(payload["curiosity"])
        self.global_step = int(payload.get("global_step", 0))


class _RunningNorm:
    """Running mean/std normalization for vector observations."""

    def __init__(self, dim: int):
        self.mean = np.zeros(dim, dtype=np.float64)
        self.var = np.ones(dim, dtype=np.float64)
        self.count = 1e-4

    def update(self, batch: np.ndarray) -> None:
        batch = np.asarray(batch, dtype=np.float64)
        b_mean = batch.mean(axis=0)
        b_var = batch.var(axis=0)
        b_count = batch.shape[0]
        delta = b_mean - self.mean
        total = self.count + b_count
        self.mean += delta * b_count / total
        m_a = self.var * self.count
        m_b = b_var * b_count
        self.var = (m_a + m_b + delta**2 * self.count * b_count / total) / total
        self.count = total

    def apply(self, batch: np.ndarray) -> np.ndarray:
        return ((batch - self.mean) / np.sqrt(self.var + 1e-8)).astype(np.float32)
