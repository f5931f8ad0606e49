"""Trainer mechanics: pooling, determinism, update invariants, gradients."""

import copy

import numpy as np
import pytest
import torch

from ecomarl.core.spaces import EnvConfig
from ecomarl.ppo.networks import ActorCritic
from ecomarl.ppo.trainer import CuriosityConfig, Trainer, TrainerConfig


def _wfc_trainer(**overrides) -> Trainer:
    base = dict(
        gamma=0.9,
        lam=0.95,
        buffer_size=512,
        batch_size=64,
        num_epoch=3,
        learning_rate=3e-4,
        beta=0.005,
        epsilon=0.2,
        hidden_units=32,
        num_layers=2,
        max_steps=2048,
        summary_freq=1024,
        num_envs=2,
        seed=3,
    )
    base.update(overrides)
    cfg = TrainerConfig(**base)
    env_cfg = EnvConfig(env_id="wfc", task=0, level_or_pattern=0, seed=3)
    return Trainer(cfg, env_cfg)


class TestCollect:
    def test_transition_pooling_count(self):
        # 8 agents x 2 instances x rollout length transitions per collect
        tr = _wfc_trainer()
        buf = tr.collect()
        assert buf.n == 16
        assert buf.t == tr.rollout_len
        assert tr.rollout_len == 512 // 16
        assert tr.global_step == 512

    def test_horizon_caps_rollout(self):
        tr = _wfc_trainer(time_horizon=8, buffer_size=2048)
        assert tr.rollout_len == 8

    def test_deterministic_trajectories(self):
        a = _wfc_trainer().collect()
        b = _wfc_trainer().collect()
        assert np.array_equal(a.vec, b.vec)
        assert np.array_equal(a.disc, b.disc)
        assert np.array_equal(a.reward, b.reward)

    def test_dones_recorded_for_gae_reset(self):
        tr = _wfc_trainer()
        for env in tr.envs.envs:
            env._step_count = env.spec.episode_length - 3
        buf = tr.collect()
        assert buf.done.any()
        t_done = np.argmax(buf.done[:, 0])
        assert buf.done[t_done, :8].all()  # whole instance ends together


class TestUpdate:
    def test_zero_learning_rate_keeps_params_bitwise(self):
        tr = _wfc_trainer(learning_rate=0.0, learning_rate_schedule="constant")
        before = copy.deepcopy(tr.policy.state_dict())
        buf = tr.collect()
        tr.update(buf)
        after = tr.policy.state_dict()
        for key in before:
            assert torch.equal(before[key], after[key]), key

    def test_zero_advantages_leave_policy_heads_alone(self):
        # beta=0 and value_coef=0 isolate the policy-gradient path
        tr = _wfc_trainer(beta=0.0)
        tr.config.value_coef = 0.0
        buf = tr.collect()
        buf.reward[:] = 0.0
        buf.norm_reward[:] = 0.0
        buf.value[:] = 0.0
        with torch.no_grad():
            tr.policy.value_head.weight.zero_()
            tr.policy.value_head.bias.zero_()
        before = copy.deepcopy(tr.policy.state_dict())
        tr.update(buf)
        after = tr.policy.state_dict()
        for key in before:
            assert torch.allclose(before[key], after[key], atol=1e-12), key

    def test_linear_schedule_reaches_zero(self):
        tr = _wfc_trainer(max_steps=512)
        buf = tr.collect()
        stats = tr.update(buf)
        assert stats.learning_rate == 0.0

    def test_constant_schedule_holds(self):
        tr = _wfc_trainer(learning_rate_schedule="constant", max_steps=512)
        buf = tr.collect()
        stats = tr.update(buf)
        assert stats.learning_rate == pytest.approx(3e-4)

    def test_entropy_nonnegative_and_uniform_maximal(self):
        tr = _wfc_trainer()
        spec = tr.spec
        policy = tr.policy
        vec = torch.randn(32, spec.stacked_vector_len)
        cont = torch.zeros(32, 0)
        disc = torch.zeros(32, 1, dtype=torch.long)
        _, entropy, _ = policy.evaluate(vec, None, cont, disc)
        assert (entropy >= 0).all()
        with torch.no_grad():
            policy.branch_heads[0].weight.zero_()
            policy.branch_heads[0].bias.zero_()
        _, entropy_uniform, _ = policy.evaluate(vec, None, cont, disc)
        assert torch.allclose(
            entropy_uniform, torch.full_like(entropy_uniform, float(np.log(3))), atol=1e-6
        )
        assert (entropy_uniform >= entropy - 1e-6).all()


class TestGradients:
    def test_clip_gradient_matches_finite_differences(self):
        """Autograd gradient of the clipped surrogate vs central differences
        on a 10-parameter toy policy (2 inputs -> 5-way categorical)."""
        torch.manual_seed(0)
        obs = torch.randn(64, 2, dtype=torch.double)
        actions = torch.randint(0, 5, (64,))
        adv = torch.randn(64, dtype=torch.double)
        old_logp = torch.log(torch.full((64,), 0.2, dtype=torch.double))
        eps = 0.2

        def loss_for(weights: torch.Tensor) -> torch.Tensor:
            logits = obs @ weights.reshape(2, 5)
            logp = torch.distributions.Categorical(logits=logits).log_prob(actions)
            ratio = torch.exp(logp - old_logp)
            clipped = torch.clamp(ratio, 1.0 - eps, 1.0 + eps)
            return torch.min(ratio * adv, clipped * adv).mean()

        w = torch.randn(10, dtype=torch.double, requires_grad=True)
        loss_for(w).backward()
        analytic = w.grad.clone()

        h = 1e-6
        for k in range(10):
            bumped = w.detach().clone()
            bumped[k] += h
            up = loss_for(bumped).item()
            bumped[k] -= 2 * h
            down = loss_for(bumped).item()
            fd = (up - down) / (2 * h)
            denom = max(abs(fd), abs(analytic[k].item()), 1e-8)
            assert abs(analytic[k].item() - fd) / denom < 1e-4


class TestCuriosity:
    def test_bonus_nonnegative_and_mixed_in(self):
        tr = _wfc_trainer(curiosity=CuriosityConfig(strength=0.02, encoding_size=64))
        buf = tr.collect()
        stats = tr.update(buf)
        assert stats.curiosity_loss >= 0.0

    def test_extrinsic_strength_scales_rewards(self):
        a = _wfc_trainer(extrinsic_strength=1.0).collect()
        b = _wfc_trainer(extrinsic_strength=0.5).collect()
        assert np.allclose(a.reward * 0.5, b.reward)


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        tr = _wfc_trainer()
        buf = tr.collect()
        tr.update(buf)
        path = tr.save_checkpoint(tmp_path / "ckpt.pt")
        fresh = _wfc_trainer()
        fresh.load_checkpoint(path)
        for key, value in tr.policy.state_dict().items():
            assert torch.equal(value, fresh.policy.state_dict()[key])


class TestRangeWarnings:
    def test_epsilon_outside_range_warns(self):
        cfg = TrainerConfig(epsilon=0.5)
        msgs = cfg.range_warnings()
        assert any("epsilon" in m for m in msgs)

    def test_defaults_clean(self):
        assert TrainerConfig(max_steps=500_000).range_warnings() == []
