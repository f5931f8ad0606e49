"""Advantage estimation and the clipped surrogate versus brute-force oracles."""

import itertools

import numpy as np
import pytest

from ecomarl.core.errors import ContractError
from ecomarl.ppo.gae import compute_gae, ppo_clip_objective


def brute_force_gae(rewards, values, dones, gamma, lam, bootstrap):
    """Direct double-loop sum of (gamma*lam)^l * delta_{t+l} within episodes."""
    n = len(rewards)
    values_ext = list(values) + [bootstrap]
    deltas = []
    for t in range(n):
        next_v = 0.0 if dones[t] else values_ext[t + 1]
        deltas.append(rewards[t] + gamma * next_v - values[t])
    adv = np.zeros(n)
    for t in range(n):
        acc = 0.0
        factor = 1.0
        for l in range(t, n):
            acc += factor * deltas[l]
            if dones[l]:
                break
            factor *= gamma * lam
        adv[t] = acc
    return adv


class TestGae:
    def test_single_terminal_step(self):
        adv, ret = compute_gae([2.0], [0.5], [True], gamma=1.0, lam=1.0)
        assert adv[0] == pytest.approx(1.5)
        assert ret[0] == pytest.approx(2.0)

    def test_hand_recursion_example(self):
        # delta1 = 1 + 0.9*0 - 0.5 = 0.5; delta0 = 1 + 0.9*0.5 - 0.5 = 0.95
        # A0 = 0.95 + 0.9*0.95*0.5 = 1.3775
        adv, ret = compute_gae([1.0, 1.0], [0.5, 0.5], [False, True], gamma=0.9, lam=0.95)
        assert adv[1] == pytest.approx(0.5, abs=1e-12)
        assert adv[0] == pytest.approx(1.3775, abs=1e-12)
        assert np.allclose(ret, adv + [0.5, 0.5])

    def test_lambda_zero_is_one_step_td(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 20))
            r = rng.normal(size=n)
            v = rng.normal(size=n)
            d = rng.random(n) < 0.2
            adv, _ = compute_gae(r, v, d, gamma=0.93, lam=0.0, bootstrap_value=0.4)
            for t in range(n):
                next_v = 0.0 if d[t] else (0.4 if t == n - 1 else v[t + 1])
                assert adv[t] == pytest.approx(r[t] + 0.93 * next_v - v[t], abs=1e-12)

    def test_monte_carlo_equivalence_exhaustive(self):
        """lambda=1, gamma=1 on terminal episodes equals Monte-Carlo advantages,
        over every reward/value grid combination up to length 5."""
        reward_grid = (-1.0, 0.5, 2.0)
        value_grid = (0.0, 0.7)
        for n in range(1, 6):
            for rewards in itertools.product(reward_grid, repeat=n):
                for values in itertools.product(value_grid, repeat=n):
                    dones = [False] * (n - 1) + [True]
                    adv, _ = compute_gae(list(rewards), list(values), dones, 1.0, 1.0)
                    for t in range(n):
                        mc = sum(rewards[t:]) - values[t]
                        assert adv[t] == pytest.approx(mc, abs=1e-9)

    def test_matches_brute_force_general(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 6))
            r = rng.normal(size=n)
            v = rng.normal(size=n)
            d = rng.random(n) < 0.3
            boot = float(rng.normal())
            adv, _ = compute_gae(r, v, d, 0.9, 0.95, boot)
            expected = brute_force_gae(r, v, d, 0.9, 0.95, boot)
            assert np.allclose(adv, expected, atol=1e-9)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ContractError):
            compute_gae([1.0, 2.0], [0.5], [False, True], 0.9, 0.95)


class TestClipObjective:
    def test_on_policy_identity(self):
        assert ppo_clip_objective(1.0, 1.0, 0.2) == pytest.approx(1.0)

    def test_clip_branch_positive_advantage(self):
        assert ppo_clip_objective(2.0, 1.0, 0.2) == pytest.approx(1.2)

    def test_min_branch_negative_advantage(self):
        assert ppo_clip_objective(0.5, -1.0, 0.2) == pytest.approx(-0.8)

    def test_pessimism_property_fuzz(self, rng):
        # the objective never exceeds the unclipped surrogate: gains are
        # capped for A>0 and penalties deepened for A<0
        ratio = rng.uniform(0.01, 5.0, 10_000)
        adv = rng.normal(size=10_000)
        obj = ppo_clip_objective(ratio, adv, 0.2)
        raw = ratio * adv
        clipped = np.clip(ratio, 0.8, 1.2) * adv
        assert (obj <= raw + 1e-12).all()
        assert (obj <= clipped + 1e-12).all()
        positive = adv > 0
        # for positive advantages the cap binds exactly at the clip boundary
        big = positive & (ratio > 1.2)
        assert np.allclose(obj[big], 1.2 * adv[big])
