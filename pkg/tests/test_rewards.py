"""Reward shaping: step bonus, power penalty, the holistic/task split
identity and the interference-based team reward."""

import numpy as np
import pytest

from platoonrl.env import ActionCommand, EnvConfig, PlatoonEnv
from platoonrl.rewards import (
    RewardWeights,
    bundle_for,
    global_reward,
    interference_score,
    local_reward,
    power_penalty,
    step_bonus,
    task_rewards,
)


class TestStepBonus:
    def test_zero_margin_pays(self):
        assert step_bonus(0.0, 1.0) == 1.0

    def test_negative_margin_pays_nothing(self):
        assert step_bonus(-0.1, 1.0) == 0.0

    def test_plateau(self):
        assert step_bonus(1e9, 2.5) == 2.5

    def test_scale_invariance_of_sign(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            x = rng.normal()
            scale = rng.uniform(0.1, 1000.0)
            assert step_bonus(x, 1.0) == step_bonus(x * scale, 1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            step_bonus(np.nan, 1.0)


class TestPowerPenalty:
    def test_endpoints_and_midpoint(self):
        assert power_penalty(0.0, 1.0) == 0.0
        assert power_penalty(1.0, 1.0) == 1.0
        assert power_penalty(0.5, 1.0) == 0.5

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            power_penalty(-0.1, 1.0)
        with pytest.raises(ValueError):
            power_penalty(1.5, 1.0)


class TestLocalReward:
    def test_direct_substitution(self):
        w = RewardWeights(cam_backlog=1.0, aoi=1.0, rate_bonus=1.0, power=1.0, success_revenue=1.0)
        r = local_reward(
            cam_remaining_frac=1.0,
            aoi_s=0.001,
            v2i_rate=0.0,
            min_v2i_rate=3.0,
            intra_mode=0,
            power_w=0.0,
            max_power_w=1.0,
            weights=w,
        )
        assert r == pytest.approx(-1.0 - 0.001)

    def test_vanishing_terms(self):
        w = RewardWeights(cam_backlog=1.0, aoi=2.0, rate_bonus=3.0, power=1.0, success_revenue=1.5)
        r = local_reward(0.0, 0.02, 5.0, 3.0, 0, 0.0, 1.0, w)
        assert r == pytest.approx(-2.0 * 0.02 + 3.0 * 1.5)

    def test_power_penalty_assignment_by_mode(self):
        w = RewardWeights()
        r_cam1, r_aoi1 = task_rewards(0.5, 0.01, 0.0, 3.0, 1, 0.8, 1.0, w)
        assert r_cam1 == pytest.approx(-w.cam_backlog * 0.5 - w.power * 0.8)
        assert r_aoi1 == pytest.approx(-w.aoi * 0.01)
        r_cam0, r_aoi0 = task_rewards(0.5, 0.01, 0.0, 3.0, 0, 0.8, 1.0, w)
        assert r_cam0 == pytest.approx(-w.cam_backlog * 0.5)
        assert r_aoi0 == pytest.approx(-w.aoi * 0.01 - w.power * 0.8)

    def test_decomposition_identity_bit_exact(self):
        rng = np.random.default_rng(1)
        w = RewardWeights(cam_backlog=1.3, aoi=4.7, rate_bonus=0.9, power=0.35)
        for _ in range(10_000):
            args = (
                rng.uniform(0, 1),
                rng.uniform(0, 0.2),
                rng.uniform(0, 25),
                3.0,
                int(rng.integers(0, 2)),
                rng.uniform(0, 1),
                1.0,
                w,
            )
            r_cam, r_aoi = task_rewards(*args)
            assert r_cam + r_aoi == local_reward(*args)

    def test_monotone_in_backlog_age_power(self):
        w = RewardWeights()
        base = (0.4, 0.01, 10.0, 3.0, 1, 0.5, 1.0, w)

        def reward(**kw):
            names = ("cam_remaining_frac", "aoi_s", "v2i_rate", "min_v2i_rate", "intra_mode", "power_w", "max_power_w", "weights")
            vals = dict(zip(names, base))
            vals.update(kw)
            return local_reward(**vals)

        assert reward(cam_remaining_frac=0.9) < reward(cam_remaining_frac=0.1)
        assert reward(aoi_s=0.09) < reward(aoi_s=0.005)
        assert reward(power_w=1.0) < reward(power_w=0.0)


class TestGlobalReward:
    def test_floor_gives_maximum(self):
        noise = 10 ** (-14.4)
        score = interference_score(np.zeros((4, 3)), noise)
        assert score == pytest.approx(-3 * np.log10(noise))
        worse = interference_score(np.full((4, 3), 1e-9), noise)
        assert worse < score

    def test_unit_argument_gives_zero(self):
        noise = 0.25
        score = interference_score(np.array([[0.75]]), noise)
        assert score == pytest.approx(0.0, abs=1e-15)

    def test_doubling_interference_drops_score_by_k_log2(self):
        noise = 10 ** (-14.4)
        rng = np.random.default_rng(2)
        interference = rng.uniform(1e-9, 1e-7, size=(5, 3))  # well above the floor
        before = interference_score(interference, noise)
        after = interference_score(2.0 * interference, noise)
        assert before - after == pytest.approx(3 * np.log10(2.0), rel=1e-4)

    def test_monotone_nonincreasing_per_entry(self):
        noise = 10 ** (-14.4)
        rng = np.random.default_rng(3)
        interference = rng.uniform(0, 1e-8, size=(3, 3))
        base = interference_score(interference, noise)
        bumped = interference.copy()
        bumped[1, 2] += 1e-9
        assert interference_score(bumped, noise) < base

    def test_affine_normalization(self):
        w = RewardWeights(global_offset=30.0, global_scale=1.0 / 15.0)
        noise = 10 ** (-14.4)
        interference = np.zeros((2, 2))
        expected = (interference_score(interference, noise) - 30.0) / 15.0
        assert global_reward(interference, noise, w) == pytest.approx(expected)

    def test_rejects_negative_interference(self):
        with pytest.raises(ValueError):
            interference_score(np.array([[-1e-12]]), 1e-14)

    def test_finite_for_all_valid_inputs(self):
        rng = np.random.default_rng(4)
        w = RewardWeights()
        for _ in range(200):
            interference = rng.uniform(0, 1e-6, size=(3, 3))
            interference[rng.integers(3), rng.integers(3)] = 0.0
            assert np.isfinite(global_reward(interference, 10 ** (-14.4), w))


class TestBundle:
    def test_bundle_identity_from_env_states(self):
        cfg = EnvConfig(num_platoons=2, platoon_size=2, num_subchannels=2, episode_slots=50)
        env = PlatoonEnv(cfg, np.random.default_rng(5))
        env.reset()
        w = RewardWeights()
        rng = np.random.default_rng(6)
        for _ in range(50):
            raw = rng.uniform(-1, 1, size=(2, 4))
            from platoonrl.env import decode_action

            cmds = [decode_action(raw[j], cfg) for j in range(2)]
            _, outcome, states = env.step(raw)
            team = global_reward(outcome.interference_w, cfg.noise_w, w)
            for j in range(2):
                b = bundle_for(states[j], float(outcome.v2i_rate[j]), cmds[j], team, cfg, w)
                assert b.local == b.task_cam + b.task_aoi
                assert b.team == team
                assert np.isfinite(b.local)

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            RewardWeights(aoi=-1.0)
        with pytest.raises(ValueError):
            RewardWeights(success_revenue=0.0)
