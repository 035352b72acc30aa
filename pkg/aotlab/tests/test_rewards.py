#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Tests for the reward components and the global reward
"""
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from aotlab.rewards.components import (
    RewardBreakdown,
    RewardWeights,
    behavioural_rewards,
    compose_global,
    detection_reward,
    evaluate_step,
    movement_reward,
    navigation_reward,
    obstacle_reward,
    tracking_reward,
)
from aotlab.sensing.camera import BBox, CameraModel
from aotlab.utilities.config import get_config

W, H = 128, 96


@pytest.fixture
def camera():
    return CameraModel()


def box_at(cx, cy, half=4.0):
    return BBox(cx - half, cy - half, cx + half, cy + half)


@pytest.mark.unit
class TestTrackingReward:
    @pytest.mark.parametrize(
        "s_m,expected",
        [(0.25 * W * H, 1.0), (0.0, 0.0), (W * H, -2.0), (0.125 * W * H, 0.5)],
    )
    def test_values(self, s_m, expected):
        assert tracking_reward(s_m, W * H, 1.0) == pytest.approx(expected)

    def test_peak_at_quarter_frame(self):
        grid = np.linspace(0.0, W * H, 1001)
        values = [tracking_reward(s, W * H, 1.0) for s in grid]
        assert grid[int(np.argmax(values))] == pytest.approx(0.25 * W * H, rel=1e-3)
        assert min(values) >= -2.0 and max(values) <= 1.0


@pytest.mark.unit
class TestNavigationReward:
    def test_centered(self, camera):
        assert navigation_reward(box_at(64, 48), camera, 1.0) == 0.0

    def test_corner(self, camera):
        assert navigation_reward(box_at(0, 0), camera, 1.0) == pytest.approx(-1.0)

    def test_offset(self, camera):
        assert navigation_reward(box_at(96, 48), camera, 1.0) == pytest.approx(-32 / 112)

    def test_invisible_is_worst_case(self, camera):
        assert navigation_reward(None, camera, 0.7) == -0.7

    @pytest.mark.parametrize("seed", range(3))
    def test_range(self, camera, seed):
        rng = np.random.default_rng(seed)
        for _ in range(100):
            r = navigation_reward(box_at(rng.uniform(0, W), rng.uniform(0, H)), camera, 1.0)
            assert -1.0 <= r <= 0.0


@pytest.mark.unit
class TestBehaviouralRewards:
    def test_stall_penalty(self):
        assert behavioural_rewards(0.0, -0.1, 0.0, 0.0, 0.5)[0] == -3.0

    def test_steering_while_stopped(self):
        assert behavioural_rewards(0.0, 0.2, 0.0, 0.2, 0.5)[1] == -3.0

    def test_moving_has_no_penalties(self):
        r_move, r_steer, _ = behavioural_rewards(1.0, -0.1, 0.0, 0.2, 0.5)
        assert r_move == 0.0 and r_steer == 0.0

    def test_accelerating_from_rest_is_not_penalized(self):
        assert behavioural_rewards(0.0, 0.1, 0.0, 0.0, 0.5)[0] == 0.0

    def test_jerk(self):
        assert behavioural_rewards(1.0, 0.3, 0.1, 0.0, 0.5)[2] == pytest.approx(0.1)


@pytest.mark.unit
class TestFirstLayerRewards:
    def test_detection_exact(self):
        m = BBox(10, 10, 30, 40)
        assert detection_reward(m, m, 1.0) == 1.0

    def test_detection_disjoint(self):
        assert detection_reward(BBox(0, 0, 1, 1), BBox(5, 5, 6, 6), 1.0) == 0.0

    def test_detection_partial(self):
        assert detection_reward(BBox(0, 0, 2, 2), BBox(1, 1, 3, 3), 1.0) == pytest.approx(1 / 7)

    def test_detection_invisible(self):
        assert detection_reward(None, BBox(0, 0, 2, 2), 1.0) == 0.0

    @pytest.mark.parametrize(
        "a_a,d_true,expected", [(4.0, 4.0, 0.0), (5.0, 3.0, -0.2), (0.0, 20.0, -2.0)]
    )
    def test_obstacle(self, a_a, d_true, expected):
        assert obstacle_reward(a_a, d_true, 0.1) == pytest.approx(expected)

    def test_movement_exact(self, camera):
        assert movement_reward((40.0, 30.0), box_at(40, 30), camera, 1.0) == 0.0

    def test_movement_worst_case(self, camera):
        assert movement_reward((0.0, 0.0), box_at(128, 96), camera, 1.0) == pytest.approx(-1.0)

    def test_movement_offset(self, camera):
        r = movement_reward((64.0, 48.0), box_at(96, 48), camera, 1.0)
        assert r == pytest.approx(-32 / 224)

    def test_movement_invisible(self, camera):
        assert movement_reward((64.0, 48.0), None, camera, 1.0) == -1.0


@pytest.mark.unit
class TestComposeGlobal:
    def test_collision(self):
        assert compose_global(RewardBreakdown(r_track=1.0), True) == -50.0

    def test_zero(self):
        assert compose_global(RewardBreakdown(), False) == 0.0

    def test_additive(self):
        b = RewardBreakdown(r_track=1.0, r_nav=-0.3, r_diff=0.1)
        assert compose_global(b, False) == pytest.approx(0.6)

    def test_weights_from_config(self):
        weights = RewardWeights.from_config(get_config())
        assert weights == RewardWeights()

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError, match="lambda_nav"):
            RewardWeights(lambda_nav=-1.0)


@pytest.mark.unit
class TestOracle:
    """Every component against a direct evaluation on random inputs."""

    def test_random_inputs(self, camera):
        rng = np.random.default_rng(1234)
        frame = W * H
        for _ in range(1000):
            lam = rng.uniform(0.0, 2.0)
            s_m = rng.uniform(0.0, frame)
            x = s_m / (frame / 4)
            assert abs(tracking_reward(s_m, frame, lam) - lam * min(x, 2 - x)) < 1e-9

            corners = np.sort(rng.uniform(0, [W, W]))
            rows = np.sort(rng.uniform(0, [H, H]))
            m = BBox(corners[0], rows[0], corners[1], rows[1])
            cx, cy = (corners[0] + corners[1]) / 2, (rows[0] + rows[1]) / 2
            expected_nav = -lam * (abs(cx - W / 2) + abs(cy - H / 2)) / (W / 2 + H / 2)
            assert abs(navigation_reward(m, camera, lam) - expected_nav) < 1e-9

            a_n = rng.uniform(0, [W, H])
            expected_move = -lam * (abs(a_n[0] - cx) + abs(a_n[1] - cy)) / (W + H)
            assert abs(movement_reward(a_n, m, camera, lam) - expected_move) < 1e-9

            a_a, d_true = rng.uniform(0, 20, size=2)
            assert abs(obstacle_reward(a_a, d_true, lam) + lam * abs(a_a - d_true)) < 1e-9

            other = np.sort(rng.uniform(0, [W, W])), np.sort(rng.uniform(0, [H, H]))
            a_d = BBox(other[0][0], other[1][0], other[0][1], other[1][1])
            iw = max(0.0, min(m.x_r, a_d.x_r) - max(m.x_l, a_d.x_l))
            ih = max(0.0, min(m.y_r, a_d.y_r) - max(m.y_l, a_d.y_l))
            union = m.area + a_d.area - iw * ih
            iou = iw * ih / union if union > 0 else 0.0
            assert abs(detection_reward(m, a_d, lam) - lam * iou) < 1e-9

            dv, dv_prev, dalpha = rng.uniform(-0.5, 0.5, size=3)
            r_diff = behavioural_rewards(1.0, dv, dv_prev, dalpha, lam)[2]
            assert abs(r_diff - lam * abs(dv - dv_prev)) < 1e-9


@pytest.mark.unit
class TestEvaluateStep:
    @pytest.fixture
    def pre_state(self):
        return SimpleNamespace(tracker_speed=2.0, last_accel=0.1)

    def test_scores_first_layer_against_observed_frame(self, pre_state, camera):
        pre_box = BBox(32.0, 24.0, 96.0, 72.0)
        action = SimpleNamespace(
            nav=(0.3, 0.0),
            a_d=pre_box.normalized(camera),
            a_n=(0.5, 0.5),
            a_a=7.0,
        )
        b = evaluate_step(
            pre_state, pre_box, 7.0, box_at(64, 48), action, False, RewardWeights(), camera
        )
        assert b.r_detect == pytest.approx(1.0)
        assert b.r_movement == pytest.approx(0.0)
        assert b.r_obstacle == pytest.approx(0.0)
        assert b.r_nav == 0.0
        assert b.r_diff == pytest.approx(0.1)
        assert b.global_reward == pytest.approx(b.r_track - 0.1)

    def test_single_agent_action(self, pre_state, camera):
        action = SimpleNamespace(nav=(0.0, 0.0), a_d=None, a_n=None, a_a=None)
        b = evaluate_step(pre_state, None, 20.0, None, action, False, RewardWeights(), camera)
        assert (b.r_detect, b.r_movement, b.r_obstacle) == (0.0, 0.0, 0.0)
        assert b.r_nav == -1.0

    def test_collision_overrides(self, pre_state, camera):
        action = SimpleNamespace(nav=(0.0, 0.0), a_d=None, a_n=None, a_a=None)
        weights = replace(RewardWeights(), collision_penalty=-50.0)
        b = evaluate_step(pre_state, None, 20.0, box_at(64, 48), action, True, weights, camera)
        assert b.collision and b.global_reward == -50.0
