#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Reward components for the four agent roles and their composition into the global reward.

The decision agent is trained on the global reward (tracking + navigation + the behavioural
terms, or the collision penalty); each first-layer agent is trained only on its own task reward
(detection IoU, movement center error, obstacle distance error).
"""
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from aotlab.sensing.camera import BBox, CameraModel


@dataclass(frozen=True)
class RewardWeights:
    lambda_track: float = 1.0
    lambda_nav: float = 1.0
    lambda_diff: float = 0.5
    lambda_detect: float = 1.0
    lambda_obstacle: float = 0.1
    lambda_movement: float = 1.0
    collision_penalty: float = -50.0
    stall_penalty: float = -3.0

    def __post_init__(self):
        for name in (
            "lambda_track",
            "lambda_nav",
            "lambda_diff",
            "lambda_detect",
            "lambda_obstacle",
            "lambda_movement",
        ):
            value = getattr(self, name)
            if not value >= 0 or value == float("inf"):
                raise ValueError(f"{name} must be finite and nonnegative, got {value}")

    @classmethod
    def from_config(cls, config) -> "RewardWeights":
        r = config.rewards
        return cls(
            lambda_track=r.lambda_track,
            lambda_nav=r.lambda_nav,
            lambda_diff=r.lambda_diff,
            lambda_detect=r.lambda_detect,
            lambda_obstacle=r.lambda_obstacle,
            lambda_movement=r.lambda_movement,
            collision_penalty=r.collision_penalty,
            stall_penalty=r.stall_penalty,
        )


@dataclass(frozen=True)
class RewardBreakdown:
    r_track: float = 0.0
    r_nav: float = 0.0
    r_move: float = 0.0
    r_steer: float = 0.0
    r_diff: float = 0.0
    r_detect: float = 0.0
    r_obstacle: float = 0.0
    r_movement: float = 0.0
    collision: bool = False
    global_reward: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def tracking_reward(s_m: float, s_frame: float, lambda_track: float) -> float:
    """Peaks at lambda_track when the box covers a quarter of the frame."""
    ratio = s_m / (0.25 * s_frame)
    return min(ratio, 2.0 - ratio) * lambda_track


def navigation_reward(m: Optional[BBox], cam: CameraModel, lambda_nav: float) -> float:
    """Manhattan offset of the box center from the frame center, scaled to [-lambda_nav, 0]."""
    if m is None:
        return -lambda_nav
    cx, cy = m.center
    fx, fy = cam.frame_center
    return -(abs(cx - fx) + abs(cy - fy)) / (fx + fy) * lambda_nav


def behavioural_rewards(
    speed: float,
    dv: float,
    dv_previous: float,
    dalpha: float,
    lambda_diff: float,
    stall_penalty: float = -3.0,
):
    """
    Returns:
        (r_move, r_steer, r_diff); r_diff is a penalty magnitude subtracted in the global reward.
    """
    r_move = stall_penalty if speed == 0.0 and dv <= 0.0 else 0.0
    r_steer = stall_penalty if speed == 0.0 and dalpha != 0.0 else 0.0
    r_diff = abs(dv - dv_previous) * lambda_diff
    return r_move, r_steer, r_diff


def detection_reward(m: Optional[BBox], a_d: BBox, lambda_detect: float) -> float:
    if m is None:
        return 0.0
    return m.iou(a_d) * lambda_detect


def obstacle_reward(a_a: float, d_true: float, lambda_obstacle: float) -> float:
    return -abs(a_a - d_true) * lambda_obstacle


def movement_reward(
    a_n: Sequence[float], m: Optional[BBox], cam: CameraModel, lambda_movement: float
) -> float:
    """Manhattan error of the predicted center in pixels over the frame half perimeter."""
    if m is None:
        return -lambda_movement
    cx, cy = m.center
    error = abs(a_n[0] - cx) + abs(a_n[1] - cy)
    return -error / (cam.frame_w + cam.frame_h) * lambda_movement


def compose_global(
    breakdown: RewardBreakdown, collided: bool, collision_penalty: float = -50.0
) -> float:
    if collided:
        return collision_penalty
    return (
        breakdown.r_track
        + breakdown.r_nav
        + breakdown.r_move
        + breakdown.r_steer
        - breakdown.r_diff
    )


def evaluate_step(
    pre_state,
    pre_bbox: Optional[BBox],
    pre_nearest: float,
    post_bbox: Optional[BBox],
    action,
    collided: bool,
    weights: RewardWeights,
    cam: CameraModel,
) -> RewardBreakdown:
    """
    All reward components of one environment step.

    First-layer task rewards score the predictions against the frame the agents observed
    (`pre_bbox`, `pre_nearest`); tracking and navigation score the frame after the move
    (`post_bbox`); the behavioural terms use the speed the navigation action was applied to.
    `action` carries the decoded joint action (a_d and a_n normalized to the frame, a_a in
    meters, nav as (dv, dalpha)); first-layer fields may be None for the single-agent baseline.
    """
    dv, dalpha = action.nav
    r_move, r_steer, r_diff = behavioural_rewards(
        pre_state.tracker_speed,
        dv,
        pre_state.last_accel,
        dalpha,
        weights.lambda_diff,
        weights.stall_penalty,
    )
    s_m = post_bbox.area if post_bbox is not None else 0.0
    r_detect = r_obstacle = r_movement = 0.0
    if action.a_d is not None:
        r_detect = detection_reward(pre_bbox, action.a_d.to_pixels(cam), weights.lambda_detect)
    if action.a_n is not None:
        a_n_px = (action.a_n[0] * cam.frame_w, action.a_n[1] * cam.frame_h)
        r_movement = movement_reward(a_n_px, pre_bbox, cam, weights.lambda_movement)
    if action.a_a is not None:
        r_obstacle = obstacle_reward(action.a_a, pre_nearest, weights.lambda_obstacle)
    partial = RewardBreakdown(
        r_track=tracking_reward(s_m, cam.frame_area, weights.lambda_track),
        r_nav=navigation_reward(post_bbox, cam, weights.lambda_nav),
        r_move=r_move,
        r_steer=r_steer,
        r_diff=r_diff,
        r_detect=r_detect,
        r_obstacle=r_obstacle,
        r_movement=r_movement,
        collision=collided,
    )
    return RewardBreakdown(
        **{
            **partial.to_dict(),
            "global_reward": compose_global(partial, collided, weights.collision_penalty),
        }
    )
