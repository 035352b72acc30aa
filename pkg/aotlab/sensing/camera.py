#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Pinhole camera mounted on the tracker: ground-truth target boxes and forward range sensing.

Image coordinates follow the usual convention: u grows to the right, v grows downward, origin at
the top-left corner of the frame.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from aotlab.simworld.geometry import raycast

NEAR_PLANE = 0.1


@dataclass(frozen=True)
class CameraModel:
    frame_w: int = 128
    frame_h: int = 96
    hfov: float = math.pi / 2
    cam_height: float = 1.0
    target_width: float = 1.0
    target_height: float = 1.5
    n_rays: int = 31

    def __post_init__(self):
        if self.frame_w <= 0 or self.frame_h <= 0:
            raise ValueError(f"frame size must be positive, got {self.frame_w}x{self.frame_h}")
        if not 0.0 < self.hfov < math.pi:
            raise ValueError(f"hfov must lie in (0, pi), got {self.hfov}")

    @classmethod
    def from_config(cls, config) -> "CameraModel":
        c = config.camera
        return cls(
            frame_w=c.frame_w,
            frame_h=c.frame_h,
            hfov=c.hfov,
            cam_height=c.cam_height,
            target_width=c.target_width,
            target_height=c.target_height,
            n_rays=c.n_rays,
        )

    @property
    def focal_px(self) -> float:
        return self.frame_w / (2.0 * math.tan(self.hfov / 2.0))

    @property
    def frame_area(self) -> float:
        return float(self.frame_w * self.frame_h)

    @property
    def frame_center(self) -> Tuple[float, float]:
        return self.frame_w / 2.0, self.frame_h / 2.0


@dataclass(frozen=True)
class BBox:
    x_l: float
    y_l: float
    x_r: float
    y_r: float

    @property
    def width(self) -> float:
        return self.x_r - self.x_l

    @property
    def height(self) -> float:
        return self.y_r - self.y_l

    @property
    def area(self) -> float:
        return max(self.width, 0.0) * max(self.height, 0.0)

    @property
    def center(self) -> Tuple[float, float]:
        return 0.5 * (self.x_l + self.x_r), 0.5 * (self.y_l + self.y_r)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return self.x_l, self.y_l, self.x_r, self.y_r

    def normalized(self, cam: CameraModel) -> "BBox":
        return BBox(
            self.x_l / cam.frame_w,
            self.y_l / cam.frame_h,
            self.x_r / cam.frame_w,
            self.y_r / cam.frame_h,
        )

    def to_pixels(self, cam: CameraModel) -> "BBox":
        return BBox(
            self.x_l * cam.frame_w,
            self.y_l * cam.frame_h,
            self.x_r * cam.frame_w,
            self.y_r * cam.frame_h,
        )

    def clamped(self, cam: CameraModel) -> "BBox":
        return BBox(
            min(max(self.x_l, 0.0), cam.frame_w),
            min(max(self.y_l, 0.0), cam.frame_h),
            min(max(self.x_r, 0.0), cam.frame_w),
            min(max(self.y_r, 0.0), cam.frame_h),
        )

    def iou(self, other: "BBox") -> float:
        ix = min(self.x_r, other.x_r) - max(self.x_l, other.x_l)
        iy = min(self.y_r, other.y_r) - max(self.y_l, other.y_l)
        inter = max(ix, 0.0) * max(iy, 0.0)
        union = self.area + other.area - inter
        return inter / union if union > 0.0 else 0.0


def target_bearing(state) -> Tuple[float, float]:
    """Bearing of the target (radians, positive to the tracker's right) and its distance."""
    dx = state.target_pos[0] - state.tracker_pos[0]
    dy = state.target_pos[1] - state.tracker_pos[1]
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        return 0.0, 0.0
    relative = math.atan2(dy, dx) - state.tracker_heading
    relative = math.atan2(math.sin(relative), math.cos(relative))
    return -relative, distance


def project_bbox(
    state, cam: CameraModel, d_max: float = 20.0, clamp: bool = True
) -> Optional[BBox]:
    """
    Ground-truth box of the target in the camera frame, or None when the target is outside the
    field of view, beyond `d_max`, or hidden behind an obstacle on the line of sight.
    """
    beta, distance = target_bearing(state)
    if abs(beta) > cam.hfov / 2.0 or distance > d_max:
        return None
    if distance > 0.0:
        sight = math.atan2(
            state.target_pos[1] - state.tracker_pos[1], state.target_pos[0] - state.tracker_pos[0]
        )
        if raycast(state.tracker_pos, sight, state.obstacles, d_max) < distance:
            return None
    d = max(distance, NEAR_PLANE)
    f = cam.focal_px
    u_c = cam.frame_w / 2.0 * (1.0 + math.tan(beta) / math.tan(cam.hfov / 2.0))
    half_w = 0.5 * f * cam.target_width / d
    box = BBox(
        u_c - half_w,
        cam.frame_h / 2.0 - f * (cam.target_height - cam.cam_height) / d,
        u_c + half_w,
        cam.frame_h / 2.0 + f * cam.cam_height / d,
    )
    return box.clamped(cam) if clamp else box


def ray_offsets(cam: CameraModel) -> np.ndarray:
    return np.linspace(-cam.hfov / 2.0, cam.hfov / 2.0, cam.n_rays)


def nearest_obstacle_distance(state, cam: CameraModel, d_max: float = 20.0) -> float:
    """
    Smallest range over the ray fan spanning the field of view, the straight-ahead ray included.
    """
    heading = state.tracker_heading
    best = raycast(state.tracker_pos, heading, state.obstacles, d_max)
    for offset in ray_offsets(cam):
        best = min(best, raycast(state.tracker_pos, heading + offset, state.obstacles, d_max))
    return best
