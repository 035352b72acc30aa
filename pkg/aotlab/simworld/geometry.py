#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Planar geometry of the tracking world: polylines, obstacles and ray casting.
"""
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np

Point = Tuple[float, float]

# rays only report hits strictly in front of the origin
_RAY_EPS = 1e-9


class ObstacleKind(Enum):
    circle = 0
    rectangle = 1


class Polyline:
    """Piecewise-linear path parameterized by arc length."""

    def __init__(self, points):
        self.points = np.asarray(points, dtype=np.float64)
        if self.points.ndim != 2 or self.points.shape[1] != 2 or len(self.points) < 2:
            raise ValueError(f"a polyline needs at least two (x, y) points, got {points!r}")
        seg = np.diff(self.points, axis=0)
        self.segment_lengths = np.hypot(seg[:, 0], seg[:, 1])
        self.cumulative = np.concatenate([[0.0], np.cumsum(self.segment_lengths)])
        self.length = float(self.cumulative[-1])

    def position_at(self, progress: float) -> np.ndarray:
        s = min(max(float(progress), 0.0), self.length)
        i = int(np.searchsorted(self.cumulative, s, side="right")) - 1
        i = min(max(i, 0), len(self.segment_lengths) - 1)
        seg_len = self.segment_lengths[i]
        frac = 0.0 if seg_len == 0.0 else (s - self.cumulative[i]) / seg_len
        return self.points[i] + frac * (self.points[i + 1] - self.points[i])

    def heading_at(self, progress: float) -> float:
        s = min(max(float(progress), 0.0), self.length)
        i = int(np.searchsorted(self.cumulative, s, side="right")) - 1
        i = min(max(i, 0), len(self.segment_lengths) - 1)
        d = self.points[i + 1] - self.points[i]
        return float(np.arctan2(d[1], d[0]))

    def ping_pong(self, phase: float) -> np.ndarray:
        """Position after travelling `phase` meters back and forth along the path."""
        if self.length == 0.0:
            return self.points[0].copy()
        s = float(phase) % (2.0 * self.length)
        if s > self.length:
            s = 2.0 * self.length - s
        return self.position_at(s)


@dataclass(frozen=True)
class Obstacle:
    kind: ObstacleKind
    center: Point = (0.0, 0.0)
    radius: float = 0.0
    lower: Point = (0.0, 0.0)
    upper: Point = (0.0, 0.0)
    path: Optional[Polyline] = None
    speed: float = 0.0

    def __post_init__(self):
        if self.kind is ObstacleKind.circle and not self.radius > 0:
            raise ValueError(f"circle obstacle needs a positive radius, got {self.radius}")
        if self.kind is ObstacleKind.rectangle and not (
            self.upper[0] > self.lower[0] and self.upper[1] > self.lower[1]
        ):
            raise ValueError(
                f"rectangle obstacle needs positive extents, got {self.lower}-{self.upper}"
            )
        if self.path is not None and self.speed < 0:
            raise ValueError(f"obstacle speed must be nonnegative, got {self.speed}")

    @property
    def dynamic(self) -> bool:
        return self.path is not None

    def placed(self, phase: float) -> "Obstacle":
        """The obstacle moved to its position after travelling `phase` meters along its path."""
        if self.path is None:
            return self
        pos = self.path.ping_pong(phase)
        if self.kind is ObstacleKind.circle:
            return replace(self, center=(float(pos[0]), float(pos[1])))
        offset = pos - self.path.points[0]
        return replace(
            self,
            lower=(self.lower[0] + offset[0], self.lower[1] + offset[1]),
            upper=(self.upper[0] + offset[0], self.upper[1] + offset[1]),
        )

    def translated(self, dx: float, dy: float) -> "Obstacle":
        return replace(
            self,
            center=(self.center[0] + dx, self.center[1] + dy),
            lower=(self.lower[0] + dx, self.lower[1] + dy),
            upper=(self.upper[0] + dx, self.upper[1] + dy),
            path=None if self.path is None else Polyline(self.path.points + [dx, dy]),
        )

    def distance_to(self, point) -> float:
        """Signed distance from `point` to the obstacle boundary, negative inside."""
        px, py = float(point[0]), float(point[1])
        if self.kind is ObstacleKind.circle:
            return float(np.hypot(px - self.center[0], py - self.center[1])) - self.radius
        dx = max(self.lower[0] - px, 0.0, px - self.upper[0])
        dy = max(self.lower[1] - py, 0.0, py - self.upper[1])
        if dx > 0.0 or dy > 0.0:
            return float(np.hypot(dx, dy))
        return -min(
            px - self.lower[0], self.upper[0] - px, py - self.lower[1], self.upper[1] - py
        )

    def contains(self, point) -> bool:
        return self.distance_to(point) <= 0.0


def _ray_circle(origin, direction, center, radius) -> Optional[float]:
    oc = origin - center
    b = float(direction @ oc)
    c = float(oc @ oc) - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return None
    root = np.sqrt(disc)
    for t in (-b - root, -b + root):
        if t > _RAY_EPS:
            return float(t)
    return None


def _ray_box(origin, direction, lower, upper) -> Optional[float]:
    t_near, t_far = -np.inf, np.inf
    for axis in range(2):
        o, d = origin[axis], direction[axis]
        lo, hi = lower[axis], upper[axis]
        if abs(d) < 1e-15:
            if o < lo or o > hi:
                return None
            continue
        t1, t2 = (lo - o) / d, (hi - o) / d
        t_near = max(t_near, min(t1, t2))
        t_far = min(t_far, max(t1, t2))
    if t_near > t_far:
        return None
    for t in (t_near, t_far):
        if t > _RAY_EPS:
            return float(t)
    return None


def raycast(origin, direction: float, obstacles: Iterable[Obstacle], d_max: float) -> float:
    """
    Distance along the ray from `origin` at angle `direction` (radians) to the first obstacle
    boundary, or `d_max` when nothing is hit within range.
    """
    o = np.asarray(origin, dtype=np.float64)
    d = np.array([np.cos(direction), np.sin(direction)])
    best = float(d_max)
    for obs in obstacles:
        if obs.kind is ObstacleKind.circle:
            t = _ray_circle(o, d, np.asarray(obs.center), obs.radius)
        else:
            t = _ray_box(o, d, obs.lower, obs.upper)
        if t is not None and t < best:
            best = t
    return best
