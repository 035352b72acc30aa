#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Kinematic tracking world: a bicycle-model tracker following a target that moves along the map's
path, among static and moving obstacles.

`WorldState` is an immutable value; `step()` returns a new state and never mutates its input.
"""
import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from aotlab.simworld.geometry import Obstacle
from aotlab.simworld.maps import MapSpec, advance_target

NAV_BOUND = 0.5


class RejectedActionError(ValueError):
    def __init__(self, action, reason: str):
        self.action = action
        self.reason = reason

    def __str__(self):
        return f"navigation action {self.action!r} rejected: {self.reason}"


@dataclass(frozen=True)
class WorldParams:
    dt: float = 0.1
    accel_scale: float = 10.0
    v_max: float = 5.0
    wheelbase: float = 2.0
    tracker_radius: float = 0.8
    d_max: float = 20.0
    spawn_jitter: float = 0.0

    @classmethod
    def from_config(cls, config) -> "WorldParams":
        w = config.world
        return cls(
            dt=w.dt,
            accel_scale=w.accel_scale,
            v_max=w.v_max,
            wheelbase=w.wheelbase,
            tracker_radius=w.tracker_radius,
            d_max=w.d_max,
            spawn_jitter=w.spawn_jitter,
        )


@dataclass(frozen=True)
class WorldState:
    tracker_pos: Tuple[float, float]
    tracker_heading: float
    tracker_speed: float
    last_accel: float
    last_steer: float
    target_pos: Tuple[float, float]
    target_path_progress: float
    obstacles: Tuple[Obstacle, ...]
    dynamic_phases: Tuple[float, ...]
    step_index: int
    rng_state: int
    bounds: Tuple[float, float, float, float]
    path_complete: bool = False

    def pose(self) -> Tuple[float, float, float]:
        return self.tracker_pos[0], self.tracker_pos[1], self.tracker_heading


def _wrap_angle(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def _placed_obstacles(world_map: MapSpec, phases) -> Tuple[Obstacle, ...]:
    placed, k = [], 0
    for obs in world_map.obstacles:
        if obs.dynamic:
            placed.append(obs.placed(phases[k]))
            k += 1
        else:
            placed.append(obs)
    return tuple(placed)


def reset_world(world_map: MapSpec, params: WorldParams, seed: int = 0) -> WorldState:
    """
    Initial state: target at the start of its path, tracker at the map's spawn pose (perturbed
    by a seeded uniform jitter when `params.spawn_jitter` is positive).
    """
    x, y = world_map.spawn_position
    heading = world_map.spawn_heading
    if params.spawn_jitter > 0:
        rng = np.random.default_rng(seed)
        jx, jy = rng.uniform(-params.spawn_jitter, params.spawn_jitter, size=2)
        x, y = x + float(jx), y + float(jy)
        heading += float(rng.uniform(-0.1, 0.1) * params.spawn_jitter)
    phases = tuple(0.0 for _ in world_map.dynamic_obstacles)
    start = world_map.path.position_at(0.0)
    return WorldState(
        tracker_pos=(float(x), float(y)),
        tracker_heading=float(heading),
        tracker_speed=0.0,
        last_accel=0.0,
        last_steer=0.0,
        target_pos=(float(start[0]), float(start[1])),
        target_path_progress=0.0,
        obstacles=_placed_obstacles(world_map, phases),
        dynamic_phases=phases,
        step_index=0,
        rng_state=int(seed),
        bounds=world_map.bounds,
    )


def step(
    state: WorldState, nav, dt: float, world_map: MapSpec, params: WorldParams
) -> WorldState:
    """
    Advance the world by `dt` seconds under the navigation action (dv, dalpha).

    Raises:
        RejectedActionError if either action component lies outside [-0.5, 0.5] or `dt` is not
        positive. Decoded agent actions always satisfy the bounds.
    """
    dv, dalpha = float(nav[0]), float(nav[1])
    if not (math.isfinite(dv) and math.isfinite(dalpha)):
        raise RejectedActionError(nav, "non-finite component")
    if abs(dv) > NAV_BOUND or abs(dalpha) > NAV_BOUND:
        raise RejectedActionError(nav, f"components must lie in [-{NAV_BOUND}, {NAV_BOUND}]")
    if not dt > 0:
        raise RejectedActionError(nav, f"time step must be positive, got {dt}")

    speed = min(max(state.tracker_speed + dv * dt * params.accel_scale, 0.0), params.v_max)
    heading = state.tracker_heading + speed / params.wheelbase * math.tan(dalpha) * dt
    if abs(heading) > math.pi:
        heading = _wrap_angle(heading)
    x = state.tracker_pos[0] + speed * math.cos(heading) * dt
    y = state.tracker_pos[1] + speed * math.sin(heading) * dt

    progress, target, complete = advance_target(world_map, state.target_path_progress, dt)
    phases = tuple(
        phase + obs.speed * dt
        for phase, obs in zip(state.dynamic_phases, world_map.dynamic_obstacles)
    )
    return replace(
        state,
        tracker_pos=(x, y),
        tracker_heading=heading,
        tracker_speed=speed,
        last_accel=dv,
        last_steer=dalpha,
        target_pos=(float(target[0]), float(target[1])),
        target_path_progress=progress,
        obstacles=_placed_obstacles(world_map, phases) if phases else state.obstacles,
        dynamic_phases=phases,
        step_index=state.step_index + 1,
        path_complete=complete,
    )


def check_collision(state: WorldState, params: WorldParams) -> bool:
    """True iff the tracker disc intersects an obstacle or leaves the world bounds."""
    x, y = state.tracker_pos
    r = params.tracker_radius
    xmin, ymin, xmax, ymax = state.bounds
    if x - r < xmin or x + r > xmax or y - r < ymin or y + r > ymax:
        return True
    return any(obs.distance_to(state.tracker_pos) < r for obs in state.obstacles)
