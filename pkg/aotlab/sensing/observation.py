#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Egocentric occupancy raster and the per-role observations built from one common sensor reading.

The raster covers the window ahead of the tracker, forward in [0, window] and lateral in
[-window/2, window/2] (lateral positive to the left). Its array layout is (channel, forward,
lateral) with channels obstacle, target, free, flattened in C order.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from aotlab.agents.roles import FIRST_LAYER, Role
from aotlab.sensing.camera import BBox, CameraModel, nearest_obstacle_distance, project_bbox
from aotlab.simworld.geometry import ObstacleKind
from aotlab.simworld.world import NAV_BOUND

N_CHANNELS = 3
PROPRIO_WIDTH = 3


@dataclass(frozen=True)
class RasterSpec:
    cells: int = 32
    window: float = 20.0
    target_radius: float = 0.5

    @classmethod
    def from_config(cls, config) -> "RasterSpec":
        r = config.raster
        return cls(cells=r.cells, window=r.window, target_radius=r.target_radius)

    @property
    def size(self) -> int:
        return N_CHANNELS * self.cells * self.cells

    def cell_centers(self):
        """Egocentric (forward, lateral) coordinates of every cell center, each (cells, cells)."""
        step = self.window / self.cells
        forward = (np.arange(self.cells) + 0.5) * step
        lateral = -0.5 * self.window + (np.arange(self.cells) + 0.5) * step
        return np.meshgrid(forward, lateral, indexing="ij")


@dataclass(frozen=True)
class Sensors:
    camera: CameraModel
    raster: RasterSpec
    v_max: float = 5.0
    d_max: float = 20.0

    @classmethod
    def from_config(cls, config) -> "Sensors":
        return cls(
            camera=CameraModel.from_config(config),
            raster=RasterSpec.from_config(config),
            v_max=config.world.v_max,
            d_max=config.world.d_max,
        )

    @property
    def base_width(self) -> int:
        return self.raster.size + PROPRIO_WIDTH


def render_raster(state, spec: RasterSpec) -> np.ndarray:
    fwd, lat = spec.cell_centers()
    c, s = np.cos(state.tracker_heading), np.sin(state.tracker_heading)
    px = state.tracker_pos[0] + fwd * c - lat * s
    py = state.tracker_pos[1] + fwd * s + lat * c

    obstacle = np.zeros_like(px, dtype=bool)
    for obs in state.obstacles:
        if obs.kind is ObstacleKind.circle:
            obstacle |= np.hypot(px - obs.center[0], py - obs.center[1]) <= obs.radius
        else:
            obstacle |= (
                (px >= obs.lower[0])
                & (px <= obs.upper[0])
                & (py >= obs.lower[1])
                & (py <= obs.upper[1])
            )
    target = np.hypot(px - state.target_pos[0], py - state.target_pos[1]) <= spec.target_radius
    free = ~(obstacle | target)
    return np.stack([obstacle, target, free]).astype(np.float64)


def proprioception(state, v_max: float) -> np.ndarray:
    return np.array(
        [
            state.tracker_speed / v_max,
            state.last_accel / NAV_BOUND,
            state.last_steer / NAV_BOUND,
        ]
    )


@dataclass(frozen=True)
class SensorReading:
    """Everything sensed from one world state, shared by all agents."""

    raster: np.ndarray
    proprio: np.ndarray
    bbox: Optional[BBox]
    nearest_obstacle: float

    @property
    def visible(self) -> bool:
        return self.bbox is not None


def sense(state, sensors: Sensors) -> SensorReading:
    raster = render_raster(state, sensors.raster).reshape(-1)
    raster.flags.writeable = False
    proprio = proprioception(state, sensors.v_max)
    proprio.flags.writeable = False
    return SensorReading(
        raster=raster,
        proprio=proprio,
        bbox=project_bbox(state, sensors.camera, sensors.d_max),
        nearest_obstacle=nearest_obstacle_distance(state, sensors.camera, sensors.d_max),
    )


@dataclass(frozen=True)
class Observation:
    raster: np.ndarray
    proprio: np.ndarray
    visible: bool
    first_layer: Optional[np.ndarray] = None

    def vector(self) -> np.ndarray:
        parts = [self.raster, self.proprio]
        if self.first_layer is not None:
            parts.append(self.first_layer)
        return np.concatenate(parts)


def first_layer_block(a_d: Sequence[float], a_n: Sequence[float], a_a: float, d_max: float):
    """Decoded first-layer actions as appended to the decision input: a_d, a_n, a_a / d_max."""
    return np.concatenate([np.asarray(a_d, float), np.asarray(a_n, float), [a_a / d_max]])


def base_observation(reading: SensorReading) -> Observation:
    return Observation(raster=reading.raster, proprio=reading.proprio, visible=reading.visible)


def decision_observation(base: Observation, block: np.ndarray) -> Observation:
    return Observation(
        raster=base.raster,
        proprio=base.proprio,
        visible=base.visible,
        first_layer=np.asarray(block, dtype=np.float64),
    )


def assemble_observations(
    state, sensors: Sensors, first_layer_actions=None, reading: Optional[SensorReading] = None
) -> Dict[Role, Observation]:
    """
    Per-role observations from one common reading. The decision role is included only when the
    first-layer actions (a_d, a_n, a_a) are supplied.
    """
    reading = reading if reading is not None else sense(state, sensors)
    base = base_observation(reading)
    observations = {role: base for role in FIRST_LAYER}
    if first_layer_actions is not None:
        a_d, a_n, a_a = first_layer_actions
        block = first_layer_block(a_d, a_n, a_a, sensors.d_max)
        observations[Role.decision] = decision_observation(base, block)
    return observations
