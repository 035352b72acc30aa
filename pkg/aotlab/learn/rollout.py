#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Episode collection: run a tracking system on a map until a termination condition holds, and
record per-agent trajectories with each agent's own reward stream.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from aotlab.agents.core import AgentStep
from aotlab.agents.roles import Role
from aotlab.agents.system import JointAction, TrackingSystem
from aotlab.rewards.components import RewardBreakdown, RewardWeights, evaluate_step
from aotlab.sensing.camera import project_bbox
from aotlab.simworld.maps import MapSpec, obstacle_to_document
from aotlab.simworld.world import WorldParams, check_collision, reset_world, step

_log = logging.getLogger(__name__)


class TerminalCause(Enum):
    collision = 0
    cr_floor = 1
    el_cap = 2
    path_complete = 3


# reward stream each role is trained on
ROLE_REWARD = {
    Role.detection: "r_detect",
    Role.movement: "r_movement",
    Role.obstacle: "r_obstacle",
    Role.decision: "global_reward",
}


@dataclass
class Trajectory:
    role: Role
    observations: List[np.ndarray] = field(default_factory=list)
    raws: List[np.ndarray] = field(default_factory=list)
    log_probs: List[float] = field(default_factory=list)
    values: List[float] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    exploratory: List[bool] = field(default_factory=list)

    def __len__(self):
        return len(self.rewards)

    def append(self, observation: np.ndarray, agent_step: AgentStep, reward: float):
        self.observations.append(observation)
        self.raws.append(agent_step.raw)
        self.log_probs.append(agent_step.log_prob)
        self.values.append(agent_step.value)
        self.rewards.append(float(reward))
        self.exploratory.append(agent_step.exploratory)


@dataclass
class StepRecord:
    """What happened at one tick, as written to episode traces."""

    index: int
    pose: Tuple[float, float, float]
    speed: float
    target: Tuple[float, float]
    action: JointAction
    rewards: RewardBreakdown
    gates: Dict[str, dict]
    bbox: Optional[Tuple[float, float, float, float]]
    obstacles: Tuple[dict, ...] = ()

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "pose": list(self.pose),
            "speed": self.speed,
            "target": list(self.target),
            "action": self.action.to_dict(),
            "rewards": self.rewards.to_dict(),
            "gates": self.gates,
            "bbox": list(self.bbox) if self.bbox is not None else None,
            "obstacles": list(self.obstacles),
        }


@dataclass
class RolloutBatch:
    """
    One episode. `reward_sum` is the exact sum of the global rewards; `cr` is the reported
    cumulative reward, clamped at the map's floor when the floor ended the episode.
    """

    map_name: str
    method: str
    seed: int
    trajectories: Dict[Role, Trajectory]
    el: int
    cr: float
    reward_sum: float
    cause: TerminalCause
    steps: List[StepRecord] = field(default_factory=list)


def terminal_cause(
    collided: bool, reward_sum: float, path_complete: bool, el: int, world_map: MapSpec
) -> Optional[TerminalCause]:
    if collided:
        return TerminalCause.collision
    if reward_sum < world_map.min_cr:
        return TerminalCause.cr_floor
    if path_complete:
        return TerminalCause.path_complete
    if el >= world_map.max_el:
        return TerminalCause.el_cap
    return None


def run_episode(
    system: TrackingSystem,
    world_map: MapSpec,
    epsilon: float = 0.0,
    seed: int = 0,
    greedy: bool = False,
    params: Optional[WorldParams] = None,
    weights: Optional[RewardWeights] = None,
    record_steps: bool = False,
) -> RolloutBatch:
    """
    Run one episode from the map's spawn pose. Exploration and sampling draw from a generator
    seeded with `seed`; `greedy` acts with the policy means and never explores.
    """
    params = params if params is not None else WorldParams()
    weights = weights if weights is not None else RewardWeights()
    camera = system.sensors.camera
    rng = np.random.default_rng(seed)
    system.reset_state()
    state = reset_world(world_map, params, seed)
    trajectories = {role: Trajectory(role) for role in system.roles}
    records: List[StepRecord] = []
    reward_sum = 0.0
    cause = None
    while cause is None:
        tick = system.step(state, rng, epsilon, greedy)
        new_state = step(state, tick.action.nav, params.dt, world_map, params)
        collided = check_collision(new_state, params)
        post_bbox = project_bbox(new_state, camera, system.sensors.d_max)
        breakdown = evaluate_step(
            state,
            tick.reading.bbox,
            tick.reading.nearest_obstacle,
            post_bbox,
            tick.action,
            collided,
            weights,
            camera,
        )
        reward_sum += breakdown.global_reward
        for role, agent_step in tick.steps.items():
            reward = getattr(breakdown, ROLE_REWARD[role])
            trajectories[role].append(tick.observations[role], agent_step, reward)
        if record_steps:
            records.append(
                StepRecord(
                    index=state.step_index,
                    pose=state.pose(),
                    speed=state.tracker_speed,
                    target=state.target_pos,
                    action=tick.action,
                    rewards=breakdown,
                    gates={
                        role.name: {"selected": list(s.selected), "weights": list(s.weights)}
                        for role, s in tick.steps.items()
                    },
                    bbox=tick.reading.bbox.as_tuple() if tick.reading.bbox else None,
                    obstacles=tuple(obstacle_to_document(o) for o in state.obstacles),
                )
            )
        state = new_state
        cause = terminal_cause(
            collided, reward_sum, state.path_complete, state.step_index, world_map
        )

    cr = world_map.min_cr if cause is TerminalCause.cr_floor else reward_sum
    _log.debug(
        f"episode on {world_map.name} (seed {seed}) ended by {cause.name}: "
        f"EL {state.step_index}, CR {cr:.3f}"
    )
    return RolloutBatch(
        map_name=world_map.name,
        method=system.method.name,
        seed=seed,
        trajectories=trajectories,
        el=state.step_index,
        cr=cr,
        reward_sum=reward_sum,
        cause=cause,
        steps=records,
    )
