#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Wiring of the agents into a tracking system.

The two-layer system runs the detection, movement and obstacle agents on the common observation,
appends their decoded actions to the decision agent's observation, and applies only the decision
agent's navigation action to the world. The single-agent baseline maps the common observation
straight to the navigation action with the same pipeline.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from aotlab.agents.core import AgentCore, AgentStep, decode_action, initial_agents
from aotlab.agents.roles import FIRST_LAYER, FIRST_LAYER_WIDTH, Role
from aotlab.nncore.autodiff import Parameter
from aotlab.sensing.camera import BBox
from aotlab.sensing.observation import (
    SensorReading,
    Sensors,
    assemble_observations,
    base_observation,
    sense,
)


class Method(Enum):
    csaot = 0
    single = 1


@dataclass(frozen=True)
class JointAction:
    """
    Decoded actions of one tick. `a_d` and `a_n` are normalized to the frame, `a_a` is in meters;
    they are None for the single-agent baseline. Only `nav` moves the tracker.
    """

    nav: Tuple[float, float]
    a_d: Optional[BBox] = None
    a_n: Optional[Tuple[float, float]] = None
    a_a: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "nav": list(self.nav),
            "a_d": list(self.a_d.as_tuple()) if self.a_d is not None else None,
            "a_n": list(self.a_n) if self.a_n is not None else None,
            "a_a": self.a_a,
        }


@dataclass
class SystemStep:
    action: JointAction
    steps: Dict[Role, AgentStep]
    observations: Dict[Role, np.ndarray]
    reading: SensorReading


class TrackingSystem:
    """A set of role agents sharing one sensor suite."""

    method: Method = None

    def __init__(self, agents: Dict[Role, AgentCore], sensors: Sensors):
        self.agents = agents
        self.sensors = sensors

    @property
    def roles(self) -> Tuple[Role, ...]:
        return tuple(self.agents)

    def reset_state(self):
        for agent in self.agents.values():
            agent.reset_state()

    def named_parameters(self) -> Iterator[Tuple[str, Parameter]]:
        for role, agent in self.agents.items():
            yield from agent.named_parameters(prefix=f"{role.name}.")

    def num_parameters(self) -> int:
        return sum(agent.num_parameters() for agent in self.agents.values())

    def step(self, state, rng, epsilon: float = 0.0, greedy: bool = False) -> SystemStep:
        raise NotImplementedError


class CsaotSystem(TrackingSystem):
    method = Method.csaot

    @classmethod
    def from_config(cls, config, rng: Optional[np.random.Generator] = None) -> "CsaotSystem":
        sensors = Sensors.from_config(config)
        widths = {role: sensors.base_width for role in FIRST_LAYER}
        widths[Role.decision] = sensors.base_width + FIRST_LAYER_WIDTH
        return cls(initial_agents((*FIRST_LAYER, Role.decision), widths, config, rng), sensors)

    def step(self, state, rng, epsilon: float = 0.0, greedy: bool = False) -> SystemStep:
        return csaot_step(self, state, rng, epsilon, greedy)


class SingleAgentSystem(TrackingSystem):
    method = Method.single

    @classmethod
    def from_config(cls, config, rng: Optional[np.random.Generator] = None):
        sensors = Sensors.from_config(config)
        widths = {Role.decision: sensors.base_width}
        return cls(initial_agents((Role.decision,), widths, config, rng), sensors)

    def step(self, state, rng, epsilon: float = 0.0, greedy: bool = False) -> SystemStep:
        return single_agent_step(self, state, rng, epsilon, greedy)


def build_system(method: Method, config, seed: int = 0) -> TrackingSystem:
    rng = np.random.default_rng(seed)
    if Method(method) is Method.single:
        return SingleAgentSystem.from_config(config, rng)
    return CsaotSystem.from_config(config, rng)


def csaot_step(
    system: CsaotSystem,
    state,
    rng: np.random.Generator,
    epsilon: float = 0.0,
    greedy: bool = False,
    reading: Optional[SensorReading] = None,
) -> SystemStep:
    sensors = system.sensors
    reading = reading if reading is not None else sense(state, sensors)
    observations = assemble_observations(state, sensors, reading=reading)
    vectors, steps, decoded = {}, {}, {}
    for role in FIRST_LAYER:
        vectors[role] = observations[role].vector()
        agent = system.agents[role]
        steps[role] = agent.act(agent.encode(vectors[role]), rng, epsilon, greedy)
        decoded[role] = decode_action(steps[role].raw, role, sensors.d_max)

    a_d, a_n, a_a = decoded[Role.detection], decoded[Role.movement], decoded[Role.obstacle]
    with_first_layer = assemble_observations(
        state, sensors, first_layer_actions=(a_d.as_tuple(), a_n, a_a), reading=reading
    )
    vectors[Role.decision] = with_first_layer[Role.decision].vector()
    decision = system.agents[Role.decision]
    steps[Role.decision] = decision.act(
        decision.encode(vectors[Role.decision]), rng, epsilon, greedy
    )
    nav = decode_action(steps[Role.decision].raw, Role.decision, sensors.d_max)
    return SystemStep(
        action=JointAction(nav=nav, a_d=a_d, a_n=a_n, a_a=a_a),
        steps=steps,
        observations=vectors,
        reading=reading,
    )


def single_agent_step(
    system: SingleAgentSystem,
    state,
    rng: np.random.Generator,
    epsilon: float = 0.0,
    greedy: bool = False,
    reading: Optional[SensorReading] = None,
) -> SystemStep:
    sensors = system.sensors
    reading = reading if reading is not None else sense(state, sensors)
    vector = base_observation(reading).vector()
    agent = system.agents[Role.decision]
    step = agent.act(agent.encode(vector), rng, epsilon, greedy)
    return SystemStep(
        action=JointAction(nav=decode_action(step.raw, Role.decision, sensors.d_max)),
        steps={Role.decision: step},
        observations={Role.decision: vector},
        reading=reading,
    )
