#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
The per-agent pipeline shared by all roles: MLP encoder, LSTM memory, mixture-of-policies actor
and a value head on the encoded state.

Acting runs without a graph and advances the LSTM state one step at a time. Training replays a
whole episode through `evaluate_sequence`, which rebuilds the graph from a zero LSTM state.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from aotlab.agents.roles import ACTION_DIMS, Role
from aotlab.mop.mixture import MoPNetwork, mop_forward
from aotlab.nncore.autodiff import Tensor, no_grad, reshape, stack
from aotlab.nncore.distributions import (
    LOG_STD_MAX,
    LOG_STD_MIN,
    gaussian_entropy,
    sample_pre_squash,
    squashed_log_prob,
    squashed_log_prob_value,
)
from aotlab.nncore.layers import MLP, LSTMCell, Module, lstm_step
from aotlab.sensing.camera import BBox
from aotlab.simworld.world import NAV_BOUND


@dataclass
class AgentStep:
    """One action decision: the pre-squash action and what the behaviour policy knew about it."""

    raw: np.ndarray
    log_prob: float
    value: float
    exploratory: bool
    selected: Tuple[int, ...] = ()
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class SequenceEvaluation:
    log_probs: Tensor
    values: Tensor
    entropy: Tensor
    gate_probs: List[Tensor]


class AgentCore(Module):
    def __init__(
        self,
        role: Role,
        obs_width: int,
        rng: np.random.Generator,
        encoder_hidden: int = 128,
        embed_size: int = 64,
        expert_hidden: int = 64,
        critic_hidden: int = 64,
        n_experts: int = 4,
        top_k: int = 2,
        init_log_std: float = math.log(0.5),
        log_std_bounds: Tuple[float, float] = (LOG_STD_MIN, LOG_STD_MAX),
        explore_range: float = 3.0,
    ):
        self.role = role
        self.obs_width = obs_width
        self.action_dim = ACTION_DIMS[role]
        self.explore_range = explore_range
        self.encoder = MLP([obs_width, encoder_hidden, embed_size], rng)
        self.memory = LSTMCell(embed_size, embed_size, rng)
        self.actor = MoPNetwork(
            embed_size,
            expert_hidden,
            self.action_dim,
            rng,
            n_experts=n_experts,
            top_k=top_k,
            init_log_std=init_log_std,
            log_std_bounds=log_std_bounds,
        )
        self.critic = MLP([embed_size, critic_hidden, 1], rng)
        self.lstm_state = self.memory.initial_state()

    @classmethod
    def from_config(cls, role: Role, obs_width: int, config, rng: np.random.Generator):
        net = config.network
        return cls(
            role,
            obs_width,
            rng,
            encoder_hidden=net.encoder_hidden,
            embed_size=net.embed_size,
            expert_hidden=net.expert_hidden,
            critic_hidden=net.critic_hidden,
            n_experts=net.n_experts,
            top_k=net.top_k,
            init_log_std=net.init_log_std,
            log_std_bounds=(net.log_std_min, net.log_std_max),
            explore_range=net.explore_range,
        )

    def reset_state(self):
        self.lstm_state = self.memory.initial_state()

    def encode(self, observation) -> np.ndarray:
        """Encode one observation and advance the LSTM state; returns the encoded state."""
        with no_grad():
            embedded = self.encoder(observation)
            self.lstm_state, hidden = lstm_step(self.memory, embedded, self.lstm_state)
        return hidden.value.copy()

    def act(
        self,
        encoded: np.ndarray,
        rng: np.random.Generator,
        epsilon: float = 0.0,
        greedy: bool = False,
    ) -> AgentStep:
        """
        Choose a pre-squash action for the encoded state.

        One uniform draw decides exploration on every call, so the random stream advances the same
        way whatever the outcome. Greedy acting returns the blended mean and never explores.
        """
        explore = rng.random() < epsilon
        with no_grad():
            out = mop_forward(self.actor, encoded)
            value = self.critic(encoded).value.item()
        mean, log_std = out.mean.value, out.log_std.value
        exploratory = False
        if greedy:
            raw = mean.copy()
        elif explore:
            raw = rng.uniform(-self.explore_range, self.explore_range, size=self.action_dim)
            exploratory = True
        else:
            raw = sample_pre_squash(rng, mean, log_std)
        return AgentStep(
            raw=raw,
            log_prob=squashed_log_prob_value(raw, mean, log_std),
            value=value,
            exploratory=exploratory,
            selected=out.selected,
            weights=out.weights,
        )

    def evaluate_sequence(self, observations, raws) -> SequenceEvaluation:
        """
        Log-densities, values and mean entropy of a recorded episode under the current parameters,
        as a graph. The LSTM restarts from zeros, as it does at the start of every episode.
        """
        observations = np.atleast_2d(np.asarray(observations, dtype=np.float64))
        raws = np.atleast_2d(np.asarray(raws, dtype=np.float64))
        embedded = self.encoder(observations)
        state = self.memory.initial_state()
        log_probs, values, entropies, probs = [], [], [], []
        for t in range(observations.shape[0]):
            state, hidden = lstm_step(self.memory, embedded[t], state)
            out = mop_forward(self.actor, hidden)
            log_probs.append(squashed_log_prob(raws[t], out.mean, out.log_std))
            values.append(reshape(self.critic(hidden), ()))
            entropies.append(gaussian_entropy(out.log_std))
            probs.append(out.probs)
        return SequenceEvaluation(
            log_probs=stack(log_probs),
            values=stack(values),
            entropy=stack(entropies).mean(),
            gate_probs=probs,
        )


def decode_action(raw, role: Role, d_max: float = 20.0):
    """
    Map a pre-squash action to the role's action space.

    Returns:
        detection: normalized BBox with ordered corners; movement: normalized (u, v) center;
        obstacle: distance in [0, d_max]; decision: (dv, dalpha) in [-0.5, 0.5].
    """
    squashed = np.tanh(np.asarray(raw, dtype=np.float64))
    if role is Role.detection:
        unit = 0.5 * (squashed + 1.0)
        return BBox(
            min(unit[0], unit[2]),
            min(unit[1], unit[3]),
            max(unit[0], unit[2]),
            max(unit[1], unit[3]),
        )
    if role is Role.movement:
        unit = 0.5 * (squashed + 1.0)
        return float(unit[0]), float(unit[1])
    if role is Role.obstacle:
        return float(0.5 * (squashed[0] + 1.0) * d_max)
    return float(NAV_BOUND * squashed[0]), float(NAV_BOUND * squashed[1])


def initial_agents(roles, widths, config, rng: Optional[np.random.Generator] = None):
    """One freshly initialized agent per role, built in the order given."""
    rng = rng if rng is not None else np.random.default_rng(0)
    return {role: AgentCore.from_config(role, widths[role], config, rng) for role in roles}
