#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Clipped-ratio PPO, applied to every agent independently on its own trajectory and reward stream.

Steps flagged exploratory were drawn from the uniform exploration cube rather than the policy, so
they are left out of the ratio term; they still serve as value targets.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from aotlab.agents.roles import Role
from aotlab.learn.rollout import RolloutBatch, Trajectory
from aotlab.mop.mixture import load_balancing_loss
from aotlab.nncore.autodiff import (
    NumericalError,
    Tensor,
    backward,
    clip,
    exp,
    mean,
    minimum,
    take,
)
from aotlab.nncore.optim import Adam, clip_grad_norm
from aotlab.utilities.config import AdvantageEstimator

_log = logging.getLogger(__name__)


def compute_advantages(
    rewards: Sequence[float],
    values: Sequence[float],
    gae_lambda: float = 0.95,
    gamma: float = 1.0,
    estimator: AdvantageEstimator = AdvantageEstimator.gae,
    normalize: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Advantages and value targets of one episode, bootstrapping the value after the last step
    with zero.

    Returns:
        (advantages, returns); returns are computed before normalization, and normalization is
        skipped for episodes shorter than two steps.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    n = rewards.size
    advantages = np.zeros(n)
    if AdvantageEstimator(estimator) is AdvantageEstimator.monte_carlo:
        running = 0.0
        for t in reversed(range(n)):
            running = rewards[t] + gamma * running
            advantages[t] = running - values[t]
    else:
        last = 0.0
        for t in reversed(range(n)):
            next_value = values[t + 1] if t + 1 < n else 0.0
            delta = rewards[t] + gamma * next_value - values[t]
            last = delta + gamma * gae_lambda * last
            advantages[t] = last
    returns = advantages + values
    if normalize and n >= 2:
        advantages = (advantages - advantages.mean()) / (advantages.std() + 1e-8)
    return advantages, returns


def clipped_surrogate(
    new_log_probs: Tensor,
    old_log_probs: np.ndarray,
    advantages: np.ndarray,
    clip_range: float,
) -> Tensor:
    """Mean of min(r A, clip(r, 1 - eps, 1 + eps) A) over the given steps."""
    ratio = exp(new_log_probs - old_log_probs)
    unclipped = ratio * advantages
    clipped = clip(ratio, 1.0 - clip_range, 1.0 + clip_range) * advantages
    return mean(minimum(unclipped, clipped))


@dataclass
class LossTerms:
    total: Tensor
    policy: float
    value: float
    entropy: float
    clip_fraction: float
    approx_kl: float


def ppo_loss(
    evaluation,
    old_log_probs: Sequence[float],
    advantages: np.ndarray,
    returns: np.ndarray,
    exploratory: Sequence[bool],
    clip_range: float = 0.2,
    value_coef: float = 0.5,
    entropy_coef: float = 0.01,
) -> LossTerms:
    """
    Total PPO loss of one agent over one episode, from a `SequenceEvaluation` under the current
    parameters. With no on-policy step in the episode only the value and entropy terms remain.
    """
    old_log_probs = np.asarray(old_log_probs, dtype=np.float64)
    on_policy = np.flatnonzero(~np.asarray(exploratory, dtype=bool))
    clip_fraction = approx_kl = 0.0
    if on_policy.size:
        new = take(evaluation.log_probs, on_policy)
        policy = -clipped_surrogate(
            new, old_log_probs[on_policy], np.asarray(advantages)[on_policy], clip_range
        )
        log_ratio = new.value - old_log_probs[on_policy]
        clip_fraction = float(np.mean(np.abs(np.exp(log_ratio) - 1.0) > clip_range))
        approx_kl = float(np.mean(np.exp(log_ratio) - 1.0 - log_ratio))
    else:
        policy = Tensor(0.0)
    value = mean((evaluation.values - np.asarray(returns, dtype=np.float64)) ** 2)
    total = policy + value * value_coef - evaluation.entropy * entropy_coef
    return LossTerms(
        total=total,
        policy=policy.item(),
        value=value.item(),
        entropy=evaluation.entropy.item(),
        clip_fraction=clip_fraction,
        approx_kl=approx_kl,
    )


@dataclass(frozen=True)
class UpdateSettings:
    gamma: float = 1.0
    gae_lambda: float = 0.95
    estimator: AdvantageEstimator = AdvantageEstimator.gae
    normalize_advantages: bool = True
    clip_range: float = 0.2
    epochs_per_sample: int = 2
    value_coef: float = 0.5
    entropy_coef: float = 0.01
    max_grad_norm: float = 5.0
    load_balance: bool = False
    load_balance_coef: float = 0.01

    @classmethod
    def from_config(cls, config) -> "UpdateSettings":
        t = config.train
        return cls(
            gamma=t.gamma,
            gae_lambda=t.gae_lambda,
            estimator=t.advantage_estimator,
            normalize_advantages=t.normalize_advantages,
            clip_range=t.clip,
            epochs_per_sample=t.epochs_per_sample,
            value_coef=t.value_coef,
            entropy_coef=t.entropy_coef,
            max_grad_norm=t.max_grad_norm,
            load_balance=config.network.load_balance,
            load_balance_coef=config.network.load_balance_coef,
        )


@dataclass
class UpdateDiagnostics:
    """Loss terms of the last completed epoch, and whether the update was rolled back."""

    loss: float = float("nan")
    policy: float = float("nan")
    value: float = float("nan")
    entropy: float = float("nan")
    clip_fraction: float = float("nan")
    approx_kl: float = float("nan")
    steps: int = 0
    restored: bool = False


def make_optimizers(system, lr: float = 0.003) -> Dict[Role, Adam]:
    return {role: Adam(agent.parameters(), lr=lr) for role, agent in system.agents.items()}


def update_agent(
    agent, trajectory: Trajectory, optimizer: Adam, settings: UpdateSettings
) -> UpdateDiagnostics:
    """
    `epochs_per_sample` full-episode PPO steps for one agent. A non-finite loss or gradient
    aborts the update and restores the parameters and optimizer moments held before it.
    """
    diagnostics = UpdateDiagnostics()
    if len(trajectory) == 0:
        return diagnostics
    advantages, returns = compute_advantages(
        trajectory.rewards,
        trajectory.values,
        settings.gae_lambda,
        settings.gamma,
        settings.estimator,
        settings.normalize_advantages,
    )
    params = agent.parameters()
    snapshot = [p.value.copy() for p in params]
    optimizer_state = optimizer.state_dict()
    for epoch in range(settings.epochs_per_sample):
        optimizer.zero_grad()
        try:
            evaluation = agent.evaluate_sequence(trajectory.observations, trajectory.raws)
            terms = ppo_loss(
                evaluation,
                trajectory.log_probs,
                advantages,
                returns,
                trajectory.exploratory,
                settings.clip_range,
                settings.value_coef,
                settings.entropy_coef,
            )
            loss = terms.total
            if settings.load_balance:
                balance = load_balancing_loss(evaluation.gate_probs)
                loss = loss + balance * settings.load_balance_coef
            if not np.isfinite(loss.item()):
                raise NumericalError(loss, "non-finite loss")
            backward(loss)
            clip_grad_norm(params, settings.max_grad_norm)
            optimizer.step()
        except NumericalError as err:
            _log.warning(
                f"{agent.role.name} agent: {err} in epoch {epoch + 1}; "
                "update aborted and parameters restored"
            )
            for p, value in zip(params, snapshot):
                p.value = value
                p.zero_grad()
            optimizer.load_state_dict(optimizer_state)
            diagnostics.restored = True
            diagnostics.steps = 0
            return diagnostics
        diagnostics.loss = loss.item()
        diagnostics.policy = terms.policy
        diagnostics.value = terms.value
        diagnostics.entropy = terms.entropy
        diagnostics.clip_fraction = terms.clip_fraction
        diagnostics.approx_kl = terms.approx_kl
        diagnostics.steps += 1
    _log.debug(
        f"{agent.role.name} agent: loss {diagnostics.loss:.4f}, "
        f"clip fraction {diagnostics.clip_fraction:.3f}, approx KL {diagnostics.approx_kl:.5f}"
    )
    return diagnostics


def update_agents(
    system,
    batch: RolloutBatch,
    optimizers: Dict[Role, Adam],
    settings: Optional[UpdateSettings] = None,
) -> Dict[Role, UpdateDiagnostics]:
    """Decentralized update: each agent learns only from its own trajectory."""
    settings = settings if settings is not None else UpdateSettings()
    return {
        role: update_agent(agent, batch.trajectories[role], optimizers[role], settings)
        for role, agent in system.agents.items()
    }


def epsilon_schedule(
    episode_index: int, epsilon0: float = 0.99, decay: float = 0.9, floor: float = 0.02
) -> float:
    if episode_index < 0:
        raise ValueError(f"episode index must be nonnegative, got {episode_index}")
    return max(epsilon0 * decay**episode_index, floor)
