#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Training and evaluation loops over whole episodes.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from aotlab.agents.roles import Role
from aotlab.agents.system import TrackingSystem
from aotlab.learn.ppo import UpdateSettings, epsilon_schedule, make_optimizers, update_agents
from aotlab.learn.rollout import RolloutBatch, run_episode
from aotlab.nncore.optim import Adam
from aotlab.rewards.components import RewardWeights
from aotlab.simworld.maps import MapSpec
from aotlab.simworld.world import WorldParams

_log = logging.getLogger(__name__)

EPISODE_COLUMNS = ["episode", "seed", "epsilon", "el", "cr", "reward_sum", "cause"]
DIAGNOSTIC_FIELDS = ["loss", "policy", "value", "entropy", "clip_fraction", "approx_kl"]


def training_columns(roles: Sequence[Role]) -> List[str]:
    per_role = [f"{role.name}_{name}" for role in roles for name in DIAGNOSTIC_FIELDS]
    return EPISODE_COLUMNS + per_role


def episode_seeds(seed: int, episodes: int) -> List[int]:
    """Independent per-episode seeds derived from the run seed."""
    children = np.random.SeedSequence(seed).spawn(episodes)
    return [int(child.generate_state(1)[0]) for child in children]


@dataclass
class TrainingResult:
    system: TrackingSystem
    optimizers: Dict[Role, Adam]
    log: pd.DataFrame
    epsilon: float


def train(
    system: TrackingSystem,
    world_map: MapSpec,
    config,
    seed: int = 0,
    episodes: Optional[int] = None,
    optimizers: Optional[Dict[Role, Adam]] = None,
) -> TrainingResult:
    """
    Collect one episode at a time and update every agent on it, decaying the exploration rate
    between episodes.

    Returns:
        the trained system, its optimizers, a per-episode log and the exploration rate reached.
    """
    t = config.train
    episodes = t.episodes if episodes is None else episodes
    optimizers = optimizers if optimizers is not None else make_optimizers(system, t.lr)
    settings = UpdateSettings.from_config(config)
    params = WorldParams.from_config(config)
    weights = RewardWeights.from_config(config)

    rows = []
    epsilon = epsilon_schedule(0, t.epsilon0, t.epsilon_decay, t.epsilon_floor)
    for k, episode_seed in enumerate(episode_seeds(seed, episodes)):
        epsilon = epsilon_schedule(k, t.epsilon0, t.epsilon_decay, t.epsilon_floor)
        batch = run_episode(
            system, world_map, epsilon, episode_seed, params=params, weights=weights
        )
        diagnostics = update_agents(system, batch, optimizers, settings)
        row = {
            "episode": k,
            "seed": episode_seed,
            "epsilon": epsilon,
            "el": batch.el,
            "cr": batch.cr,
            "reward_sum": batch.reward_sum,
            "cause": batch.cause.name,
        }
        for role, diag in diagnostics.items():
            for name in DIAGNOSTIC_FIELDS:
                row[f"{role.name}_{name}"] = getattr(diag, name)
        rows.append(row)
        _log.info(
            f"episode {k + 1}/{episodes} on {world_map.name}: EL {batch.el}, CR {batch.cr:.2f}, "
            f"epsilon {epsilon:.3f}, ended by {batch.cause.name}"
        )
    if episodes:
        epsilon = epsilon_schedule(episodes, t.epsilon0, t.epsilon_decay, t.epsilon_floor)
    log = pd.DataFrame(rows, columns=training_columns(system.roles))
    return TrainingResult(system=system, optimizers=optimizers, log=log, epsilon=epsilon)


def evaluate(
    system: TrackingSystem,
    world_map: MapSpec,
    seeds: Sequence[int],
    params: Optional[WorldParams] = None,
    weights: Optional[RewardWeights] = None,
    record_steps: bool = True,
) -> List[RolloutBatch]:
    """Greedy episodes, one per seed: no exploration, actions at the policy means."""
    batches = [
        run_episode(
            system,
            world_map,
            epsilon=0.0,
            seed=int(s),
            greedy=True,
            params=params,
            weights=weights,
            record_steps=record_steps,
        )
        for s in seeds
    ]
    _log.info(
        f"evaluated {len(batches)} episodes on {world_map.name}: "
        f"mean EL {np.mean([b.el for b in batches]) if batches else float('nan'):.2f}"
    )
    return batches
