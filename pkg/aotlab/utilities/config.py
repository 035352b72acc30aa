#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Run configuration for the tracking world, the sensors, the rewards, the agent networks and PPO
training.

All options live in one ConfigBlock; `get_config()` returns an instance with user overrides applied
and `config_to_dict()` turns an instance back into a JSON-serializable document.
"""
import json
import math
from enum import Enum
from pathlib import Path

from pyomo.common.config import (
    ConfigBlock,
    ConfigValue,
    In,
    Bool,
    PositiveFloat,
    PositiveInt,
    NonNegativeFloat,
    NonNegativeInt,
)


class AdvantageEstimator(Enum):
    gae = 0
    monte_carlo = 1


def _discount_factor(value):
    # the tracking task is formulated without discounting
    if float(value) != 1.0:
        raise ValueError(f"gamma is fixed to 1.0, got {value}")
    return 1.0


def _open_unit_interval(value):
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"value must lie in (0, 1), got {value}")
    return value


def _closed_unit_interval(value):
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value must lie in [0, 1], got {value}")
    return value


def _field_of_view(value):
    value = float(value)
    if not 0.0 < value < math.pi:
        raise ValueError(f"hfov must lie in (0, pi) radians, got {value}")
    return value


def _real(value):
    return float(value)


# create config dictionary
CONFIG = ConfigBlock()

world = CONFIG.declare(
    "world",
    ConfigBlock(description="kinematic world", doc="Tracker kinematics and world constants"),
)
world.declare(
    "dt",
    ConfigValue(default=0.1, domain=PositiveFloat, description="environment step [s]"),
)
world.declare(
    "accel_scale",
    ConfigValue(
        default=10.0,
        domain=PositiveFloat,
        description="acceleration action scale",
        doc="""Multiplier applied to the acceleration action before integration, so that the
        action range [-0.5, 0.5] maps to [-5, 5] m/s^2 with the default value
        ***default*** - 10.0""",
    ),
)
world.declare(
    "v_max", ConfigValue(default=5.0, domain=PositiveFloat, description="top speed [m/s]")
)
world.declare(
    "wheelbase",
    ConfigValue(default=2.0, domain=PositiveFloat, description="bicycle wheelbase [m]"),
)
world.declare(
    "tracker_radius",
    ConfigValue(default=0.8, domain=PositiveFloat, description="tracker disc radius [m]"),
)
world.declare(
    "d_max",
    ConfigValue(default=20.0, domain=PositiveFloat, description="sensing range [m]"),
)
world.declare(
    "spawn_jitter",
    ConfigValue(
        default=0.0,
        domain=NonNegativeFloat,
        description="spawn perturbation",
        doc="""Half-width of the seeded uniform perturbation applied to the tracker spawn position
        [m] (and a tenth of it to the heading [rad])
        ***default*** - 0.0 (deterministic spawn)""",
    ),
)

camera = CONFIG.declare(
    "camera", ConfigBlock(description="pinhole camera", doc="Camera model of the tracker")
)
camera.declare(
    "frame_w", ConfigValue(default=128, domain=PositiveInt, description="frame width [px]")
)
camera.declare(
    "frame_h", ConfigValue(default=96, domain=PositiveInt, description="frame height [px]")
)
camera.declare(
    "hfov",
    ConfigValue(
        default=math.pi / 2, domain=_field_of_view, description="horizontal field of view [rad]"
    ),
)
camera.declare(
    "cam_height",
    ConfigValue(default=1.0, domain=PositiveFloat, description="camera height [m]"),
)
camera.declare(
    "target_width",
    ConfigValue(default=1.0, domain=PositiveFloat, description="target width [m]"),
)
camera.declare(
    "target_height",
    ConfigValue(default=1.5, domain=PositiveFloat, description="target height [m]"),
)
camera.declare(
    "n_rays",
    ConfigValue(
        default=31, domain=PositiveInt, description="range rays spanning the field of view"
    ),
)

raster = CONFIG.declare(
    "raster",
    ConfigBlock(description="egocentric raster", doc="Occupancy raster fed to every agent"),
)
raster.declare(
    "cells", ConfigValue(default=32, domain=PositiveInt, description="cells per raster side")
)
raster.declare(
    "window",
    ConfigValue(default=20.0, domain=PositiveFloat, description="raster side length [m]"),
)
raster.declare(
    "target_radius",
    ConfigValue(
        default=0.5, domain=PositiveFloat, description="target footprint radius in the raster [m]"
    ),
)

rewards = CONFIG.declare(
    "rewards", ConfigBlock(description="reward weights", doc="Scaling of every reward component")
)
rewards.declare(
    "lambda_track", ConfigValue(default=1.0, domain=NonNegativeFloat, description="tracking")
)
rewards.declare(
    "lambda_nav", ConfigValue(default=1.0, domain=NonNegativeFloat, description="navigation")
)
rewards.declare(
    "lambda_diff",
    ConfigValue(default=0.5, domain=NonNegativeFloat, description="acceleration change"),
)
rewards.declare(
    "lambda_detect", ConfigValue(default=1.0, domain=NonNegativeFloat, description="detection")
)
rewards.declare(
    "lambda_obstacle",
    ConfigValue(default=0.1, domain=NonNegativeFloat, description="obstacle distance [1/m]"),
)
rewards.declare(
    "lambda_movement",
    ConfigValue(default=1.0, domain=NonNegativeFloat, description="target center"),
)
rewards.declare(
    "collision_penalty",
    ConfigValue(default=-50.0, domain=_real, description="global reward on collision"),
)
rewards.declare(
    "stall_penalty",
    ConfigValue(
        default=-3.0,
        domain=_real,
        description="penalty for braking or steering at standstill",
    ),
)

network = CONFIG.declare(
    "network", ConfigBlock(description="agent networks", doc="Widths of the agent pipeline")
)
network.declare(
    "encoder_hidden",
    ConfigValue(default=128, domain=PositiveInt, description="encoder hidden width"),
)
network.declare(
    "embed_size",
    ConfigValue(default=64, domain=PositiveInt, description="encoder output and LSTM width"),
)
network.declare(
    "expert_hidden",
    ConfigValue(default=64, domain=PositiveInt, description="expert policy hidden width"),
)
network.declare(
    "critic_hidden",
    ConfigValue(default=64, domain=PositiveInt, description="value head hidden width"),
)
network.declare(
    "n_experts",
    ConfigValue(default=4, domain=PositiveInt, description="number of expert policies"),
)
network.declare(
    "top_k",
    ConfigValue(default=2, domain=PositiveInt, description="number of selected experts"),
)
network.declare(
    "init_log_std",
    ConfigValue(default=math.log(0.5), domain=_real, description="initial policy log std"),
)
network.declare(
    "log_std_min", ConfigValue(default=-5.0, domain=_real, description="log std lower clamp")
)
network.declare(
    "log_std_max", ConfigValue(default=2.0, domain=_real, description="log std upper clamp")
)
network.declare(
    "explore_range",
    ConfigValue(
        default=3.0,
        domain=PositiveFloat,
        description="half-width of the pre-squash cube sampled on exploratory steps",
    ),
)
network.declare(
    "load_balance",
    ConfigValue(
        default=False,
        domain=Bool,
        description="gate load balancing",
        doc="""Selection to add an importance-balancing term on the gate probabilities
        ***default*** - False
        **Valid Values:** - {
        **True** - add load_balance_coef times the squared coefficient of variation of the
        per-expert gate importance to every agent loss,
        **False** - no auxiliary term
        }""",
    ),
)
network.declare(
    "load_balance_coef",
    ConfigValue(default=0.01, domain=NonNegativeFloat, description="load balancing weight"),
)

train = CONFIG.declare(
    "train", ConfigBlock(description="PPO training", doc="Training hyperparameters")
)
train.declare(
    "gamma", ConfigValue(default=1.0, domain=_discount_factor, description="discount factor")
)
train.declare(
    "gae_lambda",
    ConfigValue(default=0.95, domain=_closed_unit_interval, description="GAE lambda"),
)
train.declare(
    "advantage_estimator",
    ConfigValue(
        default=AdvantageEstimator.gae,
        domain=In(AdvantageEstimator),
        description="advantage estimator",
        doc="""Advantage estimator used for the PPO update
        ***default*** - AdvantageEstimator.gae
        **Valid Values:** - {
        **AdvantageEstimator.gae** - generalized advantage estimation with gae_lambda,
        **AdvantageEstimator.monte_carlo** - return-to-go minus the value estimate
        }""",
    ),
)
train.declare(
    "normalize_advantages",
    ConfigValue(default=True, domain=Bool, description="per-batch advantage normalization"),
)
train.declare(
    "clip", ConfigValue(default=0.2, domain=_open_unit_interval, description="PPO clip range")
)
train.declare(
    "epochs_per_sample",
    ConfigValue(default=2, domain=PositiveInt, description="optimization passes per episode"),
)
train.declare("lr", ConfigValue(default=0.003, domain=PositiveFloat, description="learning rate"))
train.declare(
    "epsilon0",
    ConfigValue(default=0.99, domain=_closed_unit_interval, description="initial exploration"),
)
train.declare(
    "epsilon_decay",
    ConfigValue(default=0.9, domain=_closed_unit_interval, description="exploration decay"),
)
train.declare(
    "epsilon_floor",
    ConfigValue(default=0.02, domain=_closed_unit_interval, description="exploration floor"),
)
train.declare(
    "episodes", ConfigValue(default=50, domain=NonNegativeInt, description="training episodes")
)
train.declare(
    "value_coef", ConfigValue(default=0.5, domain=NonNegativeFloat, description="value loss")
)
train.declare(
    "entropy_coef",
    ConfigValue(default=0.01, domain=NonNegativeFloat, description="entropy bonus"),
)
train.declare(
    "max_grad_norm",
    ConfigValue(default=5.0, domain=PositiveFloat, description="gradient norm clip"),
)


def _check_relations(config):
    network = config.network
    if network.top_k > network.n_experts:
        raise ValueError(
            f"network.top_k ({network.top_k}) must not exceed network.n_experts "
            f"({network.n_experts})"
        )
    if network.log_std_min >= network.log_std_max:
        raise ValueError(
            f"network.log_std_min ({network.log_std_min}) must be below network.log_std_max "
            f"({network.log_std_max})"
        )


def get_config(default=None):
    """
    Return a configuration instance with the values in `default` (a possibly nested dictionary)
    applied on top of the declared defaults.

    Raises:
        ValueError if a key is not declared, a value is outside its domain, or two values are
        inconsistent (more selected experts than experts, an empty log std range).
    """
    config = CONFIG(default or {})
    _check_relations(config)
    return config


def load_config(path):
    """
    Read a JSON configuration document and return the corresponding configuration instance.
    """
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError(f"configuration document {path} must contain a JSON object")
    return get_config(data)


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, Enum):
        return value.name
    return value


def config_to_dict(config):
    """
    Return the resolved configuration as a JSON-serializable nested dictionary.
    """
    return _plain(config.value())


def save_config(config, path):
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2, sort_keys=True))
