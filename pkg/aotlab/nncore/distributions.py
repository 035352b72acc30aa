#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Diagonal Gaussian policy heads and the tanh-squashed log-density used by every agent.

The policy samples a pre-squash vector u ~ N(mean, exp(log_std)^2); the action is tanh(u) mapped
to the role bounds. Log-densities are always evaluated on u and include the tanh Jacobian.
"""
import math
from typing import Tuple

import numpy as np

from aotlab.nncore.autodiff import (
    Parameter,
    Tensor,
    as_tensor,
    clip,
    exp,
    softplus,
    tsum,
)
from aotlab.nncore.layers import MLP, Module

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_LOG_2PI = math.log(2.0 * math.pi)
_LOG_2 = math.log(2.0)


def gaussian_log_prob(u, mean, log_std) -> Tensor:
    u, mean, log_std = as_tensor(u), as_tensor(mean), as_tensor(log_std)
    z = (u - mean) / exp(log_std)
    return tsum(z * z * -0.5 - log_std - 0.5 * _LOG_2PI, axis=-1)


def squash_correction(u) -> Tensor:
    """
    sum log(1 - tanh(u)^2), written as 2 (log 2 - u - softplus(-2u)) so that it stays finite for
    large |u|.
    """
    u = as_tensor(u)
    return tsum((_LOG_2 - u - softplus(u * -2.0)) * 2.0, axis=-1)


def squashed_log_prob(u, mean, log_std) -> Tensor:
    return gaussian_log_prob(u, mean, log_std) - squash_correction(u)


def gaussian_entropy(log_std) -> Tensor:
    log_std = as_tensor(log_std)
    return tsum(log_std + 0.5 * (_LOG_2PI + 1.0), axis=-1)


def clamp_log_std(log_std, low: float = LOG_STD_MIN, high: float = LOG_STD_MAX) -> Tensor:
    return clip(log_std, low, high)


class GaussianHead(Module):
    """
    One expert policy: an MLP producing the pre-squash mean and a free, state-independent
    log standard deviation per action dimension.
    """

    def __init__(
        self,
        in_features: int,
        hidden: int,
        action_dim: int,
        rng: np.random.Generator,
        init_log_std: float = math.log(0.5),
    ):
        self.action_dim = action_dim
        self.mean_net = MLP([in_features, hidden, action_dim], rng)
        self.log_std = Parameter(np.full(action_dim, float(init_log_std)), name="log_std")

    def __call__(self, e) -> Tuple[Tensor, Tensor]:
        return self.mean_net(e), self.log_std


def sample_pre_squash(
    rng: np.random.Generator, mean: np.ndarray, log_std: np.ndarray
) -> np.ndarray:
    return mean + np.exp(log_std) * rng.standard_normal(mean.shape)


def squashed_log_prob_value(u: np.ndarray, mean: np.ndarray, log_std: np.ndarray) -> float:
    """Plain numpy evaluation of `squashed_log_prob`, for acting without a graph."""
    z = (u - mean) / np.exp(log_std)
    gauss = np.sum(-0.5 * z * z - log_std - 0.5 * _LOG_2PI)
    correction = np.sum(2.0 * (_LOG_2 - u - np.logaddexp(0.0, -2.0 * u)))
    return float(gauss - correction)

