#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Mixture-of-policies actor: a linear gate scores the expert policy heads, the K most probable
experts are kept, their probabilities renormalized, and their Gaussian parameters blended.

Only the selected experts are evaluated, so unselected experts receive no gradient from a forward
pass. The renormalized weights stay in the graph, so the gate is trained through them.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from aotlab.nncore.autodiff import (
    RejectedInputError,
    Tensor,
    as_tensor,
    softmax,
    stack,
    take,
    tsum,
)
from aotlab.nncore.distributions import LOG_STD_MAX, LOG_STD_MIN, GaussianHead, clamp_log_std
from aotlab.nncore.layers import Linear, Module


class MoPNetwork(Module):
    def __init__(
        self,
        in_features: int,
        hidden: int,
        action_dim: int,
        rng: np.random.Generator,
        n_experts: int = 4,
        top_k: int = 2,
        init_log_std: float = math.log(0.5),
        log_std_bounds: Tuple[float, float] = (LOG_STD_MIN, LOG_STD_MAX),
    ):
        if not 1 <= top_k <= n_experts:
            raise RejectedInputError(
                f"top_k must lie in [1, n_experts={n_experts}], got {top_k}"
            )
        self.n_experts = n_experts
        self.top_k = top_k
        self.action_dim = action_dim
        self.log_std_bounds = tuple(log_std_bounds)
        self.gate = Linear(in_features, n_experts, rng)
        self.experts = [
            GaussianHead(in_features, hidden, action_dim, rng, init_log_std=init_log_std)
            for _ in range(n_experts)
        ]

    @classmethod
    def from_config(cls, in_features: int, action_dim: int, config, rng: np.random.Generator):
        net = config.network
        return cls(
            in_features,
            net.expert_hidden,
            action_dim,
            rng,
            n_experts=net.n_experts,
            top_k=net.top_k,
            init_log_std=net.init_log_std,
            log_std_bounds=(net.log_std_min, net.log_std_max),
        )


@dataclass
class MixtureOutput:
    """Blended distribution parameters plus the gating record of one forward pass."""

    mean: Tensor
    log_std: Tensor
    probs: Tensor
    selected: Tuple[int, ...]
    weights: np.ndarray


def gate_probs(net: MoPNetwork, e) -> Tensor:
    return softmax(net.gate(e))


def select_top_k(probs: Sequence[float], k: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Indices of the `k` largest probabilities, in decreasing order with ties going to the lowest
    index, and their weights renormalized to sum to one.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if not 1 <= k <= probs.size:
        raise RejectedInputError(f"k must lie in [1, {probs.size}], got {k}")
    selected = np.argsort(-probs, kind="stable")[:k]
    chosen = probs[selected]
    return selected, chosen / chosen.sum()


def mop_forward(net: MoPNetwork, e) -> MixtureOutput:
    e = as_tensor(e)
    probs = gate_probs(net, e)
    selected, weights = select_top_k(probs.value, net.top_k)
    chosen = take(probs, selected)
    w = chosen / tsum(chosen)
    mean, log_std = None, None
    for j, i in enumerate(selected):
        m_i, s_i = net.experts[int(i)](e)
        w_j = take(w, j)
        mean = w_j * m_i if mean is None else mean + w_j * m_i
        log_std = w_j * s_i if log_std is None else log_std + w_j * s_i
    low, high = net.log_std_bounds
    return MixtureOutput(
        mean=mean,
        log_std=clamp_log_std(log_std, low, high),
        probs=probs,
        selected=tuple(int(i) for i in selected),
        weights=weights,
    )


def load_balancing_loss(gate_history: Sequence[Tensor], eps: float = 1e-10) -> Tensor:
    """
    Squared coefficient of variation of the expert importance (gate probabilities summed over the
    given steps). Zero when every expert carries the same total probability.
    """
    if not gate_history:
        return Tensor(0.0)
    importance = tsum(stack(gate_history), axis=0)
    n = importance.size
    if n == 1:
        return Tensor(0.0)
    centre = tsum(importance) * (1.0 / n)
    variance = tsum((importance - centre) ** 2) * (1.0 / n)
    return variance / (centre * centre + eps)
