#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Adaptive-moment optimizer and gradient-norm clipping.
"""
from typing import List, Sequence, Tuple

import numpy as np

from aotlab.nncore.autodiff import NumericalError, Parameter

Moments = List[Tuple[np.ndarray, np.ndarray]]


def clip_grad_norm(params: Sequence[Parameter], max_norm: float) -> float:
    """
    Rescale all gradients in place so that their joint L2 norm is at most `max_norm`.
    Returns the norm before clipping.
    """
    total = float(np.sqrt(sum(float(np.sum(p.grad * p.grad)) for p in params)))
    if total > max_norm:
        scale = max_norm / total
        for p in params:
            p.grad = p.grad * scale
    return total


def adam_step(
    params: Sequence[Parameter],
    moments: Moments,
    lr: float,
    step: int,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
):
    """
    Apply one bias-corrected Adam update to `params` in place and clear their gradients.

    `moments` holds one (first, second) moment pair per parameter and is updated in place;
    `step` is the 1-based update count used for bias correction.

    Raises:
        NumericalError if an update produces a non-finite parameter value; the parameters are
        left untouched in that case.
    """
    b1, b2 = betas
    c1 = 1.0 - b1**step
    c2 = 1.0 - b2**step
    updates = []
    for p, (m, v) in zip(params, moments):
        g = p.grad
        m_new = b1 * m + (1.0 - b1) * g
        v_new = b2 * v + (1.0 - b2) * g * g
        value = p.value - lr * (m_new / c1) / (np.sqrt(v_new / c2) + eps)
        if not np.all(np.isfinite(value)):
            raise NumericalError(p, "non-finite update")
        updates.append((value, m_new, v_new))
    for i, (p, (value, m_new, v_new)) in enumerate(zip(params, updates)):
        p.value = value
        moments[i] = (m_new, v_new)
        p.zero_grad()


class Adam:
    def __init__(
        self, params: Sequence[Parameter], lr: float = 0.003, betas=(0.9, 0.999), eps=1e-8
    ):
        if lr <= 0:
            raise ValueError(f"learning rate must be positive, got {lr}")
        self.params = list(params)
        self.lr = lr
        self.betas = tuple(betas)
        self.eps = eps
        self.step_count = 0
        self.moments: Moments = [
            (np.zeros_like(p.value), np.zeros_like(p.value)) for p in self.params
        ]

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()

    def step(self):
        adam_step(self.params, self.moments, self.lr, self.step_count + 1, self.betas, self.eps)
        self.step_count += 1

    def state_dict(self) -> dict:
        return {
            "step": self.step_count,
            "m": [m.copy() for m, _ in self.moments],
            "v": [v.copy() for _, v in self.moments],
        }

    def load_state_dict(self, state: dict):
        if len(state["m"]) != len(self.params) or len(state["v"]) != len(self.params):
            raise ValueError(
                f"optimizer state holds {len(state['m'])} moment pairs "
                f"for {len(self.params)} parameters"
            )
        moments = []
        for p, m, v in zip(self.params, state["m"], state["v"]):
            m = np.asarray(m, dtype=np.float64)
            v = np.asarray(v, dtype=np.float64)
            if m.shape != p.shape or v.shape != p.shape:
                raise ValueError(
                    f"optimizer moments of shape {m.shape} do not match {p.describe()}"
                )
            moments.append((m.copy(), v.copy()))
        self.step_count = int(state["step"])
        self.moments = moments
