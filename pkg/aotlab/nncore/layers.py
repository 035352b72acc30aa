#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Layers built on the autodiff core: affine maps, tanh MLP stacks and an LSTM cell.
"""
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from aotlab.nncore.autodiff import (
    Parameter,
    RejectedInputError,
    Tensor,
    as_tensor,
    sigmoid,
    tanh,
)


class Module:
    """
    Base class for anything holding parameters. Parameters are discovered by walking the instance
    attributes (parameters, sub-modules and lists of sub-modules) in definition order.
    """

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        for attr, item in vars(self).items():
            name = f"{prefix}{attr}"
            if isinstance(item, Parameter):
                yield name, item
            elif isinstance(item, Module):
                yield from item.named_parameters(prefix=f"{name}.")
            elif isinstance(item, (list, tuple)):
                for i, sub in enumerate(item):
                    if isinstance(sub, Module):
                        yield from sub.named_parameters(prefix=f"{name}.{i}.")
                    elif isinstance(sub, Parameter):
                        yield f"{name}.{i}", sub

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Linear(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        self.in_features = in_features
        self.out_features = out_features
        self.weight = Parameter(glorot_uniform(rng, in_features, out_features), name="weight")
        self.bias = Parameter(np.zeros(out_features), name="bias")

    def __call__(self, x) -> Tensor:
        x = as_tensor(x)
        if x.ndim == 0 or x.shape[-1] != self.in_features:
            raise RejectedInputError(
                f"linear layer expects input width {self.in_features}, got shape {x.shape}"
            )
        return x @ self.weight + self.bias


class MLP(Module):
    """Stack of linear layers; tanh between hidden layers, identity on the output."""

    def __init__(self, sizes: Sequence[int], rng: np.random.Generator):
        if len(sizes) < 2:
            raise RejectedInputError(f"an MLP needs at least two widths, got {list(sizes)}")
        self.sizes = list(sizes)
        self.layers = [Linear(a, b, rng) for a, b in zip(sizes[:-1], sizes[1:])]

    def __call__(self, x) -> Tensor:
        return forward_mlp(self.layers, x)


def forward_mlp(layers: Sequence[Linear], x) -> Tensor:
    h = as_tensor(x)
    last = len(layers) - 1
    for i, layer in enumerate(layers):
        h = layer(h)
        if i < last:
            h = tanh(h)
    return h


@dataclass
class LstmState:
    hidden: Tensor
    cell: Tensor

    @classmethod
    def zeros(cls, hidden_size: int) -> "LstmState":
        return cls(Tensor(np.zeros(hidden_size)), Tensor(np.zeros(hidden_size)))


class LSTMCell(Module):
    """
    Gate layout along the last axis of the pre-activation: input, forget, candidate, output.
    The forget-gate bias starts at +1.0.
    """

    def __init__(self, input_size: int, hidden_size: int, rng: np.random.Generator):
        self.input_size = input_size
        self.hidden_size = hidden_size
        self.w_x = Parameter(glorot_uniform(rng, input_size, 4 * hidden_size), name="w_x")
        self.w_h = Parameter(glorot_uniform(rng, hidden_size, 4 * hidden_size), name="w_h")
        bias = np.zeros(4 * hidden_size)
        bias[hidden_size : 2 * hidden_size] = 1.0
        self.bias = Parameter(bias, name="bias")

    def initial_state(self) -> LstmState:
        return LstmState.zeros(self.hidden_size)


def lstm_step(cell: LSTMCell, x, state: LstmState) -> Tuple[LstmState, Tensor]:
    x = as_tensor(x)
    if x.shape != (cell.input_size,):
        raise RejectedInputError(
            f"LSTM cell expects input of shape ({cell.input_size},), got {x.shape}"
        )
    if state.hidden.shape != (cell.hidden_size,) or state.cell.shape != (cell.hidden_size,):
        raise RejectedInputError(
            f"LSTM cell expects state of size {cell.hidden_size}, "
            f"got {state.hidden.shape} and {state.cell.shape}"
        )
    h = cell.hidden_size
    z = x @ cell.w_x + state.hidden @ cell.w_h + cell.bias
    i = sigmoid(z[0:h])
    f = sigmoid(z[h : 2 * h])
    g = tanh(z[2 * h : 3 * h])
    o = sigmoid(z[3 * h : 4 * h])
    c_new = f * state.cell + i * g
    h_new = o * tanh(c_new)
    return LstmState(h_new, c_new), h_new
