#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Reverse-mode differentiation over 64-bit numpy arrays.

Every operation returns a `Tensor` that remembers its parents and a closure mapping the upstream
gradient to one gradient per parent. `backward()` walks the recorded graph in reverse topological
order and accumulates into the `.grad` of every reachable `Parameter`.
"""
from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np


class RejectedInputError(ValueError):
    "Raised when an operation receives operands of the wrong shape or kind"


class NumericalError(ArithmeticError):
    def __init__(self, node, detail: str = "non-finite value"):
        self.node = node
        self.detail = detail

    def __str__(self):
        return f"{self.detail} at {self.node.describe()}"


_GRAD_ENABLED = [True]


@contextmanager
def no_grad():
    """Evaluate operations without recording a graph."""
    previous = _GRAD_ENABLED[0]
    _GRAD_ENABLED[0] = False
    try:
        yield
    finally:
        _GRAD_ENABLED[0] = previous


def grad_enabled() -> bool:
    return _GRAD_ENABLED[0]


class Tensor:
    # numpy defers binary operators to Tensor when an ndarray is the left operand
    __array_priority__ = 100

    def __init__(
        self, value, requires_grad=False, parents=(), backward_fn=None, op="const", name=None
    ):
        self.value = np.asarray(value, dtype=np.float64)
        self.requires_grad = requires_grad
        self.parents = tuple(parents)
        self.backward_fn = backward_fn
        self.op = op
        self.name = name
        self.grad = None

    @property
    def shape(self):
        return self.value.shape

    @property
    def ndim(self):
        return self.value.ndim

    @property
    def size(self):
        return self.value.size

    def item(self) -> float:
        return float(self.value)

    def numpy(self) -> np.ndarray:
        return self.value

    def describe(self) -> str:
        label = f" '{self.name}'" if self.name else ""
        return f"{self.op} node{label} of shape {self.shape}"

    def zero_grad(self):
        self.grad = np.zeros_like(self.value)

    def __repr__(self):
        return f"Tensor({self.value!r}, op={self.op})"

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent):
        return power(self, exponent)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, index):
        return take(self, index)

    def sum(self, axis=None, keepdims=False):
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        return reshape(self, shape[0] if len(shape) == 1 else shape)


class Parameter(Tensor):
    """A learnable leaf whose gradient accumulates across backward passes until cleared."""

    def __init__(self, value, name=None):
        super().__init__(value, requires_grad=True, op="param", name=name)
        self.grad = np.zeros_like(self.value)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(value, parents: Sequence[Tensor], backward_fn, op: str) -> Tensor:
    if _GRAD_ENABLED[0] and any(p.requires_grad for p in parents):
        return Tensor(value, requires_grad=True, parents=parents, backward_fn=backward_fn, op=op)
    return Tensor(value, op=op)


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == tuple(shape):
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _check_broadcast(a: Tensor, b: Tensor, op: str):
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise RejectedInputError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast")


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "add")
    return _node(a.value + b.value, (a, b), lambda g: (g, g), "add")


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "sub")
    return _node(a.value - b.value, (a, b), lambda g: (g, -g), "sub")


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "mul")
    return _node(a.value * b.value, (a, b), lambda g: (g * b.value, g * a.value), "mul")


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "div")
    out = a.value / b.value
    return _node(out, (a, b), lambda g: (g / b.value, -g * out / b.value), "div")


def neg(a) -> Tensor:
    a = as_tensor(a)
    return _node(-a.value, (a,), lambda g: (-g,), "neg")


def power(a, exponent: float) -> Tensor:
    a = as_tensor(a)
    exponent = float(exponent)
    return _node(
        a.value**exponent,
        (a,),
        lambda g: (g * exponent * a.value ** (exponent - 1.0),),
        "pow",
    )


def matmul(a, b) -> Tensor:
    """Matrix product of a vector or batch of row vectors `a` with a matrix `b`, or `a` @ vector."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim not in (1, 2) or b.ndim not in (1, 2) or (a.ndim == 1 and b.ndim == 1):
        raise RejectedInputError(f"matmul: unsupported operand ranks {a.ndim} and {b.ndim}")
    if a.shape[-1] != b.shape[0]:
        raise RejectedInputError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")

    def backward_fn(g):
        if b.ndim == 1:
            return np.outer(g, b.value), a.value.T @ g
        if a.ndim == 1:
            return g @ b.value.T, np.outer(a.value, g)
        return g @ b.value.T, a.value.T @ g

    return _node(a.value @ b.value, (a, b), backward_fn, "matmul")


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = np.tanh(a.value)
    return _node(out, (a,), lambda g: (g * (1.0 - out * out),), "tanh")


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    out = 0.5 * (1.0 + np.tanh(0.5 * a.value))
    return _node(out, (a,), lambda g: (g * out * (1.0 - out),), "sigmoid")


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.value)
    return _node(out, (a,), lambda g: (g * out,), "exp")


def log(a) -> Tensor:
    a = as_tensor(a)
    return _node(np.log(a.value), (a,), lambda g: (g / a.value,), "log")


def softplus(a) -> Tensor:
    """log(1 + exp(a)), evaluated without overflow."""
    a = as_tensor(a)
    slope = 0.5 * (1.0 + np.tanh(0.5 * a.value))
    return _node(np.logaddexp(0.0, a.value), (a,), lambda g: (g * slope,), "softplus")


def tsum(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    out = a.value.sum(axis=axis, keepdims=keepdims)

    def backward_fn(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return _node(out, (a,), backward_fn, "sum")


def mean(a, axis=None, keepdims=False) -> Tensor:
    a = as_tensor(a)
    count = a.size if axis is None else a.shape[axis]
    return tsum(a, axis=axis, keepdims=keepdims) * (1.0 / count)


def softmax(a, axis=-1) -> Tensor:
    a = as_tensor(a)
    shifted = a.value - a.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward_fn(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return _node(out, (a,), backward_fn, "softmax")


def clip(a, low: float, high: float) -> Tensor:
    a = as_tensor(a)
    inside = (a.value >= low) & (a.value <= high)
    return _node(np.clip(a.value, low, high), (a,), lambda g: (g * inside,), "clip")


def minimum(a, b) -> Tensor:
    """Elementwise minimum; ties send the gradient to `a`."""
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast(a, b, "minimum")
    pick_a = a.value <= b.value
    return _node(
        np.minimum(a.value, b.value),
        (a, b),
        lambda g: (g * pick_a, g * ~pick_a),
        "minimum",
    )


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    original = a.shape
    return _node(a.value.reshape(shape), (a,), lambda g: (g.reshape(original),), "reshape")


def take(a, index) -> Tensor:
    a = as_tensor(a)

    def backward_fn(g):
        full = np.zeros_like(a.value)
        np.add.at(full, index, g)
        return (full,)

    return _node(a.value[index], (a,), backward_fn, "take")


def concat(tensors: Iterable, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.value for t in tensors], axis=axis)
    except ValueError as err:
        raise RejectedInputError(f"concat: {err}")
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward_fn(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _node(out, tensors, backward_fn, "concat")


def stack(tensors: Iterable, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.stack([t.value for t in tensors], axis=axis)
    except ValueError as err:
        raise RejectedInputError(f"stack: {err}")

    def backward_fn(g):
        return tuple(np.take(g, i, axis=axis) for i in range(len(tensors)))

    return _node(out, tensors, backward_fn, "stack")


def _topological_order(root: Tensor):
    order, seen = [], set()
    stack_ = [(root, False)]
    while stack_:
        node, expanded = stack_.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack_.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in seen:
                stack_.append((parent, False))
    return order


def backward(loss: Tensor):
    """
    Accumulate d(loss)/d(param) into the `.grad` of every parameter reachable from `loss`.

    Raises:
        RejectedInputError if `loss` is not a scalar tensor.
        NumericalError naming the first node holding a non-finite value or gradient.
    """
    if not isinstance(loss, Tensor):
        raise RejectedInputError(f"backward expects a Tensor, got {type(loss).__name__}")
    if loss.size != 1:
        raise RejectedInputError(f"backward expects a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return

    order = _topological_order(loss)
    for node in order:
        if not np.all(np.isfinite(node.value)):
            raise NumericalError(node)

    grads = {id(loss): np.ones_like(loss.value)}
    for node in reversed(order):
        g = grads.pop(id(node), None)
        if g is None:
            continue
        if node.backward_fn is None:
            node.grad = g.copy() if node.grad is None else node.grad + g
            continue
        for parent, pg in zip(node.parents, node.backward_fn(g)):
            if not parent.requires_grad or pg is None:
                continue
            pg = _unbroadcast(np.asarray(pg, dtype=np.float64), parent.shape)
            if not np.all(np.isfinite(pg)):
                raise NumericalError(node, "non-finite gradient")
            if id(parent) in grads:
                grads[id(parent)] = grads[id(parent)] + pg
            else:
                grads[id(parent)] = pg
