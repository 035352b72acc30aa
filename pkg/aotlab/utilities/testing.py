#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
from contextlib import nullcontext as does_not_raise
from typing import Any, Callable, Sequence

import numpy as np


def get_readable_param(obj: Any):
    """
    Return a more readable representation of an object.

    Use as the `ids` argument of parametrize/pytest.mark.parametrize.
    """
    if isinstance(obj, (tuple, list)):
        return str.join(",", [str(o) for o in obj])
    if "RaisesContext" in type(obj).__name__:
        return "(should raise)"
    if isinstance(obj, does_not_raise):
        return "(should not raise)"
    if hasattr(obj, "name"):
        return str(obj.name)
    return None


def numerical_gradient(func: Callable[[], float], array: np.ndarray, h: float = 1e-5):
    """
    Central finite-difference gradient of the scalar `func()` with respect to `array`, which is
    perturbed in place and restored entry by entry.
    """
    grad = np.zeros_like(array)
    flat = array.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        f_plus = func()
        flat[i] = original - h
        f_minus = func()
        flat[i] = original
        gflat[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-5):
    """
    Largest entrywise |analytic - numeric| / max(|analytic|, |numeric|, floor).

    Entries whose magnitudes both stay below `floor` are compared in absolute terms scaled by
    `floor`; every other entry is held to the plain relative error.
    """
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom)) if analytic.size else 0.0


def check_gradients(
    loss_fn: Callable[[], Any], params: Sequence, h: float = 1e-5, floor: float = 1e-5
):
    """
    Compare analytic gradients of `loss_fn` with central finite differences.

    `loss_fn` builds a fresh graph and returns a scalar tensor; `params` are the tensors (with
    `.value` and `.grad`) to check. Returns the largest relative error over all parameters.
    Central differences with h = 1e-5 are accurate to about 1e-10 in float64, so with the
    default floor a result below 1e-4 is a relative error below 1e-4 for any gradient entry of
    magnitude 1e-5 or more.
    """
    from aotlab.nncore.autodiff import backward, no_grad

    for p in params:
        p.zero_grad()
    backward(loss_fn())
    analytic = [np.array(p.grad, copy=True) for p in params]

    def scalar():
        with no_grad():
            return float(loss_fn().value)

    worst = 0.0
    for p, g in zip(params, analytic):
        numeric = numerical_gradient(scalar, p.value, h=h)
        worst = max(worst, relative_error(g, numeric, floor=floor))
    return worst
