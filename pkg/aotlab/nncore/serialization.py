#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Conversion between parameter sets and JSON-ready documents of the form
``{name: {"shape": [...], "values": [...]}}``.

Values are written as Python floats, whose JSON text is the shortest repr that parses back to the
same 64-bit number, so a save/load/save cycle reproduces the document byte for byte.
"""
from typing import Dict, Iterable, Tuple

import numpy as np

from aotlab.nncore.autodiff import Parameter


class CheckpointError(ValueError):
    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason

    def __str__(self):
        return f"invalid checkpoint field '{self.field}': {self.reason}"


class CheckpointMismatchError(CheckpointError):
    def __str__(self):
        return f"checkpoint does not match the configured system at '{self.field}': {self.reason}"


def array_to_document(array: np.ndarray) -> dict:
    array = np.asarray(array, dtype=np.float64)
    return {"shape": list(array.shape), "values": [float(x) for x in array.reshape(-1)]}


def array_from_document(doc, field: str) -> np.ndarray:
    if not isinstance(doc, dict) or "shape" not in doc or "values" not in doc:
        raise CheckpointError(field, "expected an object with 'shape' and 'values'")
    shape, values = doc["shape"], doc["values"]
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 0 for s in shape):
        raise CheckpointError(f"{field}.shape", f"expected a list of sizes, got {shape!r}")
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise CheckpointError(f"{field}.values", "expected a list of numbers")
    if len(values) != int(np.prod(shape, dtype=np.int64)):
        raise CheckpointError(
            f"{field}.values", f"{len(values)} values cannot fill shape {tuple(shape)}"
        )
    array = np.array(values, dtype=np.float64).reshape(shape)
    if not np.all(np.isfinite(array)):
        raise CheckpointError(f"{field}.values", "non-finite entries")
    return array


def parameters_to_document(named: Iterable[Tuple[str, Parameter]]) -> Dict[str, dict]:
    return {name: array_to_document(p.value) for name, p in named}


def load_parameters(named: Iterable[Tuple[str, Parameter]], doc, field: str = "parameters"):
    """
    Copy the values in `doc` into the named parameters.

    Raises:
        CheckpointError if `doc` is malformed.
        CheckpointMismatchError if names or shapes differ from the parameter set.
    """
    if not isinstance(doc, dict):
        raise CheckpointError(field, "expected an object keyed by parameter name")
    named = list(named)
    expected = {name for name, _ in named}
    missing = sorted(expected - set(doc))
    extra = sorted(set(doc) - expected)
    if missing or extra:
        raise CheckpointMismatchError(field, f"missing {missing}, unexpected {extra}")
    arrays = {}
    for name, p in named:
        array = array_from_document(doc[name], f"{field}.{name}")
        if array.shape != p.shape:
            raise CheckpointMismatchError(
                f"{field}.{name}", f"shape {array.shape} differs from {p.shape}"
            )
        arrays[name] = array
    for name, p in named:
        p.value = arrays[name]
        p.zero_grad()
