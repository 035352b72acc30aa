#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Checkpoint documents.

A checkpoint is one JSON object with sorted keys holding the method, the resolved configuration,
the exploration rate reached, every parameter of every agent and each agent's Adam moments.
Saving a loaded checkpoint reproduces the original file byte for byte.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from aotlab.agents.roles import Role
from aotlab.agents.system import Method, TrackingSystem, build_system
from aotlab.learn.ppo import make_optimizers
from aotlab.nncore.optim import Adam
from aotlab.nncore.serialization import (
    CheckpointError,
    CheckpointMismatchError,
    array_from_document,
    array_to_document,
    load_parameters,
    parameters_to_document,
)
from aotlab.utilities.config import config_to_dict, get_config

__all__ = [
    "CHECKPOINT_FORMAT",
    "Checkpoint",
    "CheckpointError",
    "CheckpointMismatchError",
    "checkpoint_document",
    "load_checkpoint",
    "parse_checkpoint",
    "restore_system",
    "save_checkpoint",
]

_log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 1


@dataclass
class Checkpoint:
    method: Method
    config: dict
    epsilon: float
    parameters: dict
    optimizers: dict


def _optimizer_document(optimizer: Adam) -> dict:
    state = optimizer.state_dict()
    return {
        "step": state["step"],
        "m": [array_to_document(m) for m in state["m"]],
        "v": [array_to_document(v) for v in state["v"]],
    }


def checkpoint_document(
    system: TrackingSystem, optimizers: Dict[Role, Adam], epsilon: float, config
) -> dict:
    return {
        "format": CHECKPOINT_FORMAT,
        "method": system.method.name,
        "config": config_to_dict(config),
        "epsilon": float(epsilon),
        "parameters": parameters_to_document(system.named_parameters()),
        "optimizers": {role.name: _optimizer_document(opt) for role, opt in optimizers.items()},
    }


def save_checkpoint(
    path, system: TrackingSystem, optimizers: Dict[Role, Adam], epsilon: float, config
):
    doc = checkpoint_document(system, optimizers, epsilon, config)
    Path(path).write_text(json.dumps(doc, sort_keys=True))
    _log.info(f"checkpoint of {system.num_parameters()} parameters written to {path}")


def parse_checkpoint(text: str) -> Checkpoint:
    """
    Raises:
        CheckpointError naming the offending field when the document is malformed.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise CheckpointError("<document>", f"not valid JSON ({err})")
    if not isinstance(doc, dict):
        raise CheckpointError("<document>", "expected a JSON object")
    for key in ("format", "method", "config", "epsilon", "parameters", "optimizers"):
        if key not in doc:
            raise CheckpointError(key, "missing")
    if doc["format"] != CHECKPOINT_FORMAT:
        raise CheckpointError("format", f"unsupported version {doc['format']!r}")
    try:
        method = Method[doc["method"]]
    except (KeyError, TypeError):
        raise CheckpointError("method", f"unknown method {doc['method']!r}")
    if not isinstance(doc["config"], dict):
        raise CheckpointError("config", "expected an object")
    epsilon = doc["epsilon"]
    if not isinstance(epsilon, (int, float)) or isinstance(epsilon, bool):
        raise CheckpointError("epsilon", f"expected a number, got {epsilon!r}")
    if not 0.0 <= epsilon <= 1.0:
        raise CheckpointError("epsilon", f"must lie in [0, 1], got {epsilon}")
    for key in ("parameters", "optimizers"):
        if not isinstance(doc[key], dict):
            raise CheckpointError(key, "expected an object")
    return Checkpoint(
        method=method,
        config=doc["config"],
        epsilon=float(epsilon),
        parameters=doc["parameters"],
        optimizers=doc["optimizers"],
    )


def load_checkpoint(path) -> Checkpoint:
    """
    Raises:
        OSError if the file cannot be read.
        CheckpointError if its content is malformed.
    """
    checkpoint = parse_checkpoint(Path(path).read_text())
    _log.debug(f"read {checkpoint.method.name} checkpoint from {path}")
    return checkpoint


def _load_optimizer(optimizer: Adam, doc, field: str):
    if not isinstance(doc, dict) or not all(k in doc for k in ("step", "m", "v")):
        raise CheckpointError(field, "expected an object with 'step', 'm' and 'v'")
    if not isinstance(doc["m"], list) or not isinstance(doc["v"], list):
        raise CheckpointError(field, "moments must be lists")
    state = {
        "step": doc["step"],
        "m": [array_from_document(m, f"{field}.m[{i}]") for i, m in enumerate(doc["m"])],
        "v": [array_from_document(v, f"{field}.v[{i}]") for i, v in enumerate(doc["v"])],
    }
    step = state["step"]
    if not isinstance(step, int) or isinstance(step, bool) or step < 0:
        raise CheckpointError(f"{field}.step", f"expected a nonnegative integer, got {step!r}")
    try:
        optimizer.load_state_dict(state)
    except ValueError as err:
        raise CheckpointMismatchError(field, str(err))


def restore_system(
    checkpoint: Checkpoint, config=None, method: Optional[Method] = None
) -> Tuple[TrackingSystem, Dict[Role, Adam], object]:
    """
    Rebuild the system, its optimizers and its configuration from a checkpoint.

    The checkpoint's own configuration is used unless `config` is given.

    Raises:
        CheckpointMismatchError if `method` differs from the checkpoint's, or if the parameter
        names or shapes do not fit the configured architecture.
    """
    if method is not None and Method(method) is not checkpoint.method:
        raise CheckpointMismatchError(
            "method", f"checkpoint holds a {checkpoint.method.name} system, not {method.name}"
        )
    if config is None:
        try:
            config = get_config(checkpoint.config)
        except ValueError as err:
            raise CheckpointError("config", str(err))
    system = build_system(checkpoint.method, config)
    load_parameters(system.named_parameters(), checkpoint.parameters)
    optimizers = make_optimizers(system, config.train.lr)
    names = sorted(role.name for role in optimizers)
    if sorted(checkpoint.optimizers) != names:
        raise CheckpointMismatchError(
            "optimizers", f"expected moments for {names}, got {sorted(checkpoint.optimizers)}"
        )
    for role, optimizer in optimizers.items():
        _load_optimizer(optimizer, checkpoint.optimizers[role.name], f"optimizers.{role.name}")
    return system, optimizers, config
