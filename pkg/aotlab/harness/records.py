#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Episode records, JSON Lines traces and evaluation summaries.

A trace holds one JSON object per line: a header describing the map and the camera, one line per
step, and a closing summary with EL, CR and the terminal cause. Every line parses on its own.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import pandas as pd

from aotlab.learn.rollout import RolloutBatch
from aotlab.sensing.camera import CameraModel
from aotlab.simworld.maps import MapSpec, obstacle_to_document

_log = logging.getLogger(__name__)

METRIC_COLUMNS = ["map", "method", "episodes", "el_mean", "el_std", "cr_mean", "cr_std"]


class TraceError(ValueError):
    def __init__(self, path, line: int, reason: str):
        self.path = path
        self.line = line
        self.reason = reason

    def __str__(self):
        return f"trace {self.path}, line {self.line}: {self.reason}"


@dataclass
class EpisodeRecord:
    """Everything kept about one evaluation episode."""

    map_name: str
    method: str
    seed: int
    el: int
    cr: float
    reward_sum: float
    cause: str
    steps: List[dict] = field(default_factory=list)

    @classmethod
    def from_batch(cls, batch: RolloutBatch) -> "EpisodeRecord":
        return cls(
            map_name=batch.map_name,
            method=batch.method,
            seed=batch.seed,
            el=batch.el,
            cr=batch.cr,
            reward_sum=batch.reward_sum,
            cause=batch.cause.name,
            steps=[s.to_dict() for s in batch.steps],
        )

    def summary_line(self) -> dict:
        return {
            "type": "summary",
            "el": self.el,
            "cr": self.cr,
            "reward_sum": self.reward_sum,
            "cause": self.cause,
        }


@dataclass
class EpisodeTrace:
    header: dict
    steps: List[dict]
    summary: Optional[dict] = None


def trace_header(
    record: EpisodeRecord, world_map: MapSpec, camera: Optional[CameraModel] = None
) -> dict:
    camera = camera if camera is not None else CameraModel()
    return {
        "type": "header",
        "map": world_map.name,
        "method": record.method,
        "seed": record.seed,
        "path": world_map.path.points.tolist(),
        "bounds": list(world_map.bounds),
        "obstacles": [obstacle_to_document(o) for o in world_map.obstacles],
        "camera": {"hfov": camera.hfov, "frame_w": camera.frame_w, "frame_h": camera.frame_h},
    }


def write_trace(
    path, record: EpisodeRecord, world_map: MapSpec, camera: Optional[CameraModel] = None
):
    lines = [trace_header(record, world_map, camera)]
    lines += [{"type": "step", **step} for step in record.steps]
    lines.append(record.summary_line())
    with open(path, "w") as f:
        for line in lines:
            f.write(json.dumps(line, sort_keys=True) + "\n")
    _log.debug(f"wrote {len(record.steps)} steps to {path}")


def read_trace(path) -> EpisodeTrace:
    """
    Raises:
        OSError if the file cannot be read.
        TraceError naming the first line that does not parse or is out of place.
    """
    header, steps, summary = None, [], None
    with open(path) as f:
        for number, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                line = json.loads(text)
            except json.JSONDecodeError as err:
                raise TraceError(path, number, f"not valid JSON ({err})")
            kind = line.get("type") if isinstance(line, dict) else None
            if kind == "header" and header is None and not steps:
                header = line
            elif kind == "step" and header is not None and summary is None:
                steps.append(line)
            elif kind == "summary" and header is not None and summary is None:
                summary = line
            else:
                raise TraceError(path, number, f"unexpected line of type {kind!r}")
    if header is None:
        raise TraceError(path, 0, "no header line")
    return EpisodeTrace(header=header, steps=steps, summary=summary)


@dataclass(frozen=True)
class EvalSummary:
    map: str
    method: str
    episodes: int
    el_mean: float
    el_std: float
    cr_mean: float
    cr_std: float

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_COLUMNS}


def summarize(records: Sequence[EpisodeRecord], map_name: str, method: str) -> EvalSummary:
    """Mean and population standard deviation of EL and CR over the episodes."""
    if not records:
        raise ValueError("cannot summarize an empty set of episodes")
    df = pd.DataFrame({"el": [r.el for r in records], "cr": [r.cr for r in records]})
    return EvalSummary(
        map=map_name,
        method=method,
        episodes=len(df),
        el_mean=float(df["el"].mean()),
        el_std=float(df["el"].std(ddof=0)),
        cr_mean=float(df["cr"].mean()),
        cr_std=float(df["cr"].std(ddof=0)),
    )


def summary_table(summaries: Iterable[EvalSummary]) -> pd.DataFrame:
    return pd.DataFrame([s.to_dict() for s in summaries], columns=METRIC_COLUMNS)


def write_metrics(summaries: Iterable[EvalSummary], path):
    summary_table(summaries).to_csv(path, index=False)
    _log.info(f"metrics written to {path}")


def format_summary(summary: EvalSummary) -> str:
    return (
        f"{summary.map} ({summary.method}, {summary.episodes} episodes): "
        f"EL {summary.el_mean:.2f} +/- {summary.el_std:.2f}, "
        f"CR {summary.cr_mean:.2f} +/- {summary.cr_std:.2f}"
    )


def trace_name(record: EpisodeRecord) -> str:
    return f"{record.map_name}_{record.method}_seed{record.seed}.jsonl"


def write_traces(records: Sequence[EpisodeRecord], world_map: MapSpec, directory, camera=None):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for record in records:
        path = directory / trace_name(record)
        write_trace(path, record, world_map, camera)
        paths.append(path)
    return paths


def records_consistent(record: EpisodeRecord, min_cr: float = -math.inf) -> bool:
    """Step count equals EL and the per-step global rewards add up to the reported CR."""
    if len(record.steps) != record.el:
        return False
    total = 0.0
    for step in record.steps:
        total += step["rewards"]["global_reward"]
    if record.cause == "cr_floor":
        return total == record.reward_sum and record.cr == min_cr
    return total == record.cr
