#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Map documents: target path, obstacles, spawn, world bounds and the episode caps.

The four built-in maps ship as JSON files in `aotlab.case_studies` and are loaded by name
(case-insensitive); any other map can be loaded from a file path.
"""
import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from aotlab.simworld.geometry import Obstacle, ObstacleKind, Polyline

_log = logging.getLogger(__name__)

BUILTIN_MAPS = ("SingleTurn", "SimpleLoop", "SharpLoop", "Complex")


class MapError(ValueError):
    def __init__(self, source: str, reason: str):
        self.source = source
        self.reason = reason

    def __str__(self):
        return f"invalid map {self.source}: {self.reason}"


class UnknownMapError(MapError):
    def __init__(self, name: str):
        super().__init__(name, "unknown map")
        self.name = name

    def __str__(self):
        return f"Unknown map '{self.name}'. Built-in maps: {', '.join(BUILTIN_MAPS)}"


@dataclass(frozen=True)
class MapSpec:
    name: str
    path: Polyline
    target_speed: float
    obstacles: Tuple[Obstacle, ...]
    spawn_position: Tuple[float, float]
    spawn_heading: float
    lead_distance: float
    bounds: Tuple[float, float, float, float]
    max_el: int
    min_cr: float

    @property
    def waypoints(self) -> np.ndarray:
        return self.path.points

    @property
    def dynamic_obstacles(self) -> Tuple[Obstacle, ...]:
        return tuple(o for o in self.obstacles if o.dynamic)

    def inside_bounds(self, point) -> bool:
        xmin, ymin, xmax, ymax = self.bounds
        return xmin <= point[0] <= xmax and ymin <= point[1] <= ymax


def advance_target(world_map: MapSpec, progress: float, dt: float):
    """
    Move the target `target_speed * dt` meters further along the path.

    Returns:
        (new progress, position, path complete)
    """
    new_progress = min(progress + world_map.target_speed * dt, world_map.path.length)
    position = world_map.path.position_at(new_progress)
    return new_progress, position, new_progress >= world_map.path.length


def _point(value, source, field) -> Tuple[float, float]:
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError):
        raise MapError(source, f"'{field}' must be an [x, y] pair, got {value!r}")
    return x, y


def obstacle_to_document(obs: Obstacle) -> dict:
    """Current placement of an obstacle in map-document form, without its motion."""
    if obs.kind is ObstacleKind.circle:
        return {"kind": obs.kind.name, "center": list(obs.center), "radius": obs.radius}
    return {"kind": obs.kind.name, "min": list(obs.lower), "max": list(obs.upper)}


def _obstacle_from_document(doc, source, index) -> Obstacle:
    field = f"obstacles[{index}]"
    if not isinstance(doc, dict):
        raise MapError(source, f"'{field}' must be an object")
    try:
        kind = ObstacleKind[doc.get("kind", "")]
    except KeyError:
        choices = [k.name for k in ObstacleKind]
        raise MapError(source, f"'{field}.kind' must be one of {choices}")
    path, speed = None, 0.0
    motion = doc.get("motion")
    if motion is not None:
        try:
            path = Polyline(motion["path"])
            speed = float(motion["speed"])
        except (KeyError, TypeError, ValueError) as err:
            raise MapError(source, f"'{field}.motion' is malformed: {err}")
    try:
        if kind is ObstacleKind.circle:
            return Obstacle(
                kind,
                center=_point(doc.get("center"), source, f"{field}.center"),
                radius=float(doc.get("radius", 0.0)),
                path=path,
                speed=speed,
            )
        return Obstacle(
            kind,
            lower=_point(doc.get("min"), source, f"{field}.min"),
            upper=_point(doc.get("max"), source, f"{field}.max"),
            path=path,
            speed=speed,
        )
    except ValueError as err:
        if isinstance(err, MapError):
            raise
        raise MapError(source, f"'{field}': {err}")


def map_from_document(doc: dict, source: str = "<document>") -> MapSpec:
    """
    Build a MapSpec from a parsed map document.

    Raises:
        MapError naming the offending field.
    """
    if not isinstance(doc, dict):
        raise MapError(source, "document must be a JSON object")
    for key in ("name", "waypoints", "bounds", "max_el", "min_cr"):
        if key not in doc:
            raise MapError(source, f"missing field '{key}'")
    try:
        path = Polyline(doc["waypoints"])
    except ValueError as err:
        raise MapError(source, f"'waypoints': {err}")
    try:
        bounds = tuple(float(b) for b in doc["bounds"])
    except (TypeError, ValueError):
        bounds = ()
    if len(bounds) != 4 or bounds[2] <= bounds[0] or bounds[3] <= bounds[1]:
        raise MapError(
            source, f"'bounds' must be [xmin, ymin, xmax, ymax], got {doc['bounds']!r}"
        )
    target_speed = float(doc.get("target_speed", 2.0))
    if not target_speed > 0:
        raise MapError(source, f"'target_speed' must be positive, got {target_speed}")
    max_el = doc["max_el"]
    if not isinstance(max_el, int) or isinstance(max_el, bool) or max_el < 1:
        raise MapError(source, f"'max_el' must be a positive integer, got {max_el!r}")
    min_cr = float(doc["min_cr"])

    obstacles = tuple(
        _obstacle_from_document(o, source, i) for i, o in enumerate(doc.get("obstacles", []))
    )

    spawn = doc.get("spawn", {})
    lead = float(spawn.get("lead_distance", 6.0))
    heading = path.heading_at(0.0)
    if "position" in spawn:
        position = _point(spawn["position"], source, "spawn.position")
        heading = float(spawn.get("heading", heading))
    else:
        start = path.points[0]
        position = (
            float(start[0] - lead * np.cos(heading)),
            float(start[1] - lead * np.sin(heading)),
        )

    spec = MapSpec(
        name=str(doc["name"]),
        path=path,
        target_speed=target_speed,
        obstacles=obstacles,
        spawn_position=position,
        spawn_heading=heading,
        lead_distance=lead,
        bounds=bounds,
        max_el=max_el,
        min_cr=min_cr,
    )
    if not spec.inside_bounds(position):
        raise MapError(source, f"spawn position {position} lies outside bounds {bounds}")
    return spec


def _builtin_name(name: str) -> Optional[str]:
    for builtin in BUILTIN_MAPS:
        if builtin.lower() == name.lower():
            return builtin
    return None


def load_map(name_or_path: Union[str, Path]) -> MapSpec:
    """
    Load a built-in map by name (case-insensitive) or a map document from a file path.

    Raises:
        UnknownMapError if the name is neither a built-in map nor an existing file.
        MapError if the document is invalid.
    """
    builtin = _builtin_name(str(name_or_path))
    if builtin is not None:
        source = resources.files("aotlab.case_studies").joinpath(f"{builtin}.json")
        text = source.read_text()
        origin = builtin
    else:
        path = Path(name_or_path)
        if not path.is_file():
            raise UnknownMapError(str(name_or_path))
        text = path.read_text()
        origin = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise MapError(origin, f"not valid JSON ({err})")
    _log.debug(f"Loaded map {origin}")
    return map_from_document(doc, origin)


def list_maps() -> List[MapSpec]:
    return [load_map(name) for name in BUILTIN_MAPS]


def map_table() -> pd.DataFrame:
    """One row per built-in map with its path length, obstacle counts and episode caps."""
    rows = []
    for spec in list_maps():
        rows.append(
            {
                "map": spec.name,
                "path_length": round(spec.path.length, 2),
                "obstacles": len(spec.obstacles),
                "dynamic_obstacles": len(spec.dynamic_obstacles),
                "target_speed": spec.target_speed,
                "max_el": spec.max_el,
                "min_cr": spec.min_cr,
            }
        )
    return pd.DataFrame(rows)
