#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Tests for the kinematic world, the geometry helpers and the map documents
"""
import json
import math
from dataclasses import replace

import numpy as np
import pytest

from aotlab.simworld.geometry import Obstacle, ObstacleKind, Polyline, raycast
from aotlab.simworld.maps import (
    BUILTIN_MAPS,
    MapError,
    UnknownMapError,
    advance_target,
    load_map,
    map_from_document,
    map_table,
)
from aotlab.simworld.world import (
    RejectedActionError,
    WorldParams,
    check_collision,
    reset_world,
    step,
)
from aotlab.utilities.testing import does_not_raise, get_readable_param


def straight_map(obstacles=(), **overrides):
    doc = {
        "name": "Straight",
        "waypoints": [[0.0, 0.0], [10.0, 0.0]],
        "target_speed": 2.0,
        "obstacles": list(obstacles),
        "bounds": [-50.0, -50.0, 50.0, 50.0],
        "max_el": 15,
        "min_cr": -150.0,
    }
    doc.update(overrides)
    return map_from_document(doc)


@pytest.fixture
def params():
    return WorldParams()


@pytest.fixture
def world_map():
    return straight_map()


@pytest.mark.unit
class TestStep:
    def test_acceleration_from_rest(self, world_map, params):
        state = reset_world(world_map, params)
        new = step(state, (0.5, 0.0), 0.1, world_map, params)
        assert new.tracker_speed == pytest.approx(0.5)
        assert new.step_index == 1

    def test_zero_steering_keeps_heading(self, world_map, params):
        state = replace(reset_world(world_map, params), tracker_heading=0.3, tracker_speed=2.0)
        new = step(state, (0.2, 0.0), 0.1, world_map, params)
        assert new.tracker_heading == 0.3

    def test_speed_clamped_at_v_max(self, world_map, params):
        state = replace(reset_world(world_map, params), tracker_speed=params.v_max)
        assert step(state, (0.5, 0.0), 0.1, world_map, params).tracker_speed == params.v_max

    def test_no_reverse(self, world_map, params):
        state = reset_world(world_map, params)
        assert step(state, (-0.5, 0.0), 0.1, world_map, params).tracker_speed == 0.0

    def test_bicycle_turn(self, world_map, params):
        state = replace(reset_world(world_map, params), tracker_heading=0.0, tracker_speed=1.5)
        new = step(state, (0.0, 0.25), 0.1, world_map, params)
        assert new.tracker_heading == pytest.approx(1.5 / 2.0 * math.tan(0.25) * 0.1)

    @pytest.mark.parametrize(
        "nav,expectation",
        [
            ((0.5, -0.5), does_not_raise()),
            ((0.6, 0.0), pytest.raises(RejectedActionError)),
            ((0.0, -0.51), pytest.raises(RejectedActionError)),
            ((float("nan"), 0.0), pytest.raises(RejectedActionError)),
        ],
        ids=get_readable_param,
    )
    def test_action_bounds(self, world_map, params, nav, expectation):
        state = reset_world(world_map, params)
        with expectation:
            step(state, nav, 0.1, world_map, params)

    def test_input_state_is_not_mutated(self, world_map, params):
        state = reset_world(world_map, params)
        before = replace(state)
        step(state, (0.5, 0.5), 0.1, world_map, params)
        assert state == before

    @pytest.mark.parametrize("seed", range(5))
    def test_bounds_preserved_over_random_actions(self, params, seed):
        world_map = load_map("Complex")
        rng = np.random.default_rng(seed)
        state = reset_world(world_map, params)
        for _ in range(200):
            state = step(state, rng.uniform(-0.5, 0.5, size=2), 0.1, world_map, params)
            assert 0.0 <= state.tracker_speed <= params.v_max
            assert 0.0 <= state.target_path_progress <= world_map.path.length

    def test_deterministic(self, params):
        world_map = load_map("Complex")
        actions = np.random.default_rng(11).uniform(-0.5, 0.5, size=(50, 2))

        def run():
            state = reset_world(world_map, params, seed=3)
            states = [state]
            for a in actions:
                state = step(state, a, 0.1, world_map, params)
                states.append(state)
            return states

        assert run() == run()

    def test_dynamic_obstacles_move(self, params):
        world_map = load_map("Complex")
        state = reset_world(world_map, params)
        new = step(state, (0.0, 0.0), 0.1, world_map, params)
        moved = [a.center != b.center for a, b in zip(state.obstacles, new.obstacles)]
        assert sum(moved) == 2


@pytest.mark.unit
class TestAdvanceTarget:
    def test_linear_interpolation(self, world_map):
        progress, position, complete = advance_target(world_map, 0.0, 0.1)
        assert progress == pytest.approx(0.2)
        np.testing.assert_allclose(position, [0.2, 0.0])
        assert not complete

    def test_zero_dt_is_identity(self, world_map):
        progress, position, _ = advance_target(world_map, 3.0, 0.0)
        assert progress == 3.0
        np.testing.assert_allclose(position, [3.0, 0.0])

    def test_path_end_completes(self, world_map):
        progress, position, complete = advance_target(world_map, 10.0, 0.1)
        assert complete
        assert progress == 10.0
        np.testing.assert_allclose(position, [10.0, 0.0])


@pytest.mark.unit
class TestCollision:
    def test_tracker_at_obstacle_center(self, params):
        world_map = straight_map([{"kind": "circle", "center": [3.0, 3.0], "radius": 1.0}])
        state = replace(reset_world(world_map, params), tracker_pos=(3.0, 3.0))
        assert check_collision(state, params)

    def test_far_obstacle(self, params):
        world_map = straight_map([{"kind": "circle", "center": [13.0, 0.0], "radius": 1.0}])
        state = replace(reset_world(world_map, params), tracker_pos=(3.0, 0.0))
        assert not check_collision(state, params)

    def test_disc_intersection(self, params):
        world_map = straight_map([{"kind": "circle", "center": [4.7, 0.0], "radius": 1.0}])
        state = replace(reset_world(world_map, params), tracker_pos=(3.0, 0.0))
        assert check_collision(state, params)

    def test_rectangle(self, params):
        world_map = straight_map([{"kind": "rectangle", "min": [2.0, 2.0], "max": [4.0, 4.0]}])
        state = reset_world(world_map, params)
        assert check_collision(replace(state, tracker_pos=(3.0, 1.3)), params)
        assert not check_collision(replace(state, tracker_pos=(3.0, 1.1)), params)

    def test_leaving_bounds(self, params, world_map):
        state = replace(reset_world(world_map, params), tracker_pos=(49.5, 0.0))
        assert check_collision(state, params)

    @pytest.mark.parametrize("seed", range(5))
    def test_translation_symmetry(self, params, seed):
        rng = np.random.default_rng(seed)
        world_map = load_map("Complex")
        state = reset_world(world_map, params)
        dx, dy = rng.uniform(-100.0, 100.0, size=2)
        for _ in range(50):
            pos = tuple(rng.uniform(-30.0, 40.0, size=2))
            moved = replace(
                state,
                tracker_pos=(pos[0] + dx, pos[1] + dy),
                obstacles=tuple(o.translated(dx, dy) for o in state.obstacles),
                bounds=(
                    state.bounds[0] + dx,
                    state.bounds[1] + dy,
                    state.bounds[2] + dx,
                    state.bounds[3] + dy,
                ),
            )
            original = replace(state, tracker_pos=pos)
            assert check_collision(original, params) == check_collision(moved, params)


@pytest.mark.unit
class TestRaycast:
    def test_no_obstacles(self):
        assert raycast((0.0, 0.0), 0.0, [], 20.0) == 20.0

    def test_circle_ahead(self):
        circle = Obstacle(ObstacleKind.circle, center=(10.0, 0.0), radius=1.0)
        assert raycast((0.0, 0.0), 0.0, [circle], 20.0) == pytest.approx(9.0)

    def test_ray_pointing_away(self):
        circle = Obstacle(ObstacleKind.circle, center=(10.0, 0.0), radius=1.0)
        assert raycast((0.0, 0.0), math.pi, [circle], 20.0) == 20.0

    def test_rectangle_slab(self):
        box = Obstacle(ObstacleKind.rectangle, lower=(5.0, -1.0), upper=(7.0, 1.0))
        assert raycast((0.0, 0.0), 0.0, [box], 20.0) == pytest.approx(5.0)
        assert raycast((0.0, 0.0), math.pi / 2, [box], 20.0) == 20.0

    @pytest.mark.parametrize("seed", range(5))
    def test_range_and_shrinking(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(100):
            center = tuple(rng.uniform(-15.0, 15.0, size=2))
            radius = rng.uniform(0.5, 3.0)
            if math.hypot(*center) <= radius:
                continue
            direction = rng.uniform(-math.pi, math.pi)
            big = Obstacle(ObstacleKind.circle, center=center, radius=radius)
            small = Obstacle(ObstacleKind.circle, center=center, radius=0.5 * radius)
            d_big = raycast((0.0, 0.0), direction, [big], 20.0)
            d_small = raycast((0.0, 0.0), direction, [small], 20.0)
            assert 0.0 < d_big <= 20.0
            assert d_small >= d_big


@pytest.mark.unit
class TestMaps:
    @pytest.mark.parametrize(
        "name,max_el", [("SingleTurn", 15), ("SimpleLoop", 25), ("SharpLoop", 45), ("Complex", 80)]
    )
    def test_builtin_caps(self, name, max_el):
        spec = load_map(name)
        assert spec.max_el == max_el
        assert spec.min_cr == -150.0
        assert spec.inside_bounds(spec.spawn_position)

    def test_name_is_case_insensitive(self):
        assert load_map("singleturn").name == "SingleTurn"

    def test_single_turn_geometry(self):
        spec = load_map("SingleTurn")
        assert spec.path.length == pytest.approx(50.0)
        assert spec.spawn_position == pytest.approx((-6.0, 0.0))
        assert spec.obstacles == ()

    def test_complex_obstacles(self):
        spec = load_map("Complex")
        assert len(spec.obstacles) == 8
        assert len(spec.dynamic_obstacles) == 2
        assert spec.path.length == pytest.approx(126.3, abs=0.1)

    def test_sharp_loop_has_central_rectangle(self):
        spec = load_map("SharpLoop")
        assert [o.kind for o in spec.obstacles] == [ObstacleKind.rectangle]

    def test_target_path_clear_of_static_obstacles(self, params):
        for spec in [load_map(name) for name in BUILTIN_MAPS]:
            for s in np.linspace(0.0, spec.path.length, 400):
                p = spec.path.position_at(s)
                for obs in spec.obstacles:
                    if not obs.dynamic:
                        assert obs.distance_to(p) > params.tracker_radius

    def test_unknown_map(self):
        with pytest.raises(UnknownMapError, match="Built-in maps"):
            load_map("Nowhere")

    def test_load_from_file(self, tmp_path):
        doc = {
            "name": "Mine",
            "waypoints": [[0, 0], [5, 0]],
            "bounds": [-10, -10, 10, 10],
            "max_el": 10,
            "min_cr": -20,
        }
        path = tmp_path / "mine.json"
        path.write_text(json.dumps(doc))
        spec = load_map(str(path))
        assert spec.name == "Mine"
        assert spec.target_speed == 2.0

    @pytest.mark.parametrize(
        "override",
        [
            {"waypoints": [[0, 0]]},
            {"bounds": [0, 0, -1, 1]},
            {"max_el": 0},
            {"obstacles": [{"kind": "circle", "center": [1, 1], "radius": -1}]},
            {"obstacles": [{"kind": "triangle"}]},
            {"spawn": {"position": [100, 100]}},
        ],
    )
    def test_invalid_documents(self, override):
        with pytest.raises(MapError):
            straight_map(**override)

    def test_map_table(self):
        table = map_table()
        assert list(table["map"]) == list(BUILTIN_MAPS)
        assert list(table["max_el"]) == [15, 25, 45, 80]


@pytest.mark.unit
def test_polyline_ping_pong():
    line = Polyline([[0.0, 0.0], [4.0, 0.0]])
    np.testing.assert_allclose(line.ping_pong(5.0), [3.0, 0.0])
    np.testing.assert_allclose(line.ping_pong(8.0), [0.0, 0.0])
