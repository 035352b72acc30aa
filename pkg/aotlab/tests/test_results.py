#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Tests for episode and training figures
"""
import json
import math

import pandas as pd
import plotly.graph_objects as go
import pytest

from aotlab.harness.records import read_trace
from aotlab.utilities.results import (
    UnsupportedFormatError,
    episode_figure,
    plot_training_curve,
    render_episode,
    step_traces,
)

HEADER = {
    "type": "header",
    "map": "SingleTurn",
    "method": "csaot",
    "seed": 0,
    "path": [[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]],
    "bounds": [-5.0, -5.0, 15.0, 15.0],
    "obstacles": [{"kind": "circle", "center": [5.0, 5.0], "radius": 1.0}],
    "camera": {"hfov": math.pi / 2, "frame_w": 640, "frame_h": 480},
}


def step(index, pose, bbox=(300.0, 200.0, 340.0, 260.0)):
    return {
        "type": "step",
        "index": index,
        "pose": list(pose),
        "target": [pose[0] + 3.0, pose[1]],
        "bbox": list(bbox) if bbox is not None else None,
        "obstacles": [{"kind": "rect", "min": [4.0, 4.0], "max": [6.0, 6.0]}],
    }


def write_lines(path, steps):
    lines = [HEADER] + steps + [{"type": "summary", "el": len(steps), "cr": -1.0}]
    path.write_text("".join(json.dumps(line) + "\n" for line in lines))
    return path


@pytest.fixture
def one_step_trace(tmp_path):
    return write_lines(tmp_path / "one.jsonl", [step(0, (1.0, 2.0, 0.0))])


@pytest.fixture
def captured_images(monkeypatch):
    written = []

    def fake_write_image(fig, path, **kwargs):
        written.append(path)

    monkeypatch.setattr(go.Figure, "write_image", fake_write_image)
    return written


@pytest.mark.component
class TestEpisodeFigure:
    def test_one_step(self, one_step_trace):
        fig = episode_figure(read_trace(one_step_trace))
        assert len(fig.frames) == 1
        trackers = [t for t in fig.frames[0].data if t.name == "tracker"]
        assert len(trackers) == 1
        assert (trackers[0].x[0], trackers[0].y[0]) == (1.0, 2.0)

    def test_bbox_inset(self):
        x_l, y_l, x_r, y_r = 100.0, 50.0, 180.0, 90.0
        traces = step_traces(HEADER, step(0, (0.0, 0.0, 0.0), (x_l, y_l, x_r, y_r)))
        bbox = next(t for t in traces if t.name == "bbox")
        assert x_l in bbox["x"] and x_r in bbox["x"]
        assert bbox["xaxis"] == "x2"

    def test_traces_are_stable_without_bbox(self):
        with_box = step_traces(HEADER, step(0, (0.0, 0.0, 0.0)))
        without = step_traces(HEADER, step(1, (0.0, 0.0, 0.0), bbox=None))
        assert [t.name for t in with_box] == [t.name for t in without]

    def test_html(self, one_step_trace, tmp_path):
        out = tmp_path / "episode.html"
        assert render_episode(one_step_trace, out) == [out]
        assert out.is_file()

    def test_empty_trace(self, tmp_path, captured_images):
        trace = write_lines(tmp_path / "empty.jsonl", [])
        assert len(episode_figure(read_trace(trace)).frames) == 0
        assert render_episode(trace, tmp_path / "empty.html") == [tmp_path / "empty.html"]
        assert render_episode(trace, tmp_path / "empty.svg") == []
        assert captured_images == []

    def test_image_per_step(self, tmp_path, captured_images):
        steps = [step(i, (float(i), 0.0, 0.0)) for i in range(3)]
        trace = write_lines(tmp_path / "three.jsonl", steps)
        written = render_episode(trace, tmp_path / "episode.svg")
        assert [p.name for p in written] == [
            "episode_0000.svg",
            "episode_0001.svg",
            "episode_0002.svg",
        ]
        assert captured_images == [str(p) for p in written]

    def test_unsupported_format(self, one_step_trace, tmp_path):
        with pytest.raises(UnsupportedFormatError, match="svg"):
            render_episode(one_step_trace, tmp_path / "episode.gif")


@pytest.mark.component
def test_training_curve(tmp_path):
    log = pd.DataFrame({"episode": [0, 1, 2], "el": [3, 7, 15], "cr": [-40.0, -30.0, -12.5]})
    fig = plot_training_curve(log, tmp_path / "curve.html")
    assert len(fig.data) == 2
    assert list(fig.data[0].y) == [3, 7, 15]
    assert (tmp_path / "curve.html").is_file()
