#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Figures of episodes and training runs.

Episode figures are top-down views of the world: the target path, the obstacles, the tracker with
its camera frustum and the target, plus an inset showing the ground-truth box in the camera
frame. Figures are written as html (animated, one frame per step) or, through kaleido, as one
static image per step.
"""
import math
from pathlib import Path
from typing import List

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from aotlab.harness.records import EpisodeTrace, read_trace

FORMAT_CHECKLIST = ["jpg", "jpeg", "pdf", "png", "svg"]

TRACKER_COLOR = "#1f77b4"
TARGET_COLOR = "#d62728"
OBSTACLE_COLOR = "#555555"


class UnsupportedFormatError(ValueError):
    def __init__(self, path):
        self.path = path

    def __str__(self):
        return (
            f"The file format of {self.path} is not supported. "
            f"Please use either html, {', '.join(FORMAT_CHECKLIST)}."
        )


def figure_format(path) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix != "html" and suffix not in FORMAT_CHECKLIST:
        raise UnsupportedFormatError(path)
    return suffix


def write_figure(fig: go.Figure, path):
    if figure_format(path) == "html":
        fig.write_html(str(path), auto_open=False, auto_play=False)
    else:
        fig.write_image(str(path), height=850, width=1200)


def _closed_loop(points):
    xs = [p[0] for p in points] + [points[0][0]]
    ys = [p[1] for p in points] + [points[0][1]]
    return xs, ys


def obstacle_outline(doc: dict, segments: int = 32):
    if doc["kind"] == "circle":
        cx, cy = doc["center"]
        r = doc["radius"]
        angles = [2 * math.pi * i / segments for i in range(segments)]
        points = [(cx + r * math.cos(a), cy + r * math.sin(a)) for a in angles]
    else:
        (x0, y0), (x1, y1) = doc["min"], doc["max"]
        points = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    return _closed_loop(points)


def frustum_outline(pose, hfov: float, reach: float = 8.0):
    x, y, heading = pose
    left = (x + reach * math.cos(heading + hfov / 2), y + reach * math.sin(heading + hfov / 2))
    right = (x + reach * math.cos(heading - hfov / 2), y + reach * math.sin(heading - hfov / 2))
    return _closed_loop([(x, y), left, right])


def _joined(outlines):
    # None entries break the line between outlines of one trace
    xs, ys = [], []
    for ox, oy in outlines:
        xs += ox + [None]
        ys += oy + [None]
    return xs, ys


def path_trace(header: dict) -> go.Scatter:
    points = header["path"]
    return go.Scatter(
        x=[p[0] for p in points],
        y=[p[1] for p in points],
        mode="lines",
        line=dict(color="#999999", dash="dash"),
        name="path",
    )


def step_traces(header: dict, step: dict) -> List[go.Scatter]:
    """The per-step traces, always the same number and order so they can be animated."""
    obstacles = step.get("obstacles") or header["obstacles"]
    ox, oy = _joined(obstacle_outline(o) for o in obstacles)
    fx, fy = frustum_outline(step["pose"], header["camera"]["hfov"])
    x, y, _ = step["pose"]
    tx, ty = step["target"]
    w, h = header["camera"]["frame_w"], header["camera"]["frame_h"]
    bx, by = [], []
    if step.get("bbox") is not None:
        x_l, y_l, x_r, y_r = step["bbox"]
        bx, by = _closed_loop([(x_l, y_l), (x_r, y_l), (x_r, y_r), (x_l, y_r)])
    frame_x, frame_y = _closed_loop([(0, 0), (w, 0), (w, h), (0, h)])
    return [
        go.Scatter(
            x=ox,
            y=oy,
            mode="lines",
            fill="toself",
            line=dict(color=OBSTACLE_COLOR),
            name="obstacles",
        ),
        go.Scatter(
            x=fx, y=fy, mode="lines", line=dict(color=TRACKER_COLOR, width=1), name="camera"
        ),
        go.Scatter(
            x=[tx], y=[ty], mode="markers", marker=dict(color=TARGET_COLOR, size=12), name="target"
        ),
        go.Scatter(
            x=[x], y=[y], mode="markers", marker=dict(color=TRACKER_COLOR, size=14), name="tracker"
        ),
        go.Scatter(
            x=frame_x,
            y=frame_y,
            mode="lines",
            line=dict(color="#333333"),
            xaxis="x2",
            yaxis="y2",
            name="frame",
            showlegend=False,
        ),
        go.Scatter(
            x=bx,
            y=by,
            mode="lines",
            line=dict(color=TARGET_COLOR),
            xaxis="x2",
            yaxis="y2",
            name="bbox",
            showlegend=False,
        ),
    ]


def _layout(header: dict, title: str) -> go.Layout:
    xmin, ymin, xmax, ymax = header["bounds"]
    w, h = header["camera"]["frame_w"], header["camera"]["frame_h"]
    return go.Layout(
        title=title,
        xaxis=dict(range=[xmin, xmax], domain=[0.0, 1.0], title="x [m]"),
        yaxis=dict(range=[ymin, ymax], scaleanchor="x", title="y [m]"),
        xaxis2=dict(domain=[0.74, 0.98], anchor="y2", range=[0, w], showticklabels=False),
        yaxis2=dict(domain=[0.72, 0.98], anchor="x2", range=[h, 0], showticklabels=False),
        plot_bgcolor="#f4f4f4",
    )


def _title(header: dict, step=None) -> str:
    title = f"{header['map']} - {header['method']} (seed {header['seed']})"
    if step is not None:
        title += f", step {step['index']}"
    return title


def episode_figure(trace: EpisodeTrace) -> go.Figure:
    """Animated top-down view with one frame per recorded step."""
    header = trace.header
    path = path_trace(header)
    data = [path] + (step_traces(header, trace.steps[0]) if trace.steps else [])
    frames = [
        go.Frame(data=[path] + step_traces(header, s), name=str(s["index"])) for s in trace.steps
    ]
    fig = go.Figure(data=data, frames=frames, layout=_layout(header, _title(header)))
    if frames:
        fig.update_layout(
            updatemenus=[
                dict(
                    type="buttons",
                    buttons=[
                        dict(
                            label="Play",
                            method="animate",
                            args=[None, {"frame": {"duration": 100, "redraw": True}}],
                        )
                    ],
                )
            ],
            sliders=[
                dict(
                    steps=[
                        dict(method="animate", args=[[f.name]], label=f.name) for f in frames
                    ]
                )
            ],
        )
    return fig


def step_figure(trace: EpisodeTrace, step: dict) -> go.Figure:
    header = trace.header
    data = [path_trace(header)] + step_traces(header, step)
    return go.Figure(data=data, layout=_layout(header, _title(header, step)))


def render_episode(trace_path, out_path) -> List[Path]:
    """
    Render an episode trace. An html target gets one animated file; an image target gets one
    file per step, numbered after the step index, so an empty trace produces no image.

    Returns:
        the written paths.

    Raises:
        UnsupportedFormatError for any other suffix.
    """
    out_path = Path(out_path)
    fmt = figure_format(out_path)
    trace = read_trace(trace_path)
    if fmt == "html":
        write_figure(episode_figure(trace), out_path)
        return [out_path]
    written = []
    for step in trace.steps:
        target = out_path.with_name(f"{out_path.stem}_{step['index']:04d}.{fmt}")
        write_figure(step_figure(trace, step), target)
        written.append(target)
    return written


def plot_training_curve(log: pd.DataFrame, out_path=None) -> go.Figure:
    """EL and CR per training episode."""
    fig = make_subplots(
        rows=2, cols=1, shared_xaxes=True, subplot_titles=("Episode length", "Cumulative reward")
    )
    fig.add_trace(go.Scatter(x=log["episode"], y=log["el"], mode="lines+markers", name="EL"), 1, 1)
    fig.add_trace(go.Scatter(x=log["episode"], y=log["cr"], mode="lines+markers", name="CR"), 2, 1)
    fig.update_xaxes(title_text="episode", row=2, col=1)
    fig.update_layout(title="Training progress", showlegend=False)
    if out_path is not None:
        write_figure(fig, out_path)
    return fig
