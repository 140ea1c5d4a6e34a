"""Polar speed profile of planar solitons (columns alpha, kappa, speed)."""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .loader import load_columns
from .spec import FigureSpec

REQUIRED = ["alpha", "kappa", "speed"]


def draw(spec: FigureSpec) -> Figure:
    data = load_columns(spec.input_path, REQUIRED)
    alpha, speed = data["alpha"], data["speed"]

    fig = Figure(figsize=(5.5, 5.5))
    ax = fig.add_subplot(projection="polar")
    forward = speed >= 0
    ax.plot(alpha[forward], speed[forward], ".", ms=3, color="tab:blue",
            label="forward (speed > 0)")
    ax.plot(alpha[~forward], -speed[~forward], ".", ms=3, color="tab:red",
            label="reversed (speed < 0)")
    ax.set_title("Planar soliton speed profile |c cos 3a|")
    ax.legend(loc="lower left", bbox_to_anchor=(-0.1, -0.12), frameon=False)
    return fig
