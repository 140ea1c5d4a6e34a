"""Heat map of a binary field snapshot, optionally next to a shape profile.

The second input, when given, is a perturbation-shape CSV (x, f, g, h_imag)
drawn as a side panel: the deviation profile belonging to the snapshot.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .loader import load_columns, load_snapshot
from .spec import FigureSpec

REQUIRED_SHAPE = ["x", "f", "g", "h_imag"]


def draw(spec: FigureSpec) -> Figure:
    samples, Wx, Wy, t = load_snapshot(spec.input_path)

    n_panels = 2 if spec.input2_path else 1
    fig = Figure(figsize=(6.5 * n_panels, 4.6))
    ax = fig.add_subplot(1, n_panels, 1)
    mesh = ax.imshow(samples.T, origin="lower", extent=(0.0, Wx, 0.0, Wy),
                     aspect="auto", cmap="RdBu_r")
    fig.colorbar(mesh, ax=ax, label="u")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"u(x, y) at t = {t:.4g}")
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)

    if spec.input2_path:
        shape = load_columns(spec.input2_path, REQUIRED_SHAPE)
        ax2 = fig.add_subplot(1, 2, 2)
        ax2.plot(shape["x"], shape["f"], label="f")
        ax2.plot(shape["x"], shape["g"], label="g")
        ax2.plot(shape["x"], shape["h_imag"], label="Im h")
        ax2.axhline(0.0, color="0.6", lw=0.8)
        ax2.set_xlabel("x")
        ax2.set_title("perturbation profile")
        ax2.legend(frameon=False)
    return fig
