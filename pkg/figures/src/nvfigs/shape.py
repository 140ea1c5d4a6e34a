"""Perturbation shape profiles (columns x, f, g, h_imag).

A second shape CSV, when given, is overlaid dashed — e.g. two points along
the instability arc, or a computed shape against reference curves.
"""

from __future__ import annotations

from matplotlib.figure import Figure

from .loader import load_columns
from .spec import FigureSpec

REQUIRED = ["x", "f", "g", "h_imag"]


def _plot(ax, data, ls, suffix=""):
    ax.plot(data["x"], data["f"], ls, color="tab:blue", label="f" + suffix)
    ax.plot(data["x"], data["g"], ls, color="tab:orange", label="g" + suffix)
    ax.plot(data["x"], data["h_imag"], ls, color="tab:green",
            label="Im h" + suffix)


def draw(spec: FigureSpec) -> Figure:
    data = load_columns(spec.input_path, REQUIRED)

    fig = Figure(figsize=(6.5, 4.6))
    ax = fig.add_subplot()
    _plot(ax, data, "-")
    if spec.input2_path:
        data2 = load_columns(spec.input2_path, REQUIRED)
        _plot(ax, data2, "--", suffix="'")
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.set_xlabel("x")
    ax.set_title("transverse perturbation shape")
    ax.legend(frameon=False, ncols=2)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    return fig
