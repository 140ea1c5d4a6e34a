"""Mismatch-determinant magnitude over the (k, gamma) scan grid.

The scan CSV rows are drawn on their own grid without resampling. With a
second input (the k = 0 scan, columns gamma, D0) an extra panel shows the
one-dimensional determinant near the origin.
"""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

from .loader import ContractError, load_columns
from .spec import FigureSpec

REQUIRED = ["k", "gamma", "normalized_absD"]
REQUIRED_K0 = ["gamma", "D0"]


def _pivot(k: np.ndarray, gamma: np.ndarray, val: np.ndarray):
    ks = np.unique(k)
    gs = np.unique(gamma)
    if ks.size * gs.size != val.size:
        raise ContractError(
            f"scan rows do not form a full grid: {ks.size} k values x "
            f"{gs.size} gamma values != {val.size} rows")
    surface = np.full((gs.size, ks.size), np.nan)
    ki = np.searchsorted(ks, k)
    gi = np.searchsorted(gs, gamma)
    surface[gi, ki] = val
    return ks, gs, surface


def draw(spec: FigureSpec) -> Figure:
    data = load_columns(spec.input_path, REQUIRED)
    ks, gs, surface = _pivot(data["k"], data["gamma"], data["normalized_absD"])

    n_panels = 2 if spec.input2_path else 1
    fig = Figure(figsize=(6.0 * n_panels, 5.0))
    ax = fig.add_subplot(1, n_panels, 1)
    with np.errstate(divide="ignore"):
        logd = np.log10(np.ma.masked_invalid(surface))
    mesh = ax.pcolormesh(ks, gs, logd, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="log10 |D|")
    ax.set_xlabel("k")
    ax.set_ylabel("gamma")
    ax.set_title("normalized mismatch determinant |D(k, gamma)|")
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)

    if spec.input2_path:
        k0 = load_columns(spec.input2_path, REQUIRED_K0)
        ax2 = fig.add_subplot(1, 2, 2)
        ax2.plot(k0["gamma"], k0["D0"], color="tab:blue")
        ax2.axhline(0.0, color="0.6", lw=0.8)
        ax2.set_xlabel("gamma")
        ax2.set_ylabel("D0")
        ax2.set_title("k = 0 determinant along gamma")
    return fig
