"""Perturbation growth: log deviation versus time (deviation.csv)."""

from __future__ import annotations

import math

import numpy as np
from matplotlib.figure import Figure

from .loader import load_columns
from .spec import FigureSpec

REQUIRED = ["t", "deviation_l2", "gamma_running"]


def draw(spec: FigureSpec) -> Figure:
    data = load_columns(spec.input_path, REQUIRED)
    t, dev, running = data["t"], data["deviation_l2"], data["gamma_running"]

    fig = Figure(figsize=(6.5, 4.6))
    ax = fig.add_subplot()
    ax.semilogy(t, dev, ".-", ms=3, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("deviation L2 norm")
    title = "perturbation growth"
    finite = running[np.isfinite(running)]
    if finite.size:
        rate = float(finite[-1])
        title += f" (final running rate {rate:.4g})"
        # overlay the pure-exponential line with that rate through the end
        ax.semilogy(t, dev[-1] * np.exp(rate * (t - t[-1])), "--",
                    color="0.5", lw=0.9)
    ax.set_title(title)
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    return fig
