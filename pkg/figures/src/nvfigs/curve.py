"""Traced zero curve of the mismatch determinant (columns s, k, gamma, residual).

The gamma = 0 axis is marked; a second input (the tracer's band.txt summary
line) annotates the unstable band edges.
"""

from __future__ import annotations

import re
from pathlib import Path

from matplotlib.figure import Figure

from .loader import ContractError, load_columns
from .spec import FigureSpec

REQUIRED = ["s", "k", "gamma"]
_BAND_RE = re.compile(r"band k_min=(\S+) k_max=(\S+) closed=(\S+)")


def _read_band(path: str) -> tuple[float, float, str]:
    if not Path(path).is_file():
        raise ContractError(f"input file {path} does not exist")
    text = Path(path).read_text()
    match = _BAND_RE.search(text)
    if not match:
        raise ContractError(f"{path} does not contain a "
                            "'band k_min=... k_max=... closed=...' line")
    return float(match.group(1)), float(match.group(2)), match.group(3)


def draw(spec: FigureSpec) -> Figure:
    data = load_columns(spec.input_path, REQUIRED)

    fig = Figure(figsize=(6.5, 5.0))
    ax = fig.add_subplot()
    ax.plot(data["k"], data["gamma"], ".-", ms=3, lw=0.8, color="tab:blue")
    ax.axhline(0.0, color="0.4", lw=0.9)  # the gamma = 0 axis
    ax.set_xlabel("k")
    ax.set_ylabel("gamma")
    ax.set_title("zero curve of the mismatch determinant")
    if spec.input2_path:
        k_min, k_max, closed = _read_band(spec.input2_path)
        for edge in (k_min, k_max):
            ax.axvline(edge, color="tab:red", lw=0.9, ls="--")
        ax.set_title(f"zero curve; band ({k_min:.4g}, {k_max:.4g}), "
                     f"closed={closed}")
    if spec.xlim:
        ax.set_xlim(*spec.xlim)
    if spec.ylim:
        ax.set_ylim(*spec.ylim)
    return fig
