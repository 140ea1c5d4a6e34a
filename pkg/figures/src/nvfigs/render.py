"""Dispatch a FigureSpec to its renderer and save the raster image.

The sha256 checksums of the input files are embedded in the PNG metadata
under the key `input-checksum`.
"""

from __future__ import annotations

from pathlib import Path

from . import curve, det_surface, growth, shape, snapshot, speed_profile
from .loader import input_checksum
from .spec import FigureSpec

_RENDERERS = {
    "speed-profile": speed_profile.draw,
    "det-surface": det_surface.draw,
    "curve": curve.draw,
    "snapshot": snapshot.draw,
    "shape": shape.draw,
    "growth": growth.draw,
}


def render(spec: FigureSpec) -> Path:
    """Draw the figure and write it to spec.output_path; returns the path."""
    fig = _RENDERERS[spec.kind](spec)
    checksum = input_checksum(spec.input_paths)
    out = Path(spec.output_path)
    fig.savefig(out, dpi=150, metadata={"input-checksum": checksum})
    return out
