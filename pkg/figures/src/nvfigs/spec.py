"""The figure request: input paths, kind, axis ranges, output path."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

FIGURE_KINDS = (
    "speed-profile",   # polar speed profile from speed_profile.csv
    "det-surface",     # determinant magnitude over (k, gamma) from scan.csv
    "curve",           # traced zero curve from trace.csv
    "snapshot",        # field heat map from a binary snapshot
    "shape",           # perturbation profile (f, g, h_imag) from shape.csv
    "growth",          # log deviation versus time from deviation.csv
)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_path: str
    output_path: str
    input2_path: Optional[str] = None      # kind-dependent companion input
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {', '.join(FIGURE_KINDS)}")

    @property
    def input_paths(self) -> list[str]:
        return [self.input_path] + ([self.input2_path] if self.input2_path else [])
