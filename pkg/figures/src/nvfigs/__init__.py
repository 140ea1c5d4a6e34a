"""Figure scripts: read-only renderers for nvlab's CSV/JSON/snapshot outputs.

One module per figure kind, a shared loader, and a `figure` command-line
entry point. These scripts never recompute physics: they draw exactly the
numbers found in the input files and embed a checksum of those files in the
image metadata.
"""

from .loader import ContractError, input_checksum, load_columns, load_snapshot
from .spec import FIGURE_KINDS, FigureSpec
from .render import render

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "FIGURE_KINDS",
    "FigureSpec",
    "input_checksum",
    "load_columns",
    "load_snapshot",
    "render",
]
