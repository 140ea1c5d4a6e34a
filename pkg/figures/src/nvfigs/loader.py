"""Shared input loading for the figure scripts.

The loaders validate the file contracts (CSV header columns, snapshot magic)
and fail with a message naming the offending column or field; they never
write to the inputs.
"""

from __future__ import annotations

import csv
import hashlib
import struct
from pathlib import Path

import numpy as np

SNAPSHOT_MAGIC = b"NVGRID1\0"
_HEADER_STRUCT = struct.Struct("<II3d")


class ContractError(Exception):
    """An input file does not satisfy its format contract."""


def load_columns(path: str | Path, required: list[str]) -> dict[str, np.ndarray]:
    """Read a CSV file and return the required columns as float arrays.

    Non-numeric columns (e.g. the scan's `method`) may be requested too; they
    come back as object arrays of strings.
    """
    path = Path(path)
    if not path.is_file():
        raise ContractError(f"input file {path} does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ContractError(f"{path} is empty (no header row)") from None
        for col in required:
            if col not in header:
                raise ContractError(
                    f"{path} is missing required column {col!r} "
                    f"(found {', '.join(header)})")
        idx = {col: header.index(col) for col in required}
        rows = [row for row in reader if row]
    if not rows:
        raise ContractError(f"{path} has no data rows")
    out: dict[str, np.ndarray] = {}
    for col, j in idx.items():
        values = [row[j] for row in rows]
        try:
            out[col] = np.array([float(v) for v in values])
        except ValueError:
            out[col] = np.array(values, dtype=object)
    return out


def load_snapshot(path: str | Path) -> tuple[np.ndarray, float, float, float]:
    """Read a binary field snapshot; returns (samples[L, M], Wx, Wy, t)."""
    path = Path(path)
    if not path.is_file():
        raise ContractError(f"input file {path} does not exist")
    raw = path.read_bytes()
    if raw[:len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise ContractError(f"{path} does not start with the snapshot magic "
                            f"{SNAPSHOT_MAGIC!r}")
    offset = len(SNAPSHOT_MAGIC)
    try:
        L, M, Wx, Wy, t = _HEADER_STRUCT.unpack_from(raw, offset)
    except struct.error as exc:
        raise ContractError(f"{path}: truncated snapshot header") from exc
    data = np.frombuffer(raw, dtype="<f8", offset=offset + _HEADER_STRUCT.size)
    if data.size != L * M:
        raise ContractError(f"{path}: expected {L * M} samples for field "
                            f"L={L}, M={M}, found {data.size}")
    # x varies fastest in the file
    samples = data.reshape((M, L)).T
    return samples, Wx, Wy, t


def input_checksum(paths: list[str | Path]) -> str:
    """sha256 over the concatenated input files, comma-joined per file."""
    digests = []
    for path in paths:
        h = hashlib.sha256()
        h.update(Path(path).read_bytes())
        digests.append(h.hexdigest())
    return ",".join(digests)
