"""Deterministic artifact formatting: fixed 17-significant-digit floats,
LF newlines, and stable key order, so identical inputs give identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .states import GridState


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_kv(path: Path, mapping: dict) -> None:
    lines = [f"{key} = {fmt(val)}\n" for key, val in mapping.items()]
    Path(path).write_text("".join(lines), encoding="utf-8", newline="\n")


def write_csv(path: Path, header: list[str], rows) -> None:
    out = [",".join(header) + "\n"]
    for row in rows:
        out.append(",".join(fmt(v) for v in row) + "\n")
    Path(path).write_text("".join(out), encoding="utf-8", newline="\n")


def write_columns_csv(path: Path, header: list[str], columns) -> None:
    """Column-wise variant for long per-step traces."""
    cols = [np.asarray(c) for c in columns]
    out = [",".join(header) + "\n"]
    for i in range(cols[0].size):
        out.append(",".join(fmt(c[i]) for c in cols) + "\n")
    Path(path).write_text("".join(out), encoding="utf-8", newline="\n")


def write_state_csv(path: Path, state: GridState) -> None:
    write_csv(path, ["x", "u"], zip(state.centers(), state.values))


def snapshot_filename(t: float) -> str:
    return f"snap_t{t:012.6f}.csv"
