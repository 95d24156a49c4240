"""Exact quadrature helpers for piecewise-constant functions on a uniform mesh."""

from __future__ import annotations

import numpy as np


def average_on_cells(x_edges: np.ndarray, breakpoints, region_values) -> np.ndarray:
    """Exact cell averages of a piecewise-constant function.

    The function equals ``region_values[k]`` on (breakpoints[k-1], breakpoints[k]),
    with region 0 left of the first breakpoint.  Partial cells are length-weighted.
    """
    x_edges = np.asarray(x_edges, dtype=float)
    bps = np.asarray(breakpoints, dtype=float)
    vals = np.asarray(region_values, dtype=float)
    if vals.size != bps.size + 1:
        raise ValueError("need len(region_values) == len(breakpoints) + 1")
    n = x_edges.size - 1
    out = np.empty(n)
    for i in range(n):
        a, b = x_edges[i], x_edges[i + 1]
        cuts = np.concatenate(([a], bps[(bps > a) & (bps < b)], [b]))
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        region = np.searchsorted(bps, mids, side="right")
        out[i] = np.dot(np.diff(cuts), vals[region]) / (b - a)
    return out


def overlap_lengths(x_edges: np.ndarray, a: float, b: float) -> np.ndarray:
    """Length of the intersection of each cell [x_i, x_{i+1}] with [a, b]."""
    x_edges = np.asarray(x_edges, dtype=float)
    lo = np.maximum(x_edges[:-1], a)
    hi = np.minimum(x_edges[1:], b)
    return np.maximum(hi - lo, 0.0)
