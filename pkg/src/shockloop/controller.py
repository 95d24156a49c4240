"""Boundary feedback law: saturated gain on the windowed deviation from the target.

The observation averages u - (target shock) over [alpha-delta, alpha+delta]; the
gain is odd, piecewise linear with slope eps/nu and clipped at +-eps; the left
boundary datum is u_l(m) minus the gain output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MeshTooCoarse, StateError
from .flux import FluxModel, shock_state_pair
from .piecewise import overlap_lengths
from .states import GridState


@dataclass(frozen=True)
class ControllerParams:
    """Feedback parameters with the shock states cached. Stateless to apply."""

    alpha: float
    delta: float
    eps: float
    nu: float
    m: float
    u_l: float
    u_r: float


def make_controller(flux: FluxModel, L: float, alpha: float, delta: float,
                    eps: float, nu: float, m: float) -> ControllerParams:
    if min(delta, eps, nu) <= 0:
        raise StateError("delta, eps, nu must all be positive")
    if not (0.0 < alpha - delta and alpha + delta < L):
        raise StateError(
            f"observation window [alpha-delta, alpha+delta] = "
            f"[{alpha - delta}, {alpha + delta}] not contained in (0, {L})"
        )
    u_l, u_r = shock_state_pair(flux, m)
    return ControllerParams(alpha, delta, eps, nu, m, u_l, u_r)


def saturate(params: ControllerParams, z: float) -> float:
    """Odd, continuous, nondecreasing gain clipped at +-eps with slope eps/nu."""
    if z <= -params.nu:
        return -params.eps
    if z >= params.nu:
        return params.eps
    return params.eps * z / params.nu


def observation_weights(params: ControllerParams, L: float, n_cells: int) -> np.ndarray:
    """Per-cell overlap lengths with the observation window (exact quadrature)."""
    edges = np.linspace(0.0, L, n_cells + 1)
    w = overlap_lengths(edges, params.alpha - params.delta, params.alpha + params.delta)
    if np.count_nonzero(w) < 4:
        raise MeshTooCoarse(
            f"observation window covers only {np.count_nonzero(w)} cells; need >= 4"
        )
    return w


def observe(params: ControllerParams, state: GridState) -> float:
    """Windowed average deviation from the target shock.

    Exact for piecewise-constant states: partial cells are length-weighted and
    the target's window integral delta*(u_l+u_r) is analytic.
    """
    w = observation_weights(params, state.L, state.n_cells)
    target_integral = params.delta * (params.u_l + params.u_r)
    return (float(np.dot(w, state.values)) - target_integral) / (2.0 * params.delta)


def left_boundary_value(params: ControllerParams, state: GridState) -> float:
    """Feedback datum for the left boundary; always within eps of u_l(m)."""
    return params.u_l - saturate(params, observe(params, state))
