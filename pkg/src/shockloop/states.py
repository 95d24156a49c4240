"""Cell-averaged grid states: target shocks, shifted shocks, perturbations.

Initial data are averaged exactly over each cell (never midpoint-sampled) so
that a discrete shock between the two states of one flux level is an exact
fixed point of the scheme.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadPosition, OutOfRange, StateError
from .flux import FluxModel, shock_state_pair
from .piecewise import average_on_cells


@dataclass
class GridState:
    """Cell averages of the solution on a uniform mesh of (0, L) at one time."""

    L: float
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1:
            raise StateError("values must be a 1-d array of cell averages")
        if self.n_cells < 4:
            raise StateError(f"need at least 4 cells, got {self.n_cells}")
        if self.L <= 0:
            raise StateError("domain length must be positive")
        if not np.all(np.isfinite(self.values)):
            raise StateError("cell averages must be finite")

    @property
    def n_cells(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return self.L / self.n_cells

    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n_cells + 1)

    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def copy(self, time: float | None = None) -> "GridState":
        return GridState(self.L, self.values.copy(), self.time if time is None else time)


@dataclass(frozen=True)
class PerturbationSpec:
    """Deterministic perturbation: a sine mode or seeded cellwise noise."""

    amplitude: float
    wavenumber: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise StateError("amplitude must be nonnegative")
        if self.amplitude > 0 and (self.wavenumber is None) == (self.seed is None):
            raise StateError("give exactly one of wavenumber or seed")


def stationary_shock(L: float, n_cells: int, alpha: float, m: float, flux: FluxModel) -> GridState:
    """Target profile: u_l(m) left of alpha, u_r(m) right of it, averaged per cell."""
    if not 0.0 < alpha < L:
        raise BadPosition(f"shock position {alpha} outside (0, {L})")
    u_l, u_r = shock_state_pair(flux, m)
    edges = np.linspace(0.0, L, n_cells + 1)
    return GridState(L, average_on_cells(edges, [alpha], [u_l, u_r]))


def shifted_shock(L: float, n_cells: int, beta: float, m: float, flux: FluxModel) -> GridState:
    """Same two-state profile but located at beta instead of the target position."""
    return stationary_shock(L, n_cells, beta, m, flux)


def perturbed_shock(base: GridState, spec: PerturbationSpec, flux: FluxModel) -> GridState:
    """Add a deterministic perturbation; clipping is an error, never silent."""
    if spec.amplitude == 0.0:
        return base.copy()
    n, L = base.n_cells, base.L
    if spec.wavenumber is not None:
        # exact cell average of amplitude*sin(2*pi*k*x/L)
        k = 2.0 * np.pi * spec.wavenumber / L
        edges = base.edges()
        bump = spec.amplitude * (np.cos(k * edges[:-1]) - np.cos(k * edges[1:])) / (k * base.dx)
    else:
        rng = np.random.default_rng(spec.seed)
        bump = rng.uniform(-spec.amplitude, spec.amplitude, n)
    values = base.values + bump
    lo, hi = flux.working_interval
    if values.min() < lo or values.max() > hi:
        raise OutOfRange(
            f"perturbed values [{values.min():.6g}, {values.max():.6g}] leave "
            f"working interval [{lo:.6g}, {hi:.6g}]"
        )
    return GridState(L, values, base.time)


def total_variation(state: GridState) -> float:
    """Total variation of the piecewise-constant reconstruction."""
    return float(np.abs(np.diff(state.values)).sum())
