"""Explicit first-order Godunov integration on (0, L) with weak boundary data.

Boundary conditions are realized through ghost-cell exact-Riemann fluxes, the
standard discrete form of the admissible-trace boundary sets for convex flux.
The scheme is monotone under the CFL bound, which the comparison and entropy
diagnostics rely on.  The closed loop is discretized explicitly: the datum for
a step is computed from the state at the step's start.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import stability
from .controller import ControllerParams, observation_weights, saturate
from .errors import (
    InvalidRegime,
    MeshMismatch,
    NonFinite,
    OutOfRange,
    ParameterRegimeWarning,
    ZeroWaveSpeed,
)
from .flux import FluxModel, godunov_flux
from .states import GridState

_TIME_EPS = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Run-length, CFL number, output cadence, and diagnostic switches.

    ``max_speed_override`` fixes the CFL speed (hence the step size), which
    makes two runs share identical time grids for cellwise comparisons; it must
    dominate the true maximum speed or monotonicity is lost.
    ``entropy_ks`` enables per-step tracking of the worst Kruzkov cell entropy
    residual for each listed reference state.
    """

    t_end: float
    cfl: float = 0.5
    snapshot_every: float | None = None
    max_speed_override: float | None = None
    entropy_ks: tuple[float, ...] = ()

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.snapshot_every is not None and self.snapshot_every <= 0.0:
            raise ValueError("snapshot_every must be positive")

    @property
    def snapshot_interval(self) -> float:
        return self.t_end / 50.0 if self.snapshot_every is None else self.snapshot_every


@dataclass
class Trajectory:
    """Snapshots plus per-step traces of the boundary data and controller."""

    snapshots: list[GridState]
    times: np.ndarray
    left_data: np.ndarray
    right_data: np.ndarray
    first_cell: np.ndarray
    last_cell: np.ndarray
    observations: np.ndarray | None = None
    controls: np.ndarray | None = None
    max_cfl: float = 0.0
    entropy_residual_max: dict[float, float] = field(default_factory=dict)

    @property
    def snapshot_times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    @property
    def final(self) -> GridState:
        return self.snapshots[-1]


def l1_distance(a: GridState, b: GridState) -> float:
    """dx * sum |a_i - b_i|; the norm the decay estimate is stated in."""
    if a.n_cells != b.n_cells or abs(a.L - b.L) > _TIME_EPS:
        raise MeshMismatch("grid states live on different meshes")
    return float(a.dx * np.abs(a.values - b.values).sum())


def kruzkov_entropy_flux(flux: FluxModel, a, b, k: float):
    """Numerical entropy flux for |u - k| paired with the Godunov flux."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return godunov_flux(flux, np.maximum(a, k), np.maximum(b, k)) - godunov_flux(
        flux, np.minimum(a, k), np.minimum(b, k)
    )


def _entropy_flux_from_interface(fa, fb, fk: float, k: float):
    """Same entropy flux, reusing the already-evaluated branch fluxes.

    fa = f(max(a,0)) and fb = f(min(b,0)) are the two Godunov branch values;
    the reduction is valid because f >= 0 with its minimum at 0.
    """
    if k > 0.0:
        return np.maximum(fa, fk) - np.maximum(np.minimum(fa, fk), fb)
    if k < 0.0:
        return np.maximum(fa, np.minimum(fb, fk)) - np.maximum(fb, fk)
    return fa - fb


def _check_datum(value: float, lo: float, hi: float, side: str) -> float:
    if not lo <= value <= hi:
        raise OutOfRange(f"{side} datum {value} outside working interval [{lo}, {hi}]")
    return value


def step(state: GridState, left_datum: float, right_datum: float,
         flux: FluxModel, cfl: float = 0.5) -> GridState:
    """One conservative update with ghost-cell Riemann fluxes at both ends."""
    lo, hi = flux.working_interval
    _check_datum(left_datum, lo, hi, "left")
    _check_datum(right_datum, lo, hi, "right")
    u_ext = np.concatenate(([left_datum], state.values, [right_datum]))
    smax = float(np.abs(flux.deriv(u_ext)).max())
    if smax <= 0.0:
        raise ZeroWaveSpeed("all wave speeds vanish; no CFL step defined")
    dt = cfl * state.dx / smax
    fluxes = godunov_flux(flux, u_ext[:-1], u_ext[1:])
    new = state.values - (dt / state.dx) * np.diff(fluxes)
    if not np.all(np.isfinite(new)):
        raise NonFinite(f"non-finite cell average at t = {state.time}")
    return GridState(state.L, new, state.time + dt)


def _stop_times(config: SolverConfig) -> np.ndarray:
    se = config.snapshot_interval
    n_full = int(np.floor(config.t_end / se + _TIME_EPS))
    stops = [se * k for k in range(1, n_full + 1)]
    if not stops or stops[-1] < config.t_end - _TIME_EPS:
        stops.append(config.t_end)
    else:
        stops[-1] = config.t_end
    return np.asarray(stops)


def _march(u0: GridState, flux: FluxModel, config: SolverConfig,
           left_fn: Callable[[float], float] | None,
           right_fn: Callable[[float], float] | None,
           controller: ControllerParams | None) -> Trajectory:
    n = u0.n_cells
    dx = u0.dx
    lam_lo, lam_hi = flux.working_interval
    feval = flux.eval
    fderiv = flux.deriv
    cfl = config.cfl
    override = config.max_speed_override
    ks = tuple(config.entropy_ks)
    fk_vals = {k: float(feval(np.float64(k))) for k in ks}
    res_max = {k: -np.inf for k in ks}
    closed = controller is not None

    if closed:
        w = observation_weights(controller, u0.L, n)
        nz = np.nonzero(w)[0]
        i0, i1 = int(nz[0]), int(nz[-1]) + 1
        w_nz = w[i0:i1].copy()
        obs_offset = controller.delta * (controller.u_l + controller.u_r)
        inv_two_delta = 1.0 / (2.0 * controller.delta)
        eps, nu, u_l_val = controller.eps, controller.nu, controller.u_l
        right_const = controller.u_r

    u = u0.values.copy()
    t = 0.0
    stops = _stop_times(config)
    stop_idx = 0
    snapshots = [u0.copy(time=0.0)]
    # per-step traces in a preallocated buffer: columns
    # t, left datum, right datum, first cell, last cell, observation, control
    cap = 4096
    trace = np.empty((cap, 7))
    n_steps = 0
    u_ext = np.empty(n + 2)
    max_cfl = 0.0

    while stop_idx < len(stops):
        next_stop = stops[stop_idx]
        if closed:
            obs = (float(np.dot(w_nz, u[i0:i1])) - obs_offset) * inv_two_delta
            if obs <= -nu:
                ctl = -eps
            elif obs >= nu:
                ctl = eps
            else:
                ctl = eps * obs / nu
            dl = u_l_val - ctl
            dr = right_const
        else:
            obs = ctl = 0.0
            dl = _check_datum(float(left_fn(t)), lam_lo, lam_hi, "left")
            dr = _check_datum(float(right_fn(t)), lam_lo, lam_hi, "right")

        u_ext[0] = dl
        u_ext[1:-1] = u
        u_ext[-1] = dr

        if override is not None:
            smax = override
        else:
            speeds = np.abs(fderiv(u_ext))
            smax = float(speeds.max())
        if smax <= 0.0:
            dt = next_stop - t
            hit = True
        else:
            dt = cfl * dx / smax
            hit = t + dt >= next_stop - _TIME_EPS
            if hit:
                dt = next_stop - t
            frac = dt * smax / dx
            if frac > max_cfl:
                max_cfl = frac

        fa = feval(np.maximum(u_ext[:-1], 0.0))
        fb = feval(np.minimum(u_ext[1:], 0.0))
        interface = np.maximum(fa, fb)
        lam = dt / dx
        unew = u - lam * (interface[1:] - interface[:-1])
        # a finite sum certifies every cell is finite at these magnitudes
        if not math.isfinite(float(unew.sum())):
            raise NonFinite(f"non-finite cell average at t = {t}")

        for k in ks:
            q = _entropy_flux_from_interface(fa, fb, fk_vals[k], k)
            res = np.abs(unew - k) - np.abs(u - k) + lam * (q[1:] - q[:-1])
            worst = float(res.max())
            if worst > res_max[k]:
                res_max[k] = worst

        if n_steps == cap:
            cap *= 2
            grown = np.empty((cap, 7))
            grown[:n_steps] = trace
            trace = grown
        row = trace[n_steps]
        row[0] = t
        row[1] = dl
        row[2] = dr
        row[3] = u[0]
        row[4] = u[-1]
        row[5] = obs
        row[6] = ctl
        n_steps += 1

        u = unew
        t = next_stop if hit else t + dt
        if hit:
            snapshots.append(GridState(u0.L, u.copy(), t))
            stop_idx += 1

    trace = trace[:n_steps]
    return Trajectory(
        snapshots=snapshots,
        times=trace[:, 0].copy(),
        left_data=trace[:, 1].copy(),
        right_data=trace[:, 2].copy(),
        first_cell=trace[:, 3].copy(),
        last_cell=trace[:, 4].copy(),
        observations=trace[:, 5].copy() if closed else None,
        controls=trace[:, 6].copy() if closed else None,
        max_cfl=max_cfl,
        entropy_residual_max=dict(res_max),
    )


def _as_datum_fn(spec) -> Callable[[float], float]:
    if callable(spec):
        return spec
    value = float(spec)
    return lambda t: value


def run_open_loop(u0: GridState, left_datum, right_datum,
                  flux: FluxModel, config: SolverConfig) -> Trajectory:
    """Integrate with prescribed boundary data (numbers or functions of t)."""
    return _march(u0, flux, config, _as_datum_fn(left_datum), _as_datum_fn(right_datum), None)


def run_closed_loop(u0: GridState, controller: ControllerParams,
                    flux: FluxModel, config: SolverConfig) -> Trajectory:
    """Integrate the feedback loop: left datum from the controller each step.

    Parameter validation is advisory here: exploration outside the certified
    regime is allowed and only warns.
    """
    try:
        consts = stability.compute_constants(
            flux, u0.L, controller.alpha, controller.delta,
            controller.eps, controller.nu, controller.m,
        )
        report = stability.validate_parameters(flux, consts)
        if not report.all_passed:
            failed = [c.name for c in report.checks if not c.passed]
            warnings.warn(
                f"controller parameters outside certified regime: {failed}",
                ParameterRegimeWarning,
                stacklevel=2,
            )
    except InvalidRegime as exc:
        warnings.warn(
            f"stability constants undefined for these parameters: {exc}",
            ParameterRegimeWarning,
            stacklevel=2,
        )
    return _march(u0, flux, config, None, None, controller)
