"""Closed-loop boundary stabilization of stationary shocks for scalar
conservation laws with uniformly convex flux: Godunov simulator, front-tracking
oracle, explicit stability constants, and a delayed-ODE contraction verifier.
"""

from .controller import ControllerParams, left_boundary_value, make_controller, observe, saturate
from .delay_ode import DelaySystem, contraction_constant, verify_decay
from .flux import FluxModel, flux_for_level, godunov_flux, make_flux, rankine_hugoniot_speed, shock_state_pair
from .oracle import FrontSolution, evolve, riemann_solution
from .solver import SolverConfig, Trajectory, l1_distance, run_closed_loop, run_open_loop, step
from .stability import (
    StabilityConstants,
    classify_zones,
    compute_constants,
    delay_series,
    fit_decay,
    locate_shock,
    validate_parameters,
)
from .states import GridState, PerturbationSpec, perturbed_shock, shifted_shock, stationary_shock

__version__ = "0.1.0"

__all__ = [
    "ControllerParams", "DelaySystem", "FluxModel", "FrontSolution", "GridState",
    "PerturbationSpec", "SolverConfig", "StabilityConstants", "Trajectory",
    "classify_zones", "compute_constants", "contraction_constant", "delay_series",
    "evolve", "fit_decay", "flux_for_level", "godunov_flux", "l1_distance",
    "left_boundary_value", "locate_shock", "make_controller", "make_flux",
    "observe", "perturbed_shock", "rankine_hugoniot_speed", "riemann_solution",
    "run_closed_loop", "run_open_loop", "saturate", "shifted_shock",
    "shock_state_pair", "stationary_shock", "step", "validate_parameters",
    "verify_decay",
]
