"""Run orchestration: build the experiment a config describes, execute it, and
emit a deterministic artifact tree.

Every run directory starts with ``config.snapshot``, the canonical echo of the
resolved configuration, which is sufficient to reproduce the run.  Wall-clock
measurements are returned in memory but never written, so artifact bytes
depend only on the inputs.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import delay_ode, stability
from .config import RunConfig, config_to_text
from .controller import make_controller, observe
from .errors import InvalidRegime, NoShock, ShockloopError
from .flux import FluxModel, flux_for_level, make_flux, shock_state_pair
from .oracle import FrontSolution
from .piecewise import average_on_cells
from .serialize import fmt, snapshot_filename, write_columns_csv, write_csv, write_kv, write_state_csv
from .solver import SolverConfig, Trajectory, l1_distance, run_closed_loop, run_open_loop
from .states import GridState, PerturbationSpec, perturbed_shock, shifted_shock, stationary_shock

ENV_SEED = "SHOCKLOOP_SEED"


@dataclass
class RunResult:
    outdir: Path
    summary: dict
    trajectory: Trajectory | None = None
    constants: stability.StabilityConstants | None = None
    elapsed_seconds: float = 0.0


def _env_seed() -> int | None:
    raw = os.environ.get(ENV_SEED)
    return int(raw) if raw else None


def _build_pde_flux(cfg: RunConfig) -> FluxModel:
    return flux_for_level(cfg.flux, cfg.m, cfg.flux_param)


def _build_u0(cfg: RunConfig, flux: FluxModel) -> GridState:
    if cfg.u0 == "stationary-shock":
        return stationary_shock(cfg.L, cfg.n_cells, cfg.alpha if cfg.alpha else cfg.L / 2.0,
                                cfg.m, flux)
    if cfg.u0 == "shifted-shock":
        return shifted_shock(cfg.L, cfg.n_cells, cfg.beta, cfg.m, flux)
    seed = cfg.seed
    if seed is not None and _env_seed() is not None:
        seed = _env_seed()
    base = stationary_shock(cfg.L, cfg.n_cells, cfg.alpha if cfg.alpha else cfg.L / 2.0,
                            cfg.m, flux)
    spec = PerturbationSpec(cfg.amplitude, wavenumber=cfg.wavenumber, seed=seed)
    return perturbed_shock(base, spec, flux)


def _resolve_level(token, u_l: float, u_r: float) -> float:
    if token == "ul":
        return u_l
    if token == "ur":
        return u_r
    return float(token)


def run(config: RunConfig, outdir, jobs: int = 1) -> RunResult:
    """Execute one configured experiment into its own directory."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "config.snapshot").write_text(config_to_text(config), encoding="utf-8", newline="\n")
    if config.mode == "closed-loop":
        return _run_closed(config, outdir)
    if config.mode == "open-loop":
        return _run_open(config, outdir)
    if config.mode == "convergence-study":
        return _run_convergence(config, outdir)
    if config.mode == "delay-ode-verify":
        return _run_dde(config, outdir)
    if config.mode == "sweep":
        return _run_sweep(config, outdir, jobs)
    raise ShockloopError(f"unhandled mode {config.mode!r}")


# -- closed loop ---------------------------------------------------------------


def _write_snapshots(outdir: Path, trajectory: Trajectory) -> None:
    snapdir = outdir / "snapshots"
    snapdir.mkdir(exist_ok=True)
    for snap in trajectory.snapshots:
        write_state_csv(snapdir / snapshot_filename(snap.time), snap)


def _run_closed(cfg: RunConfig, outdir: Path) -> RunResult:
    flux = _build_pde_flux(cfg)
    u_l, u_r = shock_state_pair(flux, cfg.m)
    controller = make_controller(flux, cfg.L, cfg.alpha, cfg.delta, cfg.eps, cfg.nu, cfg.m)
    u0 = _build_u0(cfg, flux)
    entropy_ks = tuple(_resolve_level(tok, u_l, u_r) for tok in cfg.entropy_levels)
    solver_cfg = SolverConfig(
        t_end=cfg.t_end, cfl=cfg.cfl, snapshot_every=cfg.snapshot_interval,
        entropy_ks=entropy_ks,
    )
    start = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        trajectory = run_closed_loop(u0, controller, flux, solver_cfg)
    elapsed = time.perf_counter() - start

    constants = None
    report = None
    try:
        constants = stability.compute_constants(
            flux, cfg.L, cfg.alpha, cfg.delta, cfg.eps, cfg.nu, cfg.m)
        report = stability.validate_parameters(flux, constants)
    except InvalidRegime as exc:
        invalid_reason = str(exc)

    target = stationary_shock(cfg.L, cfg.n_cells, cfg.alpha, cfg.m, flux)
    ts = trajectory.snapshot_times
    l1_errors = np.array([l1_distance(s, target) for s in trajectory.snapshots])
    betas = np.empty(ts.size)
    taus = np.empty(ts.size)
    obs = np.empty(ts.size)
    for i, snap in enumerate(trajectory.snapshots):
        try:
            betas[i] = stability.locate_shock(snap, cfg.m, flux)
        except NoShock:
            betas[i] = math.nan
        obs[i] = observe(controller, snap)
        idx = min(int((cfg.alpha - cfg.delta) / snap.dx), snap.n_cells - 1)
        speed = float(flux.deriv(np.float64(snap.values[idx])))
        taus[i] = (cfg.alpha - cfg.delta) / speed if speed > 0 else math.nan

    c_fit = m_fit = math.nan
    if constants is not None and cfg.t_end > constants.t4:
        try:
            c_fit, m_fit = stability.fit_decay(ts, l1_errors, (constants.t4, cfg.t_end))
        except stability.WindowEmpty:
            pass

    beta_final = betas[-1]
    summary = {
        "mode": cfg.mode,
        "final_l1_error": float(l1_errors[-1]),
        "c_fit": c_fit,
        "m_fit": m_fit,
        "beta_final": beta_final,
        "alpha": cfg.alpha,
        "converged": bool(not math.isnan(beta_final) and abs(beta_final - cfg.alpha) < 0.01),
        "n_steps": int(trajectory.times.size),
        "max_cfl": trajectory.max_cfl,
    }
    for k, res in sorted(trajectory.entropy_residual_max.items()):
        summary[f"entropy_residual_max_k_{fmt(k)}"] = res
    if report is not None:
        summary.update(report.as_dict())
    else:
        summary["validation_passed"] = False
        summary["validation_error"] = invalid_reason

    _write_snapshots(outdir, trajectory)
    write_columns_csv(
        outdir / "controller.csv", ["t", "O", "A", "u_left_datum"],
        [trajectory.times, trajectory.observations, trajectory.controls, trajectory.left_data],
    )
    write_csv(outdir / "series.csv", ["t", "beta", "O", "tau", "l1_error"],
              zip(ts, betas, obs, taus, l1_errors))
    stab = {}
    if constants is not None:
        for name in ("t1", "t2", "t3", "t4", "theta", "a_me", "c_bar", "c_tilde",
                     "d_bar", "d_tilde", "c1", "c2", "m_med", "nu0", "u_l", "u_r"):
            stab[name] = getattr(constants, name)
        stab.update(report.as_dict())
    else:
        stab["constants_defined"] = False
        stab["reason"] = invalid_reason
    write_kv(outdir / "stability_report.txt", stab)
    write_kv(outdir / "summary.txt", summary)
    return RunResult(outdir, summary, trajectory, constants, elapsed)


# -- open loop -----------------------------------------------------------------


def _run_open(cfg: RunConfig, outdir: Path) -> RunResult:
    flux = _build_pde_flux(cfg)
    u_l, u_r = shock_state_pair(flux, cfg.m)
    left = _resolve_level(cfg.left_datum, u_l, u_r)
    right = _resolve_level(cfg.right_datum, u_l, u_r)
    u0 = _build_u0(cfg, flux)
    solver_cfg = SolverConfig(t_end=cfg.t_end, cfl=cfg.cfl, snapshot_every=cfg.snapshot_interval)
    start = time.perf_counter()
    trajectory = run_open_loop(u0, left, right, flux, solver_cfg)
    elapsed = time.perf_counter() - start

    try:
        beta_final = stability.locate_shock(trajectory.final, cfg.m, flux)
    except NoShock:
        beta_final = math.nan
    summary = {
        "mode": cfg.mode,
        "left_datum": left,
        "right_datum": right,
        "beta_final": beta_final,
        "final_mass": float(trajectory.final.values.sum() * trajectory.final.dx),
        "n_steps": int(trajectory.times.size),
        "max_cfl": trajectory.max_cfl,
    }
    _write_snapshots(outdir, trajectory)
    write_columns_csv(
        outdir / "boundary.csv",
        ["t", "left_datum", "right_datum", "first_cell", "last_cell"],
        [trajectory.times, trajectory.left_data, trajectory.right_data,
         trajectory.first_cell, trajectory.last_cell],
    )
    write_kv(outdir / "summary.txt", summary)
    return RunResult(outdir, summary, trajectory, None, elapsed)


# -- convergence study -----------------------------------------------------------


def _run_convergence(cfg: RunConfig, outdir: Path) -> RunResult:
    spread = max(abs(v) for pair in cfg.riemann_pairs for v in pair)
    flux = make_flux(cfg.flux, cfg.flux_param, half_width=3.0 * max(spread, 1.0))
    x0 = cfg.jump_position
    rows = []
    summary = {"mode": cfg.mode}
    start = time.perf_counter()
    max_speed = float(np.max(np.abs(flux.deriv(np.array([-spread, spread])))))
    if max_speed * cfg.t_compare >= min(x0, cfg.L - x0):
        warnings.warn("comparison window is not causally shielded from the boundaries")
    for pi, (a, b) in enumerate(cfg.riemann_pairs):
        exact = FrontSolution(flux, [x0], [a, b], t_max=cfg.t_compare, eta=cfg.eta)
        dxs, errs = [], []
        for n in cfg.mesh_list:
            edges = np.linspace(0.0, cfg.L, n + 1)
            u0 = GridState(cfg.L, average_on_cells(edges, [x0], [a, b]))
            traj = run_open_loop(
                u0, a, b, flux,
                SolverConfig(t_end=cfg.t_compare, cfl=cfg.cfl, snapshot_every=cfg.t_compare),
            )
            diff = traj.final.values - exact.cell_averages(cfg.t_compare, edges)
            err = float(np.abs(diff).sum() * cfg.L / n)
            dxs.append(cfg.L / n)
            errs.append(err)
            rows.append((pi, a, b, n, cfg.L / n, err))
        order = float(-np.polyfit(np.log(cfg.mesh_list), np.log(np.maximum(errs, 1e-300)), 1)[0]) \
            if len(cfg.mesh_list) > 1 else math.nan
        summary[f"order_pair_{pi}"] = order
        summary[f"error_finest_pair_{pi}"] = errs[-1]
        summary[f"monotone_pair_{pi}"] = bool(np.all(np.diff(errs) < 0))
    elapsed = time.perf_counter() - start
    write_csv(outdir / "convergence.csv",
              ["pair", "left_state", "right_state", "n_cells", "dx", "l1_error"], rows)
    write_kv(outdir / "summary.txt", summary)
    return RunResult(outdir, summary, None, None, elapsed)


# -- delayed-ODE verification ------------------------------------------------------


def _run_dde(cfg: RunConfig, outdir: Path) -> RunResult:
    rng = np.random.default_rng(cfg.dde_seed)
    rows = []
    worst_ratio = 0.0
    worst_env = -math.inf
    all_ok = True
    start = time.perf_counter()
    for i in range(cfg.n_systems):
        system = delay_ode.random_system(rng)
        system.validate()
        dt = system.tau_m / cfg.dt_divisor
        t_end = 3.0 * system.tau_M * (cfg.horizon_windows + 1)
        ts, theta = delay_ode.simulate(system, t_end, dt)
        rep = delay_ode.verify_decay((ts, theta), system, t_start=0.0)
        k = delay_ode.contraction_constant(system)
        if i == 0:
            write_columns_csv(outdir / "trajectory.csv", ["t", "theta"], [ts, theta])
        rows.append((
            i, system.tau_m, system.tau_M, system.c, system.eps_g, k,
            rep.b_nonincreasing, rep.contraction_holds, rep.envelope_holds,
            rep.worst_window_ratio, rep.worst_envelope_excess,
        ))
        worst_ratio = max(worst_ratio, rep.worst_window_ratio)
        worst_env = max(worst_env, rep.worst_envelope_excess)
        all_ok = all_ok and rep.all_passed
    elapsed = time.perf_counter() - start
    write_csv(
        outdir / "dde_systems.csv",
        ["index", "tau_m", "tau_M", "c", "eps_g", "K",
         "b_nonincreasing", "contraction_holds", "envelope_holds",
         "worst_window_ratio", "worst_envelope_excess"],
        rows,
    )
    summary = {
        "mode": cfg.mode,
        "n_systems": cfg.n_systems,
        "all_checks_passed": all_ok,
        "worst_window_ratio": worst_ratio,
        "worst_envelope_excess": worst_env,
    }
    write_kv(outdir / "summary.txt", summary)
    return RunResult(outdir, summary, None, None, elapsed)


# -- sweep ------------------------------------------------------------------------


def _sweep_combo_config(cfg: RunConfig, eps: float, nu: float, seed) -> RunConfig:
    sub = replace(cfg, mode="closed-loop", eps=eps, nu=nu,
                  sweep_eps=(), sweep_nu=(), sweep_seeds=())
    if seed is not None:
        sub = replace(sub, u0="perturbed-shock", seed=seed,
                      amplitude=cfg.amplitude if cfg.amplitude else 0.1, wavenumber=None)
    return sub


def _combo_dirname(eps: float, nu: float, seed) -> str:
    name = f"eps{eps:g}_nu{nu:g}"
    return name if seed is None else f"{name}_seed{seed}"


def _sweep_worker(args):
    sub_cfg, subdir = args
    result = run(sub_cfg, subdir)
    return result.summary


def _run_sweep(cfg: RunConfig, outdir: Path, jobs: int) -> RunResult:
    seeds = list(cfg.sweep_seeds) if cfg.sweep_seeds else [None]
    env = _env_seed()
    if env is not None and cfg.sweep_seeds:
        seeds = [env]
    combos = [(e, v, s) for e in cfg.sweep_eps for v in cfg.sweep_nu for s in seeds]
    tasks = [
        (_sweep_combo_config(cfg, e, v, s), outdir / _combo_dirname(e, v, s))
        for (e, v, s) in combos
    ]
    start = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(_sweep_worker, tasks))
    else:
        summaries = [_sweep_worker(task) for task in tasks]
    elapsed = time.perf_counter() - start

    rows = []
    n_converged = 0
    for (e, v, s), summ in zip(combos, summaries):
        rows.append((
            e, v, "" if s is None else s, _combo_dirname(e, v, s),
            summ["beta_final"], summ["final_l1_error"], summ["c_fit"],
            summ["converged"], summ["validation_passed"],
        ))
        n_converged += bool(summ["converged"])
    write_csv(
        outdir / "sweep_index.csv",
        ["eps", "nu", "seed", "directory", "beta_final", "final_l1_error",
         "c_fit", "converged", "validation_passed"],
        rows,
    )
    summary = {
        "mode": cfg.mode,
        "n_runs": len(combos),
        "n_converged": n_converged,
        "all_validation_passed": all(r[-1] for r in rows),
    }
    write_kv(outdir / "summary.txt", summary)
    return RunResult(outdir, summary, None, None, elapsed)
