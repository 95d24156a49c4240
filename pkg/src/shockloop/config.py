"""Flat INI-style run configuration: `key = value` lines, `#` comments.

Parsing is strict: duplicate, unknown, or malformed keys are errors, and all
problems in a file are reported together, not just the first.  Semantic
validation re-checks the preconditions of the modules a run will touch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ParseError, ValidationError

MODES = ("closed-loop", "open-loop", "convergence-study", "delay-ode-verify", "sweep")
U0_KINDS = ("stationary-shock", "shifted-shock", "perturbed-shock")
FLUX_NAMES = ("burgers", "cosh")
DATUM_TOKENS = ("ul", "ur")


def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    if "." in s:
        raise ValueError(f"expected integer, got {s!r}")
    return int(s)


def _choice(options):
    def coerce(s: str):
        if s not in options:
            raise ValueError(f"expected one of {options}, got {s!r}")
        return s
    return coerce


def _datum(s: str):
    if s in DATUM_TOKENS:
        return s
    return float(s)


def _float_list(s: str):
    return tuple(float(tok.strip()) for tok in s.split(",") if tok.strip())


def _int_list(s: str):
    return tuple(_int(tok.strip()) for tok in s.split(",") if tok.strip())


def _level_list(s: str):
    out = []
    for tok in s.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(tok if tok in DATUM_TOKENS else float(tok))
    return tuple(out)


def _pair_list(s: str):
    pairs = []
    for tok in s.split(","):
        tok = tok.strip()
        if not tok:
            continue
        left, sep, right = tok.partition(":")
        if not sep:
            raise ValueError(f"expected a:b pair, got {tok!r}")
        pairs.append((float(left), float(right)))
    return tuple(pairs)


_SCHEMA = {
    "mode": _choice(MODES),
    "flux": _choice(FLUX_NAMES),
    "flux_param": _float,
    "L": _float,
    "n_cells": _int,
    "cfl": _float,
    "t_end": _float,
    "snapshot_every": _float,
    "m": _float,
    "alpha": _float,
    "delta": _float,
    "eps": _float,
    "nu": _float,
    "u0": _choice(U0_KINDS),
    "beta": _float,
    "amplitude": _float,
    "wavenumber": _int,
    "seed": _int,
    "entropy_levels": _level_list,
    "left_datum": _datum,
    "right_datum": _datum,
    "riemann_pairs": _pair_list,
    "mesh_list": _int_list,
    "t_compare": _float,
    "x_jump": _float,
    "eta": _float,
    "n_systems": _int,
    "dde_seed": _int,
    "dt_divisor": _int,
    "horizon_windows": _int,
    "sweep_eps": _float_list,
    "sweep_nu": _float_list,
    "sweep_seeds": _int_list,
}

_PDE_KEYS = {"flux", "flux_param", "L", "n_cells", "cfl", "t_end", "snapshot_every", "m",
             "u0", "beta", "amplitude", "wavenumber", "seed"}
_MODE_KEYS = {
    "closed-loop": _PDE_KEYS | {"alpha", "delta", "eps", "nu", "entropy_levels"},
    "open-loop": _PDE_KEYS | {"left_datum", "right_datum"},
    "convergence-study": {"flux", "flux_param", "L", "cfl", "t_compare", "x_jump",
                          "riemann_pairs", "mesh_list", "eta"},
    "delay-ode-verify": {"n_systems", "dde_seed", "dt_divisor", "horizon_windows"},
    "sweep": _PDE_KEYS | {"alpha", "delta", "sweep_eps", "sweep_nu", "sweep_seeds"},
}
_MODE_REQUIRED = {
    "closed-loop": {"L", "n_cells", "t_end", "m", "alpha", "delta", "eps", "nu"},
    "open-loop": {"L", "n_cells", "t_end", "m", "left_datum", "right_datum"},
    "convergence-study": {"L", "t_compare", "riemann_pairs", "mesh_list"},
    "delay-ode-verify": {"n_systems"},
    "sweep": {"L", "n_cells", "t_end", "m", "alpha", "delta", "sweep_eps", "sweep_nu"},
}


@dataclass
class RunConfig:
    """One experiment description; fields are None when not applicable."""

    mode: str
    flux: str = "burgers"
    flux_param: float = 1.0
    L: float | None = None
    n_cells: int | None = None
    cfl: float = 0.5
    t_end: float | None = None
    snapshot_every: float | None = None
    m: float | None = None
    alpha: float | None = None
    delta: float | None = None
    eps: float | None = None
    nu: float | None = None
    u0: str = "stationary-shock"
    beta: float | None = None
    amplitude: float | None = None
    wavenumber: int | None = None
    seed: int | None = None
    entropy_levels: tuple = ()
    left_datum: object = None
    right_datum: object = None
    riemann_pairs: tuple = ()
    mesh_list: tuple = ()
    t_compare: float | None = None
    x_jump: float | None = None
    eta: float | None = None
    n_systems: int | None = None
    dde_seed: int = 0
    dt_divisor: int = 100
    horizon_windows: int = 4
    sweep_eps: tuple = ()
    sweep_nu: tuple = ()
    sweep_seeds: tuple = ()

    @property
    def snapshot_interval(self) -> float:
        if self.snapshot_every is not None:
            return self.snapshot_every
        return self.t_end / 50.0

    @property
    def jump_position(self) -> float:
        return self.L / 2.0 if self.x_jump is None else self.x_jump


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises with the complete problem list on failure."""
    problems = []
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        if key in entries:
            problems.append(f"line {lineno}: duplicate key {key!r}")
            continue
        if key not in _SCHEMA:
            problems.append(f"line {lineno}: unknown key {key!r}")
            continue
        entries[key] = (val, lineno)

    values = {}
    for key, (val, lineno) in entries.items():
        try:
            values[key] = _SCHEMA[key](val)
        except ValueError as exc:
            problems.append(f"line {lineno}: key {key!r}: {exc}")
    if problems:
        raise ParseError(problems)
    if "mode" not in values:
        raise ValidationError(["missing required key 'mode'"])

    cfg = RunConfig(**values)
    issues = validate(cfg, set(values))
    if issues:
        raise ValidationError(issues)
    return cfg


def validate(cfg: RunConfig, given: set[str]) -> list[str]:
    """Semantic validation, re-checking module preconditions at parse time."""
    issues = []
    allowed = _MODE_KEYS[cfg.mode] | {"mode"}
    for key in sorted(given - allowed):
        issues.append(f"key {key!r} not applicable in mode {cfg.mode!r}")
    for key in sorted(_MODE_REQUIRED[cfg.mode] - given):
        issues.append(f"mode {cfg.mode!r} requires key {key!r}")
    if issues:
        return issues

    def positive(name):
        val = getattr(cfg, name)
        if val is not None and val <= 0:
            issues.append(f"{name} must be positive, got {val}")

    for name in ("L", "t_end", "m", "delta", "eps", "nu", "snapshot_every",
                 "flux_param", "t_compare", "eta", "amplitude"):
        if name == "amplitude":
            if cfg.amplitude is not None and cfg.amplitude < 0:
                issues.append(f"amplitude must be nonnegative, got {cfg.amplitude}")
        else:
            positive(name)
    if not 0.0 < cfg.cfl <= 1.0:
        issues.append(f"cfl must be in (0, 1], got {cfg.cfl}")
    if cfg.n_cells is not None and cfg.n_cells < 4:
        issues.append(f"n_cells must be at least 4, got {cfg.n_cells}")

    if cfg.mode in ("closed-loop", "sweep"):
        if None not in (cfg.alpha, cfg.delta, cfg.L):
            if not (0.0 < cfg.alpha - cfg.delta and cfg.alpha + cfg.delta < cfg.L):
                issues.append(
                    "observation window [alpha-delta, alpha+delta] = "
                    f"[{cfg.alpha - cfg.delta}, {cfg.alpha + cfg.delta}] "
                    f"not contained in (0, {cfg.L})"
                )
            elif cfg.n_cells:
                dx = cfg.L / cfg.n_cells
                covered = math.floor((cfg.alpha + cfg.delta) / dx) - math.ceil((cfg.alpha - cfg.delta) / dx) + 2
                if covered < 4:
                    issues.append("mesh too coarse: observation window covers fewer than 4 cells")

    if cfg.u0 == "shifted-shock":
        if cfg.beta is None:
            issues.append("u0 = shifted-shock requires key 'beta'")
        elif cfg.L is not None and not 0.0 < cfg.beta < cfg.L:
            issues.append(f"beta = {cfg.beta} outside (0, {cfg.L})")
    if cfg.u0 == "perturbed-shock":
        if cfg.amplitude is None:
            issues.append("u0 = perturbed-shock requires key 'amplitude'")
        elif cfg.amplitude > 0 and (cfg.wavenumber is None) == (cfg.seed is None):
            issues.append("perturbed-shock needs exactly one of 'wavenumber' or 'seed'")

    if cfg.mode == "convergence-study":
        if not cfg.riemann_pairs:
            issues.append("riemann_pairs must be non-empty")
        for n in cfg.mesh_list:
            if n < 4:
                issues.append(f"mesh_list entry {n} below the 4-cell minimum")
        if cfg.x_jump is not None and cfg.L is not None and not 0.0 < cfg.x_jump < cfg.L:
            issues.append(f"x_jump = {cfg.x_jump} outside (0, {cfg.L})")

    if cfg.mode == "delay-ode-verify":
        if cfg.n_systems is not None and cfg.n_systems < 1:
            issues.append("n_systems must be at least 1")
        if cfg.dt_divisor < 10:
            issues.append("dt_divisor below 10 violates the integrator precondition")
        if cfg.horizon_windows < 1:
            issues.append("horizon_windows must be at least 1")

    if cfg.mode == "sweep":
        if not cfg.sweep_eps or not cfg.sweep_nu:
            issues.append("sweep needs non-empty sweep_eps and sweep_nu")
        for e in cfg.sweep_eps:
            if e <= 0:
                issues.append(f"sweep_eps entry {e} must be positive")
        for v in cfg.sweep_nu:
            if v <= 0:
                issues.append(f"sweep_nu entry {v} must be positive")

    return issues


def config_to_text(cfg: RunConfig) -> str:
    """Canonical echo with defaults resolved; parsing it reproduces the run."""
    lines = []
    allowed = _MODE_KEYS[cfg.mode] | {"mode"}
    from .serialize import fmt
    for f in fields(cfg):
        if f.name not in allowed:
            continue
        val = getattr(cfg, f.name)
        if f.name == "snapshot_every" and val is None and cfg.t_end is not None:
            val = cfg.snapshot_interval
        if f.name == "x_jump" and val is None and cfg.mode == "convergence-study":
            val = cfg.jump_position
        if val is None or val == () :
            continue
        if isinstance(val, tuple):
            if f.name == "riemann_pairs":
                text = ",".join(f"{fmt(a)}:{fmt(b)}" for a, b in val)
            else:
                text = ",".join(fmt(v) for v in val)
        else:
            text = fmt(val)
        lines.append(f"{f.name} = {text}\n")
    return "".join(lines)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
