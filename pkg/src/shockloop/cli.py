"""Command-line entry point with one subcommand per experiment family."""

from __future__ import annotations

import argparse
import sys

from . import runner
from .config import load_config
from .errors import (
    ConfigError,
    DelayError,
    FluxError,
    OracleError,
    ShockloopError,
    SolverError,
    StabilityError,
    StateError,
)

_SUBCOMMAND_MODES = {
    "simulate": ("closed-loop", "open-loop"),
    "sweep": ("sweep",),
    "converge": ("convergence-study",),
    "verify-dde": ("delay-ode-verify",),
}

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_FLUX = 3
EXIT_SOLVER = 4
EXIT_ORACLE = 5
EXIT_STABILITY = 6
EXIT_DELAY = 7
EXIT_IO = 8


def _classify(exc: Exception) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, FluxError):
        return EXIT_FLUX
    if isinstance(exc, (SolverError, StateError)):
        return EXIT_SOLVER
    if isinstance(exc, OracleError):
        return EXIT_ORACLE
    if isinstance(exc, StabilityError):
        return EXIT_STABILITY
    if isinstance(exc, DelayError):
        return EXIT_DELAY
    if isinstance(exc, OSError):
        return EXIT_IO
    if isinstance(exc, ShockloopError):
        return EXIT_UNEXPECTED
    return EXIT_UNEXPECTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shockloop",
        description="Boundary-feedback shock stabilization experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, modes in _SUBCOMMAND_MODES.items():
        p = sub.add_parser(name, help=f"run a config with mode in {modes}")
        p.add_argument("--config", required=True, help="path to the run configuration")
        p.add_argument("--out", required=True, help="artifact directory for this run")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers (sweep only)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        allowed = _SUBCOMMAND_MODES[args.command]
        if config.mode not in allowed:
            print(
                f"error: subcommand {args.command!r} requires mode in {allowed}, "
                f"config has {config.mode!r}",
                file=sys.stderr,
            )
            return EXIT_CONFIG
        result = runner.run(config, args.out, jobs=args.jobs)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _classify(exc)
    print(f"wrote {result.outdir} ({result.elapsed_seconds:.2f}s)")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
