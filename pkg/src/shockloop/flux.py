"""Uniformly convex flux models with branch inverses and the Godunov interface flux.

A flux here is a C^2 convex function normalized so that min f = f(0) = 0.
Every positive level m is then attained at exactly two states u_r(m) < 0 < u_l(m),
and the down-jump between them is a zero-speed shock.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateJumpWarning,
    InvalidFlux,
    NoRoot,
    NotConverged,
)

ROOT_TOL = 1e-12
_VALIDATION_SAMPLES = 513


@dataclass(frozen=True)
class FluxModel:
    """Convex flux with derivatives, certified on a symmetric working interval.

    Immutable after construction; safe to share across concurrent runs.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    second_deriv: Callable[[np.ndarray], np.ndarray]
    working_interval: tuple[float, float]
    convexity_bounds: tuple[float, float] = field(default=(0.0, 0.0))
    deriv_inverse: Callable[[float], float] | None = None

    def __post_init__(self):
        lo, hi = self.working_interval
        if not lo < 0.0 < hi:
            raise InvalidFlux(f"working interval ({lo}, {hi}) must contain 0")
        us = np.linspace(lo, hi, _VALIDATION_SAMPLES)
        f0 = float(self.eval(np.array(0.0)))
        fp0 = float(self.deriv(np.array(0.0)))
        if abs(f0) > 1e-12 or abs(fp0) > 1e-12:
            raise InvalidFlux(f"flux {self.name} not normalized: f(0)={f0}, f'(0)={fp0}")
        fpp = np.asarray(self.second_deriv(us), dtype=float)
        if not np.all(fpp > 0.0):
            raise InvalidFlux(f"flux {self.name} not uniformly convex on {self.working_interval}")
        fp = np.asarray(self.deriv(us), dtype=float)
        if not np.all(np.diff(fp) > 0.0):
            raise InvalidFlux(f"flux {self.name}: f' not strictly increasing on sample grid")
        object.__setattr__(self, "convexity_bounds", (float(fpp.min()), float(fpp.max())))

    def invert_deriv(self, xi: float) -> float:
        """State u in the working interval with f'(u) = xi."""
        if self.deriv_inverse is not None:
            return float(self.deriv_inverse(xi))
        lo, hi = self.working_interval
        if not self.deriv(lo) <= xi <= self.deriv(hi):
            raise NoRoot(f"f' does not attain {xi} on {self.working_interval}")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.deriv(mid) < xi:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def _burgers(coeff: float, half_width: float) -> FluxModel:
    c = float(coeff)
    return FluxModel(
        name="burgers",
        eval=lambda u: 0.5 * c * u * u,
        deriv=lambda u: c * u,
        second_deriv=lambda u: c * np.ones_like(np.asarray(u, dtype=float)),
        working_interval=(-half_width, half_width),
        deriv_inverse=lambda xi: xi / c,
    )


def _cosh(scale: float, half_width: float) -> FluxModel:
    s = float(scale)
    return FluxModel(
        name="cosh",
        eval=lambda u: (np.cosh(s * u) - 1.0) / (s * s),
        deriv=lambda u: np.sinh(s * u) / s,
        second_deriv=lambda u: np.cosh(s * u),
        working_interval=(-half_width, half_width),
        deriv_inverse=lambda xi: math.asinh(s * xi) / s,
    )


_BUILDERS = {"burgers": _burgers, "cosh": _cosh}


def make_flux(name: str, param: float = 1.0, half_width: float = 4.0) -> FluxModel:
    """Build a named flux on a symmetric working interval.

    ``param`` is the quadratic coefficient for "burgers" (f = param*u^2/2) and
    the argument scale for "cosh" (f = (cosh(param*u)-1)/param^2).
    """
    if name not in _BUILDERS:
        raise InvalidFlux(f"unknown flux {name!r}; available: {sorted(_BUILDERS)}")
    if param <= 0:
        raise InvalidFlux("flux parameter must be positive")
    return _BUILDERS[name](param, half_width)


def flux_for_level(name: str, m: float, param: float = 1.0) -> FluxModel:
    """Build a named flux whose working interval covers level m with 3x margin.

    The margin covers the a-priori sup bound of any run at shock level m.
    """
    provisional = make_flux(name, param, half_width=4.0)
    u_hi = _bracketed_root(provisional, m, positive=True, expand=True)
    u_lo = _bracketed_root(provisional, m, positive=False, expand=True)
    half = 3.0 * max(u_hi, -u_lo)
    return make_flux(name, param, half_width=half)


def _bracketed_root(flux: FluxModel, m: float, positive: bool, expand: bool = False,
                    tol: float = ROOT_TOL) -> float:
    """Root of f(u) = m on one monotone branch: bisection plus Newton polish."""
    f = lambda u: float(flux.eval(np.float64(u)))
    fp = lambda u: float(flux.deriv(np.float64(u)))
    lo = 0.0
    hi = flux.working_interval[1] if positive else flux.working_interval[0]
    if expand:
        hi = 1.0 if positive else -1.0
        while f(hi) < m:
            hi *= 2.0
            if abs(hi) > 1e150:
                raise NoRoot(f"level {m} unreachable for flux {flux.name}")
    if f(hi) < m:
        raise NoRoot(f"level {m} exceeds flux at working-interval endpoint {hi}")
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if f(mid) < m:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    for _ in range(50):
        df = fp(u)
        if df == 0.0:
            break
        step = (f(u) - m) / df
        u -= step
        if abs(step) < 1e-16 * max(1.0, abs(u)):
            break
    if abs(f(u) - m) > tol * max(1.0, abs(m)):
        raise NotConverged(f"|f(u)-m| = {abs(f(u) - m):.3e} above tolerance at u={u}")
    return u


def shock_state_pair(flux: FluxModel, m: float) -> tuple[float, float]:
    """The two states (u_l, u_r) with f(u_l) = f(u_r) = m and u_r < 0 < u_l.

    The down-jump from u_l to u_r is a stationary admissible shock.
    """
    if m <= 0:
        raise NoRoot("shock level m must be positive")
    u_l = _bracketed_root(flux, m, positive=True)
    u_r = _bracketed_root(flux, m, positive=False)
    return u_l, u_r


def rankine_hugoniot_speed(flux: FluxModel, a: float, b: float) -> float:
    """Jump speed (f(a)-f(b))/(a-b); nondecreasing in each argument for convex f.

    Degenerate jumps fall back to the characteristic speed at the midpoint.
    """
    if abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b)):
        warnings.warn(
            f"jump ({a}, {b}) below tolerance; returning f'((a+b)/2)",
            DegenerateJumpWarning,
            stacklevel=2,
        )
        return float(flux.deriv(np.float64(0.5 * (a + b))))
    fa = float(flux.eval(np.float64(a)))
    fb = float(flux.eval(np.float64(b)))
    return (fa - fb) / (a - b)


def godunov_flux(flux: FluxModel, a, b):
    """Exact-Riemann interface flux between left state a and right state b.

    For convex f with min f = f(0) = 0 this closed form equals
    min_{[a,b]} f when a <= b and max_{[b,a]} f when a > b.
    Accepts scalars or arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    val = np.maximum(flux.eval(np.maximum(a, 0.0)), flux.eval(np.minimum(b, 0.0)))
    if val.ndim == 0:
        return float(val)
    return val
