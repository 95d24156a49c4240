"""Scalar delay differential equations with state-independent bounds on the
delay, and the contraction/decay verifier for the sliding-window maximum.

The right-hand side is theta'(t) = g(theta(t - tau(t))) with g decreasing
through the origin.  With B(t) the maximum of |theta| over the trailing window
of width three times the largest delay, the verifier checks that B does not
increase, contracts by the explicit factor K over each window, and that the
resulting exponential envelope dominates the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadDelay, BoundViolated, DelayError, HypothesisFailed


@dataclass(frozen=True)
class DelaySystem:
    """Slope function, delay schedule, history, and the hypothesis brackets.

    ``bound`` is the a-priori amplitude bound M, ``c`` and ``eps_g`` bracket
    the slope: -eps_g <= g' <= -c < 0 on [-M, M].
    """

    g: Callable[[float], float]
    tau: Callable[[float], float]
    history: Callable[[float], float]
    bound: float
    tau_m: float
    tau_M: float
    c: float
    eps_g: float

    def validate(self, n_samples: int = 201) -> None:
        """Spot-check the structural hypotheses on a sample grid."""
        if not 0.0 < self.tau_m <= self.tau_M:
            raise BadDelay(f"need 0 < tau_m <= tau_M, got ({self.tau_m}, {self.tau_M})")
        if not 0.0 < self.c <= self.eps_g:
            raise DelayError(f"need 0 < c <= eps_g, got ({self.c}, {self.eps_g})")
        if abs(self.g(0.0)) > 1e-12:
            raise DelayError(f"origin not stationary: g(0) = {self.g(0.0)}")
        us = np.linspace(-self.bound, self.bound, n_samples)
        h = 1e-6 * max(1.0, self.bound)
        tol = 1e-3 * self.eps_g
        for u in us:
            slope = (self.g(u + h) - self.g(u - h)) / (2.0 * h)
            if not -self.eps_g - tol <= slope <= -self.c + tol:
                raise DelayError(f"g' = {slope} at u = {u} outside [-eps_g, -c]")


def simulate(system: DelaySystem, t_end: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Method of steps with the explicit midpoint rule.

    Returns the uniform grid from -3*tau_M (history included) to t_end and the
    trajectory on it.  Delayed values are linearly interpolated; with
    dt <= tau_m/10 every delayed argument lies in already-computed history.
    """
    if dt > system.tau_m / 10.0:
        raise ValueError(f"dt = {dt} too coarse; need dt <= tau_m/10 = {system.tau_m / 10.0}")
    n_hist = int(math.ceil(3.0 * system.tau_M / dt))
    n_fwd = int(math.ceil(t_end / dt))
    n_total = n_hist + n_fwd + 1
    t0 = -n_hist * dt
    ts = t0 + dt * np.arange(n_total)
    theta = np.empty(n_total)
    for i in range(n_hist + 1):
        theta[i] = system.history(ts[i])

    g, tau = system.g, system.tau
    bound = system.bound
    tau_m, tau_M = system.tau_m, system.tau_M
    th = theta  # local alias for the hot loop

    def delayed(tq: float) -> float:
        pos = (tq - t0) / dt
        i = int(pos)
        frac = pos - i
        return th[i] + frac * (th[i + 1] - th[i])

    for i in range(n_hist, n_total - 1):
        t_mid = ts[i] + 0.5 * dt
        lag = tau(t_mid)
        if not tau_m <= lag <= tau_M:
            raise BadDelay(f"tau({t_mid}) = {lag} outside [{tau_m}, {tau_M}]")
        th[i + 1] = th[i] + dt * g(delayed(t_mid - lag))
        if abs(th[i + 1]) > bound:
            raise BoundViolated(
                f"|theta({ts[i + 1]})| = {abs(th[i + 1])} exceeds a-priori bound {bound}"
            )
    return ts, theta


def contraction_constant(system: DelaySystem) -> float:
    """The explicit window-contraction factor K; requires eps_g*(2*tau_M+tau_m) < 1."""
    small = system.eps_g * (2.0 * system.tau_M + system.tau_m)
    if not small < 1.0:
        raise HypothesisFailed(
            f"eps_g*(2*tau_M + tau_m) = {small} must be strictly below 1"
        )
    k = (1.0 + small * system.c * system.tau_M) / (1.0 + system.c * system.tau_M)
    assert k < 1.0
    return k


@dataclass(frozen=True)
class DecayReport:
    """Verifier outcome with the worst observed margins.

    ``worst_window_ratio`` records max B(t + 3*tau_M)/B(t) so the sharpness of
    K is visible empirically.
    """

    hyp_nonincrease_ok: bool     # eps_g*(tau_m+tau_M) <= 1
    hyp_contraction_ok: bool     # eps_g*(2*tau_M+tau_m) < 1
    tol: float
    b_nonincreasing: bool
    worst_b_increase: float
    contraction_holds: bool
    worst_contraction_excess: float
    worst_window_ratio: float
    envelope_holds: bool
    worst_envelope_excess: float
    k_value: float | None

    @property
    def all_passed(self) -> bool:
        return self.b_nonincreasing and self.contraction_holds and self.envelope_holds


def window_maximum(values: np.ndarray, width: int) -> np.ndarray:
    """Trailing-window maximum: out[i] = max(values[i-width : i+1])."""
    v = np.abs(np.asarray(values, dtype=float))
    if width + 1 > v.size:
        raise ValueError("window wider than the series")
    return np.lib.stride_tricks.sliding_window_view(v, width + 1).max(axis=1)


def verify_decay(trajectory: tuple[np.ndarray, np.ndarray], system: DelaySystem,
                 t_start: float = 0.0) -> DecayReport:
    """Check the three decay properties of the sliding maximum B on a trajectory.

    All comparisons allow the interpolation tolerance 10*dt*eps_g*M.
    """
    ts, theta = trajectory
    ts = np.asarray(ts, dtype=float)
    theta = np.asarray(theta, dtype=float)
    dt = float(ts[1] - ts[0])
    if ts[0] > t_start - 3.0 * system.tau_M + 1e-12:
        raise ValueError("trajectory must cover [t_start - 3*tau_M, t_end]")
    tol = 10.0 * dt * system.eps_g * system.bound

    width = int(math.ceil(3.0 * system.tau_M / dt))
    b = window_maximum(theta, width)
    tb = ts[width:]
    start = int(np.searchsorted(tb, t_start - 1e-12))
    b = b[start:]
    tb = tb[start:]

    hyp1 = system.eps_g * (system.tau_m + system.tau_M) <= 1.0
    hyp2 = system.eps_g * (2.0 * system.tau_M + system.tau_m) < 1.0

    diffs = np.diff(b)
    worst_increase = float(diffs.max()) if diffs.size else 0.0
    b_mono = worst_increase <= tol

    if hyp2:
        k = contraction_constant(system)
        shift = int(math.ceil(3.0 * system.tau_M / dt))
        if b.size > shift:
            lhs = b[shift:]
            rhs = k * b[:-shift]
            worst_excess = float(np.max(lhs - rhs - tol))
            contraction = worst_excess <= 0.0
            floor = 1e-14 * system.bound
            worst_ratio = float(np.max(lhs / np.maximum(b[:-shift], floor)))
        else:
            worst_excess, contraction, worst_ratio = 0.0, True, 0.0
        b0 = b[0]
        mask = ts >= tb[0] - 1e-12
        env_on_ts = b0 * np.exp((math.log(k) / (3.0 * system.tau_M)) * (ts[mask] - tb[0]))
        env_excess = float(np.max(np.abs(theta[mask]) - env_on_ts - tol))
        envelope = env_excess <= 0.0
    else:
        k = None
        worst_excess = math.inf
        contraction = False
        worst_ratio = math.inf
        env_excess = math.inf
        envelope = False

    return DecayReport(
        hyp_nonincrease_ok=hyp1,
        hyp_contraction_ok=hyp2,
        tol=tol,
        b_nonincreasing=b_mono,
        worst_b_increase=worst_increase,
        contraction_holds=contraction,
        worst_contraction_excess=worst_excess,
        worst_window_ratio=worst_ratio,
        envelope_holds=envelope,
        worst_envelope_excess=env_excess,
        k_value=k,
    )


def random_system(rng: np.random.Generator) -> DelaySystem:
    """Draw a system satisfying every hypothesis, with margins left to chance.

    The slope function is -c*z - (eps_g - c)*s*tanh(z/s), whose derivative
    covers exactly [-eps_g, -c]; the delay oscillates inside its bracket; the
    history is a two-tone sinusoid.
    """
    tau_m = rng.uniform(0.3, 0.8)
    tau_M = tau_m * rng.uniform(1.0, 1.35)
    eps_g = rng.uniform(0.4, 0.95) / (2.0 * tau_M + tau_m)
    c = eps_g * rng.uniform(0.3, 1.0)
    amp = rng.uniform(0.2, 1.0)
    bound = 1.1 * amp
    s_scale = rng.uniform(0.3, 1.0) * bound

    om_tau = rng.uniform(0.2, 2.0)
    ph_tau = rng.uniform(0.0, 2.0 * np.pi)
    mid, half = 0.5 * (tau_m + tau_M), 0.5 * (tau_M - tau_m)

    om1 = rng.uniform(0.5, 3.0)
    om2 = rng.uniform(0.5, 3.0)
    ph1 = rng.uniform(0.0, 2.0 * np.pi)
    ph2 = rng.uniform(0.0, 2.0 * np.pi)

    def g(z, c=c, extra=eps_g - c, s=s_scale):
        return -c * z - extra * s * math.tanh(z / s)

    def tau(t, mid=mid, half=half, om=om_tau, ph=ph_tau):
        return mid + half * math.sin(om * t + ph)

    def history(t, a=amp, om1=om1, om2=om2, ph1=ph1, ph2=ph2):
        return a * (math.sin(om1 * t + ph1) + 0.3 * math.sin(om2 * t + ph2)) / 1.3

    return DelaySystem(
        g=g, tau=tau, history=history, bound=bound,
        tau_m=tau_m, tau_M=tau_M, c=c, eps_g=eps_g,
    )
