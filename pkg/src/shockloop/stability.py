"""Explicit constants of the stabilization estimate, parameter validation,
shock tracking, zone classification, decay fitting, and the delay series.

All quantities are closed-form in the flux and the run parameters; nothing is
calibrated from simulation output except the fitted decay envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidRegime, NoShock, NonPositiveSpeed, WindowEmpty
from .flux import FluxModel, rankine_hugoniot_speed, shock_state_pair
from .states import GridState

DECAY_FLOOR = 1e-15


@dataclass(frozen=True)
class StabilityConstants:
    """All explicit constants and times entering the closed-loop decay proof.

    t1: left/right boundary influence has reached every backward characteristic.
    t2: the profile is a single down-jump between the two zones.
    t3: the jump position is confined to the observation window.
    t4: additionally the left zone has been refreshed from the boundary.
    """

    L: float
    alpha: float
    delta: float
    eps: float
    nu: float
    m: float
    u_l: float
    u_r: float
    a_me: float          # half the flux at the reduced left state u_l - eps
    t1: float
    t2: float
    t3: float
    t4: float
    theta: float         # window fraction beyond which the observation has a sign
    c_bar: float         # largest possible jump speed after t2 (positive)
    c_tilde: float       # smallest possible jump speed after t2 (negative)
    d_bar: float         # guaranteed rightward speed when stuck left of target
    d_tilde: float       # guaranteed leftward speed when stuck right of target
    c1: float            # outward speed of the left zone front before merging
    c2: float            # inward speed of the right zone front before merging
    m_med: float         # bound on the delay-defining function's drift term
    nu0: float           # half jump size; the gain must stay linear above it


def compute_constants(flux: FluxModel, L: float, alpha: float, delta: float,
                      eps: float, nu: float, m: float) -> StabilityConstants:
    """Evaluate every constant in closed form; raise if the regime is invalid."""
    u_l, u_r = shock_state_pair(flux, m)
    if eps >= u_l:
        raise InvalidRegime(f"need eps < u_l(m): eps={eps}, u_l={u_l}")
    if not (0.0 < alpha - delta and alpha + delta < L):
        raise InvalidRegime("observation window must lie inside (0, L)")

    fp = lambda u: float(flux.deriv(np.float64(u)))
    feval = lambda u: float(flux.eval(np.float64(u)))

    a_me = feval(u_l - eps) / 2.0
    u_l_a, u_r_a = shock_state_pair(flux, a_me)
    t1 = max(L / fp(u_l_a), L / (-fp(u_r_a)))

    c1 = rankine_hugoniot_speed(flux, u_l - eps, u_r_a)
    c2 = -rankine_hugoniot_speed(flux, u_l_a, u_r)
    t2 = t1 + L / (c1 + c2)

    theta = max(u_l / (u_l - u_r - eps), (eps - u_r) / (u_l + eps - u_r))

    c_bar = rankine_hugoniot_speed(flux, u_l + eps, u_r)
    c_tilde = rankine_hugoniot_speed(flux, u_l - eps, u_r)
    d_tilde = rankine_hugoniot_speed(flux, u_l - (eps / nu) * (u_l - eps) / 2.0, u_r)
    d_bar = rankine_hugoniot_speed(flux, u_l - (eps / nu) * u_r / 2.0, u_r)

    if not (c_tilde < 0.0 < c_bar and d_tilde < 0.0 < d_bar and c1 > 0.0 and c2 > 0.0):
        raise InvalidRegime("speed bounds lost their signs; parameters out of regime")
    if not 0.0 < theta < 1.0:
        raise InvalidRegime(f"theta = {theta} outside (0, 1)")

    t3 = t2 + max(
        -(L - alpha - theta * delta) / d_tilde - L / fp(u_l - eps),
        (alpha - theta * delta) / fp(u_l - eps) + (alpha - theta * delta) / d_bar,
    )
    t4 = t3 + L / fp(u_l - eps)

    band = np.linspace(u_l - eps, u_l + eps, 1001)
    fpp_max = float(np.max(flux.second_deriv(band)))
    m_med = (
        max(feval(u_l + eps) - m, m - feval(u_l - eps)) / (2.0 * delta)
        * (alpha - delta) / fp(u_l - eps)
        * fpp_max
    )
    nu0 = (u_l - u_r) / 2.0

    if not t1 < t2 <= t3 < t4:
        raise InvalidRegime(f"times out of order: t1={t1}, t2={t2}, t3={t3}, t4={t4}")

    return StabilityConstants(
        L=L, alpha=alpha, delta=delta, eps=eps, nu=nu, m=m, u_l=u_l, u_r=u_r,
        a_me=a_me, t1=t1, t2=t2, t3=t3, t4=t4, theta=theta,
        c_bar=c_bar, c_tilde=c_tilde, d_bar=d_bar, d_tilde=d_tilde,
        c1=c1, c2=c2, m_med=m_med, nu0=nu0,
    )


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    lhs: float
    rhs: float


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        out = {}
        for c in self.checks:
            out[f"check_{c.name}"] = "pass" if c.passed else "fail"
            out[f"check_{c.name}_lhs"] = c.lhs
            out[f"check_{c.name}_rhs"] = c.rhs
        out["validation_passed"] = self.all_passed
        return out


def validate_parameters(flux: FluxModel, constants: StabilityConstants) -> ValidationReport:
    """Report each smallness condition separately; never raises."""
    k = constants
    fp = lambda u: float(flux.deriv(np.float64(u)))
    band = np.linspace(k.u_l - k.eps, k.u_l + k.eps, 1001)
    fpp_max = float(np.max(flux.second_deriv(band)))

    checks = [
        ValidationCheck("nu_above_half_jump", k.nu > k.nu0, k.nu0, k.nu),
        ValidationCheck("eps_below_gain_margin", k.eps < k.nu - k.nu0, k.eps, k.nu - k.nu0),
        ValidationCheck(
            "right_drift_slower_than_refresh",
            k.c_bar / ((1.0 - k.theta) * fp(k.u_l - k.eps)) < k.delta / k.L,
            k.c_bar / ((1.0 - k.theta) * fp(k.u_l - k.eps)),
            k.delta / k.L,
        ),
        ValidationCheck(
            "left_drift_slower_than_refresh",
            abs(k.c_tilde) / ((1.0 - k.theta) * abs(fp(k.u_r))) < k.delta / k.L,
            abs(k.c_tilde) / ((1.0 - k.theta) * abs(fp(k.u_r))),
            k.delta / k.L,
        ),
        ValidationCheck(
            "delay_stays_monotone",
            k.eps / k.nu < fp(k.u_l - k.eps) / k.m_med,
            k.eps / k.nu,
            fp(k.u_l - k.eps) / k.m_med,
        ),
        ValidationCheck(
            "contraction_gain_condition",
            3.0 * (k.alpha - k.delta) * fpp_max * k.eps
            / (2.0 * k.delta * fp(k.u_l - k.eps)) < k.nu,
            3.0 * (k.alpha - k.delta) * fpp_max * k.eps
            / (2.0 * k.delta * fp(k.u_l - k.eps)),
            k.nu,
        ),
    ]
    return ValidationReport(tuple(checks))


def locate_shock(state: GridState, m: float, flux: FluxModel) -> float:
    """Rightmost crossing of the midpoint level by the interpolated profile.

    After the two-zone time the profile is a single down-jump, and scanning
    from the right is robust to small oscillations in the left zone.
    """
    u_l, u_r = shock_state_pair(flux, m)
    mid = 0.5 * (u_l + u_r)
    v = state.values
    if not (v.max() > mid > v.min()):
        raise NoShock("profile does not straddle the midpoint level")
    d = v - mid
    centers = state.centers()
    for i in range(state.n_cells - 2, -1, -1):
        if d[i] == 0.0 and d[i + 1] == 0.0:
            continue
        if d[i] * d[i + 1] <= 0.0:
            return float(centers[i] + (mid - v[i]) / (v[i + 1] - v[i]) * state.dx)
    raise NoShock("no midpoint crossing between adjacent cells")


@dataclass(frozen=True)
class ZoneRow:
    """Zone split of one snapshot: left band, smeared middle, right plateau."""

    time: float
    n_left: int
    n_middle: int
    n_right: int
    two_zone: bool
    three_zone: bool


def classify_zones(trajectory, constants: StabilityConstants, flux: FluxModel,
                   *, tol: float | None = None, fan_tol: float | None = None,
                   middle_allowance: int = 3) -> list[ZoneRow]:
    """Classify every snapshot into left/middle/right zones.

    Default tolerance is two smearing widths: 2*dx*(max f'')*(jump size).
    ``two_zone`` holds when at most ``middle_allowance`` cells are in neither
    outer zone; ``three_zone`` additionally requires middle cells to have
    characteristic speed within L/t of zero.
    """
    k = constants
    snapshots = trajectory.snapshots if hasattr(trajectory, "snapshots") else trajectory
    rows = []
    for snap in snapshots:
        if tol is None:
            row_tol = 2.0 * snap.dx * flux.convexity_bounds[1] * (k.u_l - k.u_r)
        else:
            row_tol = tol
        row_fan_tol = row_tol if fan_tol is None else fan_tol
        v = snap.values
        left_ok = np.abs(v - k.u_l) <= k.eps + row_tol
        right_ok = np.abs(v - k.u_r) <= row_tol
        speeds = np.abs(np.asarray(flux.deriv(v), dtype=float))
        speed_cap = np.inf if snap.time <= 0 else k.L / snap.time
        mid_ok = speeds <= speed_cap + row_fan_tol

        n = v.size
        n_left = 0
        while n_left < n and left_ok[n_left]:
            n_left += 1
        n_right = 0
        while n_right < n - n_left and right_ok[n - 1 - n_right]:
            n_right += 1
        middle = slice(n_left, n - n_right)
        n_middle = n - n_right - n_left
        rows.append(ZoneRow(
            time=snap.time,
            n_left=n_left,
            n_middle=n_middle,
            n_right=n_right,
            two_zone=n_middle <= middle_allowance,
            three_zone=bool(np.all(mid_ok[middle])),
        ))
    return rows


def fit_decay(times, values, window: tuple[float, float]) -> tuple[float, float]:
    """Least-squares exponential fit on a window: returns (rate, prefactor).

    Values are floored at 1e-15 before taking logs.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (times >= window[0]) & (times <= window[1])
    if not np.any(mask):
        raise WindowEmpty(f"no samples in window {window}")
    t = times[mask]
    y = np.log(np.maximum(values[mask], DECAY_FLOOR))
    if t.size == 1:
        return 0.0, float(np.exp(y[0]))
    slope, intercept = np.polyfit(t, y, 1)
    return float(-slope), float(np.exp(intercept))


def envelope_excess(times, values, rate: float, prefactor: float,
                    window: tuple[float, float]) -> float:
    """Worst ratio of the series to the fitted envelope on the window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (times >= window[0]) & (times <= window[1])
    if not np.any(mask):
        raise WindowEmpty(f"no samples in window {window}")
    env = prefactor * np.exp(-rate * times[mask])
    return float(np.max(values[mask] / np.maximum(env, DECAY_FLOOR)))


def delay_series(trajectory, flux: FluxModel, alpha: float, delta: float,
                 t_min: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Feedback transport delay (alpha-delta)/f'(u(t, alpha-delta)) per snapshot.

    Uses the cell containing alpha-delta. Raises if the speed there is not
    positive, which signals the confinement regime was violated.
    """
    snapshots = trajectory.snapshots if hasattr(trajectory, "snapshots") else trajectory
    ts, taus = [], []
    for snap in snapshots:
        if snap.time < t_min:
            continue
        idx = min(int((alpha - delta) / snap.dx), snap.n_cells - 1)
        speed = float(flux.deriv(np.float64(snap.values[idx])))
        if speed <= 0.0:
            raise NonPositiveSpeed(
                f"f'(u) = {speed} at x = {alpha - delta}, t = {snap.time}"
            )
        ts.append(snap.time)
        taus.append((alpha - delta) / speed)
    return np.asarray(ts), np.asarray(taus)
