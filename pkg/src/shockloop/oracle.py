"""Exact entropy solutions of Cauchy problems by wavefront tracking.

Piecewise-constant data evolve by propagating admissible down-jumps at their
Rankine-Hugoniot speeds and discretizing each rarefaction into a fan of small
up-jumps of size at most eta.  For convex flux, collisions always merge into a
single down-jump, so the front count only decreases and the event cascade is
finite.  Backward generalized characteristics are straight through constant
regions, select the one-sided state at shocks, and aim at the fan origin
inside rarefactions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfRegion, TooManyEvents
from .flux import FluxModel, rankine_hugoniot_speed
from .piecewise import average_on_cells

_ATOL = 1e-11


@dataclass(frozen=True)
class FrontEvent:
    time: float
    position: float
    left_state: float
    right_state_before: float
    right_state_after: float


@dataclass
class _Epoch:
    t0: float
    xs: np.ndarray        # front positions at t0
    ss: np.ndarray        # front speeds
    lefts: np.ndarray
    rights: np.ndarray
    origin_t: np.ndarray  # fan origin coordinates; nan for shocks
    origin_x: np.ndarray

    def positions(self, t: float) -> np.ndarray:
        return self.xs + self.ss * (t - self.t0)

    def region_values(self) -> np.ndarray:
        if self.xs.size == 0:
            return np.asarray(self.lefts)  # single constant region sentinel
        return np.concatenate(([self.lefts[0]], self.rights))


def riemann_solution(flux: FluxModel, a: float, b: float, xi):
    """Self-similar solution value on the ray x/t = xi for data (a | b)."""
    xi_arr = np.asarray(xi, dtype=float)
    if a == b:
        out = np.full_like(xi_arr, a)
    elif a > b:
        s = rankine_hugoniot_speed(flux, a, b)
        out = np.where(xi_arr < s, a, b)
    else:
        fpa = float(flux.deriv(np.float64(a)))
        fpb = float(flux.deriv(np.float64(b)))
        out = np.empty_like(xi_arr)
        flat = out.reshape(-1)
        for i, x in enumerate(xi_arr.reshape(-1)):
            if x <= fpa:
                flat[i] = a
            elif x >= fpb:
                flat[i] = b
            else:
                flat[i] = flux.invert_deriv(float(x))
    if out.ndim == 0:
        return float(out)
    return out


class FrontSolution:
    """Front-tracked evolution of piecewise-constant Cauchy data up to t_max."""

    def __init__(self, flux: FluxModel, breakpoints, values, t_max: float,
                 eta: float | None = None, max_events: int = 100_000):
        self.flux = flux
        self.t_max = float(t_max)
        breakpoints = np.asarray(breakpoints, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.size != breakpoints.size + 1:
            raise ValueError("need len(values) == len(breakpoints) + 1")
        if np.any(np.diff(breakpoints) < 0):
            raise ValueError("breakpoints must be sorted")
        if eta is None:
            spread = float(values.max() - values.min())
            eta = 1e-3 * (spread if spread > 0 else 1.0)
        self.eta = float(eta)
        self.events: list[FrontEvent] = []
        self._epochs: list[_Epoch] = []
        self._build(breakpoints, values, max_events)

    # -- construction -------------------------------------------------------

    def _build(self, breakpoints, values, max_events):
        xs, ss, lefts, rights, ot, ox = [], [], [], [], [], []
        for x_j, v_l, v_r in zip(breakpoints, values[:-1], values[1:]):
            if v_l == v_r:
                continue
            if v_l > v_r:
                xs.append(x_j)
                ss.append(rankine_hugoniot_speed(self.flux, v_l, v_r))
                lefts.append(v_l)
                rights.append(v_r)
                ot.append(np.nan)
                ox.append(np.nan)
            else:
                n_sub = max(1, int(np.ceil((v_r - v_l) / self.eta)))
                sub = np.linspace(v_l, v_r, n_sub + 1)
                for w_l, w_r in zip(sub[:-1], sub[1:]):
                    xs.append(x_j)
                    ss.append(rankine_hugoniot_speed(self.flux, w_l, w_r))
                    lefts.append(w_l)
                    rights.append(w_r)
                    ot.append(0.0)
                    ox.append(x_j)
        epoch = _Epoch(
            0.0, np.asarray(xs), np.asarray(ss), np.asarray(lefts),
            np.asarray(rights), np.asarray(ot), np.asarray(ox),
        )
        self._epochs.append(epoch)

        while len(self.events) < max_events:
            e = self._epochs[-1]
            if e.xs.size < 2:
                return
            gaps = np.diff(e.xs)
            rel = e.ss[:-1] - e.ss[1:]
            with np.errstate(divide="ignore", invalid="ignore"):
                dts = np.where(rel > 0.0, gaps / rel, np.inf)
            i = int(np.argmin(dts))  # ties resolve leftmost
            if not np.isfinite(dts[i]):
                return
            tc = e.t0 + max(float(dts[i]), 0.0)
            if tc > self.t_max:
                return
            pos = e.positions(tc)
            pos = np.maximum.accumulate(pos)  # clamp FP-level inversions
            xc = pos[i]
            self.events.append(FrontEvent(
                time=tc, position=xc, left_state=float(e.lefts[i]),
                right_state_before=float(e.rights[i]),
                right_state_after=float(e.rights[i + 1]),
            ))
            keep = np.ones(e.xs.size, dtype=bool)
            keep[i + 1] = False
            xs_n = pos.copy()
            xs_n[i] = xc
            ss_n = e.ss.copy()
            lefts_n = e.lefts.copy()
            rights_n = e.rights.copy()
            rights_n[i] = e.rights[i + 1]
            ss_n[i] = rankine_hugoniot_speed(self.flux, lefts_n[i], rights_n[i])
            ot_n = e.origin_t.copy()
            ox_n = e.origin_x.copy()
            ot_n[i] = np.nan
            ox_n[i] = np.nan
            self._epochs.append(_Epoch(
                tc, xs_n[keep], ss_n[keep], lefts_n[keep], rights_n[keep],
                ot_n[keep], ox_n[keep],
            ))
        raise TooManyEvents(f"more than {max_events} front interactions")

    # -- queries --------------------------------------------------------------

    def _epoch_at(self, t: float) -> _Epoch:
        if t < -_ATOL or t > self.t_max + _ATOL:
            raise OutOfRegion(f"time {t} outside computed region [0, {self.t_max}]")
        t0s = [e.t0 for e in self._epochs]
        idx = int(np.searchsorted(t0s, t, side="right")) - 1
        return self._epochs[max(idx, 0)]

    def sample(self, t: float, xs) -> np.ndarray:
        """Piecewise-constant state values at time t (fan bands carry their
        sub-jump value, within eta of the self-similar profile)."""
        e = self._epoch_at(t)
        xs = np.asarray(xs, dtype=float)
        vals = e.region_values()
        if e.xs.size == 0:
            return np.full_like(xs, float(vals[0]))
        pos = e.positions(t)
        idx = np.searchsorted(pos, xs, side="right")
        return vals[idx]

    def cell_averages(self, t: float, x_edges) -> np.ndarray:
        """Exact cell averages of the tracked (piecewise-constant) solution."""
        e = self._epoch_at(t)
        if e.xs.size == 0:
            return np.full(len(x_edges) - 1, float(e.region_values()[0]))
        pos = e.positions(t)
        return average_on_cells(x_edges, pos, e.region_values())

    def backward_characteristic(self, t: float, x: float, side: str = "min"):
        """Backward generalized characteristic from (t, x).

        Returns (polyline, v): the polyline as a list of (t, x) pairs with
        decreasing times, and the carried state v.  At a jump the minimal
        characteristic carries the left state, the maximal the right state.
        Inside a rarefaction the path aims straight at the fan origin.
        """
        if side not in ("min", "max"):
            raise ValueError("side must be 'min' or 'max'")
        if t <= 0.0:
            raise OutOfRegion("backward characteristics need t > 0")
        ei = self._epoch_index(t)
        e = self._epochs[ei]
        scale = max(1.0, abs(x))

        if e.xs.size == 0:
            v = float(e.region_values()[0])
            return [(t, x), (0.0, x - float(self.flux.deriv(np.float64(v))) * t)], v

        pos = e.positions(t)
        j_near = int(np.argmin(np.abs(pos - x)))
        on_front = abs(pos[j_near] - x) <= _ATOL * scale
        if on_front:
            region = j_near if side == "min" else j_near + 1
        else:
            region = int(np.searchsorted(pos, x, side="right"))
            fan = self._fan_origin_of_band(e, region)
            if fan is not None:
                t0f, x0f = fan
                xi = (x - x0f) / (t - t0f)
                return [(t, x), (t0f, x0f)], float(self.flux.invert_deriv(xi))

        v = float(e.region_values()[region])
        slope = float(self.flux.deriv(np.float64(v)))
        path = [(t, x)]
        tc, xc = t, x
        while True:
            e = self._epochs[ei]
            hit = None
            for j in (region - 1, region):
                if not 0 <= j < e.xs.size:
                    continue
                denom = slope - float(e.ss[j])
                if denom == 0.0:
                    continue
                s = (float(e.xs[j]) - float(e.ss[j]) * e.t0 - xc + slope * tc) / denom
                if e.t0 - _ATOL <= s < tc - _ATOL * max(1.0, tc):
                    if hit is None or s > hit[0]:
                        hit = (s, j)
            if hit is not None:
                s, j = hit
                xh = xc - slope * (tc - s)
                path.append((s, xh))
                if np.isfinite(e.origin_t[j]):
                    path.append((float(e.origin_t[j]), float(e.origin_x[j])))
                return path, v
            if ei == 0:
                path.append((0.0, xc - slope * tc))
                return path, v
            x_at = xc - slope * (tc - e.t0)
            tc, xc = e.t0, x_at
            ei -= 1
            prev = self._epochs[ei]
            pos_end = prev.positions(tc)
            region = int(np.searchsorted(pos_end, xc, side="right"))

    def _epoch_index(self, t: float) -> int:
        if t < -_ATOL or t > self.t_max + _ATOL:
            raise OutOfRegion(f"time {t} outside computed region [0, {self.t_max}]")
        t0s = [e.t0 for e in self._epochs]
        return max(int(np.searchsorted(t0s, t, side="right")) - 1, 0)

    @staticmethod
    def _fan_origin_of_band(e: _Epoch, region: int):
        """Fan origin if the band is strictly between two jumps of one fan."""
        jl, jr = region - 1, region
        if not (0 <= jl and jr < e.xs.size):
            return None
        if not (np.isfinite(e.origin_t[jl]) and np.isfinite(e.origin_t[jr])):
            return None
        if e.origin_t[jl] == e.origin_t[jr] and e.origin_x[jl] == e.origin_x[jr]:
            return float(e.origin_t[jl]), float(e.origin_x[jl])
        return None


def evolve(flux: FluxModel, breakpoints, values, t: float, query_points,
           eta: float | None = None) -> np.ndarray:
    """Convenience wrapper: track fronts up to t and sample at query points."""
    return FrontSolution(flux, breakpoints, values, t_max=t, eta=eta).sample(t, query_points)
