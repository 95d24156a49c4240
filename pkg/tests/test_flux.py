import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockloop import godunov_flux, make_flux, rankine_hugoniot_speed, shock_state_pair
from shockloop.errors import DegenerateJumpWarning, InvalidFlux, NoRoot

STATES = st.floats(-3.0, 3.0, allow_nan=False)


def bisect_root(f, m, lo, hi, iters=200):
    """Independent reference root of f(u) = m on a monotone bracket."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) < m:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_shock_pair_burgers_analytic(burgers):
    assert shock_state_pair(burgers, 0.5) == pytest.approx((1.0, -1.0), abs=1e-12)
    big = make_flux("burgers", half_width=10.0)
    assert shock_state_pair(big, 2.0) == pytest.approx((2.0, -2.0), abs=1e-12)


def test_shock_pair_cosh_against_bisection(cosh_flux):
    u_l, u_r = shock_state_pair(cosh_flux, 0.2)
    f = lambda u: math.cosh(u) - 1.0
    ref = bisect_root(f, 0.2, 0.0, 3.0)
    assert u_l == pytest.approx(ref, abs=1e-12)
    assert u_r == pytest.approx(-ref, abs=1e-12)
    assert u_r < 0.0 < u_l


def test_shock_pair_sign_convention(burgers, cosh_flux):
    for fx in (burgers, cosh_flux):
        for m in (0.1, 0.3, 0.7):
            u_l, u_r = shock_state_pair(fx, m)
            assert u_r < 0.0 < u_l
            assert float(fx.deriv(np.float64(u_l))) > 0.0 > float(fx.deriv(np.float64(u_r)))


@pytest.mark.parametrize("m", [0.05, 0.2, 0.5, 1.0, 1.4])
def test_shock_pair_residual(burgers, m):
    u_l, u_r = shock_state_pair(burgers, m)
    assert abs(float(burgers.eval(np.float64(u_l))) - m) < 1e-10
    assert abs(float(burgers.eval(np.float64(u_r))) - m) < 1e-10


def test_shock_pair_no_root(burgers):
    with pytest.raises(NoRoot):
        shock_state_pair(burgers, 100.0)


def test_rankine_hugoniot_values(burgers):
    assert rankine_hugoniot_speed(burgers, 1.0, -1.0) == pytest.approx(0.0, abs=1e-14)
    assert rankine_hugoniot_speed(burgers, 1.1, -1.0) == pytest.approx(0.05, abs=1e-14)


def test_rankine_hugoniot_difference_quotient_limit(burgers):
    k = 0.8
    for h in (1e-3, 1e-5, 1e-7):
        assert rankine_hugoniot_speed(burgers, k, k - h) == pytest.approx(k, abs=h)


def test_rankine_hugoniot_degenerate_flagged(burgers):
    with pytest.warns(DegenerateJumpWarning):
        s = rankine_hugoniot_speed(burgers, 0.5, 0.5 + 1e-15)
    assert s == pytest.approx(0.5, abs=1e-12)


@given(a=STATES, b=STATES, da=st.floats(0.0, 1.0), db=st.floats(0.0, 1.0))
@settings(max_examples=150)
def test_rankine_hugoniot_monotone_in_each_argument(a, b, da, db):
    fx = make_flux("burgers", half_width=8.0)
    if abs(a - b) < 1e-6 or abs(a + da - b) < 1e-6 or abs(a - (b - db)) < 1e-6:
        return
    s = rankine_hugoniot_speed(fx, a, b)
    assert rankine_hugoniot_speed(fx, a + da, b) >= s - 1e-12
    assert rankine_hugoniot_speed(fx, a, b - db) <= s + 1e-12


def test_godunov_flux_examples(burgers):
    assert godunov_flux(burgers, 1.0, -1.0) == 0.5
    assert godunov_flux(burgers, -1.0, 1.0) == 0.0
    assert godunov_flux(burgers, 0.3, 0.3) == pytest.approx(0.045, abs=1e-16)


@pytest.mark.parametrize("pair", [(1.0, -1.0), (-1.0, 1.0), (0.2, 0.9), (0.9, 0.2),
                                  (-0.3, -0.8), (-0.8, -0.3), (1.5, 0.0)])
def test_godunov_flux_against_exhaustive_search(burgers, pair):
    a, b = pair
    us = np.linspace(min(a, b), max(a, b), 20001)
    f = burgers.eval(us)
    expected = f.min() if a <= b else f.max()
    assert godunov_flux(burgers, a, b) == pytest.approx(float(expected), abs=1e-8)


@given(a=STATES)
@settings(max_examples=100)
def test_godunov_consistency_exact(a):
    fx = make_flux("burgers", half_width=4.0)
    assert godunov_flux(fx, a, a) == float(fx.eval(np.float64(a)))


@given(a=STATES, b=STATES, d=st.floats(1e-6, 1.0))
@settings(max_examples=150)
def test_godunov_monotonicity(a, b, d):
    fx = make_flux("burgers", half_width=8.0)
    base = godunov_flux(fx, a, b)
    assert godunov_flux(fx, a + d, b) >= base
    assert godunov_flux(fx, a, b + d) <= base


def test_stationary_pair_has_zero_speed(burgers, cosh_flux):
    for fx, m in ((burgers, 0.5), (cosh_flux, 0.2)):
        u_l, u_r = shock_state_pair(fx, m)
        assert abs(rankine_hugoniot_speed(fx, u_l, u_r)) <= 1e-10


def test_flux_validation_rejects_shifted_minimum():
    from shockloop.flux import FluxModel

    with pytest.raises(InvalidFlux):
        FluxModel(
            name="bad",
            eval=lambda u: 0.5 * (u - 1.0) ** 2,
            deriv=lambda u: u - 1.0,
            second_deriv=lambda u: np.ones_like(np.asarray(u, dtype=float)),
            working_interval=(-2.0, 2.0),
        )


def test_convexity_bounds_cover_interval(cosh_flux):
    lo, hi = cosh_flux.convexity_bounds
    assert lo == pytest.approx(1.0, abs=1e-9)
    assert hi == pytest.approx(math.cosh(cosh_flux.working_interval[1]), rel=1e-6)


def test_invert_deriv_roundtrip(burgers, cosh_flux):
    for fx in (burgers, cosh_flux):
        for xi in (-0.9, -0.2, 0.0, 0.4, 1.1):
            u = fx.invert_deriv(xi)
            assert float(fx.deriv(np.float64(u))) == pytest.approx(xi, abs=1e-10)
