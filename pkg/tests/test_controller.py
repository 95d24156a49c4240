import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockloop import (
    left_boundary_value,
    make_controller,
    observe,
    saturate,
    shifted_shock,
    stationary_shock,
)
from shockloop.errors import MeshTooCoarse, StateError


@pytest.fixture(scope="module")
def gain(burgers):
    return make_controller(burgers, 1.0, 0.4, 0.1, 0.1, 0.5, 0.5)


def test_saturate_branches(gain):
    assert saturate(gain, 0.0) == 0.0
    assert saturate(gain, 0.25) == pytest.approx(0.05, abs=1e-16)
    assert saturate(gain, -3.0) == -0.1
    assert saturate(gain, 3.0) == 0.1


def test_saturate_odd_bounded_monotone(gain):
    zs = np.linspace(-3, 3, 1001)
    vals = np.array([saturate(gain, z) for z in zs])
    assert np.all(np.abs(vals) <= gain.eps)
    assert np.all(np.diff(vals) >= 0)
    odd = np.array([saturate(gain, -z) for z in zs])
    assert np.allclose(vals, -odd, atol=1e-16)


@given(y=st.floats(-5, 5), z=st.floats(-5, 5))
@settings(max_examples=200)
def test_saturate_lipschitz(burgers, y, z):
    gain = make_controller(burgers, 1.0, 0.4, 0.1, 0.1, 0.5, 0.5)
    assert abs(saturate(gain, y) - saturate(gain, z)) <= gain.eps / gain.nu * abs(y - z) + 1e-15


def test_observe_target_is_zero(burgers, demo_controller):
    target = stationary_shock(1.0, 400, 0.4, 0.5, burgers)
    assert observe(demo_controller, target) == pytest.approx(0.0, abs=1e-15)


def test_observe_target_zero_off_grid_alpha(burgers):
    # alpha inside a cell: the mixed cell sits strictly inside the window
    gain = make_controller(burgers, 1.0, 0.4037, 0.1, 0.005, 1.2, 0.5)
    target = stationary_shock(1.0, 400, 0.4037, 0.5, burgers)
    assert observe(gain, target) == pytest.approx(0.0, abs=1e-14)


def test_observe_half_window_shift(burgers, demo_controller):
    state = shifted_shock(1.0, 400, 0.45, 0.5, burgers)
    assert observe(demo_controller, state) == pytest.approx(0.5, abs=1e-12)


def test_observe_far_left_and_right(burgers, demo_controller):
    far_left = shifted_shock(1.0, 400, 0.25, 0.5, burgers)
    assert observe(demo_controller, far_left) == pytest.approx(-1.0, abs=1e-12)
    far_right = shifted_shock(1.0, 400, 0.75, 0.5, burgers)
    assert observe(demo_controller, far_right) == pytest.approx(1.0, abs=1e-12)


def test_observe_lipschitz_in_state(burgers, demo_controller, rng):
    for _ in range(25):
        a = rng.uniform(-1.2, 1.2, 400)
        b = rng.uniform(-1.2, 1.2, 400)
        sa = stationary_shock(1.0, 400, 0.4, 0.5, burgers).copy()
        sa.values = a
        sb = sa.copy()
        sb.values = b
        l1 = np.abs(a - b).sum() * (1.0 / 400)
        gap = abs(observe(demo_controller, sa) - observe(demo_controller, sb))
        assert gap <= l1 / (2 * demo_controller.delta) + 1e-12


def test_left_boundary_value_range(burgers, demo_controller, rng):
    base = stationary_shock(1.0, 400, 0.4, 0.5, burgers)
    for _ in range(20):
        state = base.copy()
        state.values = rng.uniform(-2.0, 2.0, 400)
        datum = left_boundary_value(demo_controller, state)
        assert demo_controller.u_l - demo_controller.eps <= datum
        assert datum <= demo_controller.u_l + demo_controller.eps


def test_left_boundary_value_cases(burgers, demo_controller):
    target = stationary_shock(1.0, 400, 0.4, 0.5, burgers)
    assert left_boundary_value(demo_controller, target) == demo_controller.u_l
    # shock too far right: datum pulled below u_l to stall/reverse the jump
    right = shifted_shock(1.0, 400, 0.75, 0.5, burgers)
    expected = demo_controller.u_l - demo_controller.eps * min(1.0, 1.0 / demo_controller.nu)
    assert left_boundary_value(demo_controller, right) == pytest.approx(expected, abs=1e-12)
    # shock far left with nu above the half jump: linear branch pushes above u_l
    left = shifted_shock(1.0, 400, 0.25, 0.5, burgers)
    expected = demo_controller.u_l + demo_controller.eps * 2.0 / (2.0 * demo_controller.nu)
    assert left_boundary_value(demo_controller, left) == pytest.approx(expected, abs=1e-12)


def test_window_must_fit_in_domain(burgers):
    with pytest.raises(StateError):
        make_controller(burgers, 1.0, 0.95, 0.1, 0.01, 1.2, 0.5)


def test_mesh_too_coarse(burgers, demo_controller):
    state = stationary_shock(1.0, 8, 0.4, 0.5, burgers)
    with pytest.raises(MeshTooCoarse):
        observe(demo_controller, state)
