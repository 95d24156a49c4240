import numpy as np
import pytest

from shockloop import (
    GridState,
    PerturbationSpec,
    perturbed_shock,
    shifted_shock,
    shock_state_pair,
    stationary_shock,
    step,
)
from shockloop.errors import BadPosition, OutOfRange, StateError
from shockloop.states import total_variation


def test_shock_on_cell_edge(burgers):
    st = stationary_shock(1.0, 4, 0.5, 0.5, burgers)
    assert np.array_equal(st.values, [1.0, 1.0, -1.0, -1.0])


def test_shock_mid_cell_average(burgers):
    st = stationary_shock(1.0, 4, 0.375, 0.5, burgers)
    # cell [0.25, 0.5) holds half u_l, half u_r
    assert st.values[1] == pytest.approx(0.0, abs=1e-15)
    assert np.array_equal(st.values[[0, 2, 3]], [1.0, -1.0, -1.0])


def test_shifted_matches_stationary(burgers):
    a = shifted_shock(1.0, 64, 0.3, 0.5, burgers)
    b = stationary_shock(1.0, 64, 0.3, 0.5, burgers)
    assert np.array_equal(a.values, b.values)


def test_bad_position_raises(burgers):
    with pytest.raises(BadPosition):
        stationary_shock(1.0, 8, 1.5, 0.5, burgers)


def test_mass_is_exact(burgers):
    u_l, u_r = shock_state_pair(burgers, 0.5)
    for alpha in (0.3, 0.437, 0.62):
        st = stationary_shock(1.0, 50, alpha, 0.5, burgers)
        mass = st.values.sum() * st.dx
        assert mass == pytest.approx(alpha * u_l + (1 - alpha) * u_r, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 0.437])
def test_discrete_shock_is_godunov_fixed_point(burgers, alpha):
    u_l, u_r = shock_state_pair(burgers, 0.5)
    st = stationary_shock(1.0, 40, alpha, 0.5, burgers)
    advanced = step(st, u_l, u_r, burgers, cfl=0.5)
    assert np.max(np.abs(advanced.values - st.values)) <= 1e-14


def test_perturbation_zero_amplitude_is_identity(burgers):
    base = stationary_shock(1.0, 32, 0.4, 0.5, burgers)
    out = perturbed_shock(base, PerturbationSpec(0.0), burgers)
    assert np.array_equal(out.values, base.values)


def test_sine_perturbation_exact_cell_averages(burgers):
    base = GridState(2.0, np.ones(16))
    spec = PerturbationSpec(0.1, wavenumber=2)
    out = perturbed_shock(base, spec, burgers)
    # dense midpoint quadrature as the independent average
    for i in range(16):
        a, b = base.edges()[i], base.edges()[i + 1]
        xs = np.linspace(a, b, 20001)
        mids = 0.5 * (xs[:-1] + xs[1:])
        ref = 1.0 + 0.1 * np.mean(np.sin(4.0 * np.pi * mids / 2.0))
        assert out.values[i] == pytest.approx(ref, abs=1e-9)


def test_seeded_perturbation_reproducible(burgers):
    base = stationary_shock(1.0, 64, 0.4, 0.5, burgers)
    spec = PerturbationSpec(0.2, seed=42)
    a = perturbed_shock(base, spec, burgers)
    b = perturbed_shock(base, spec, burgers)
    assert np.array_equal(a.values, b.values)
    assert total_variation(a) < np.inf


def test_perturbation_clipping_is_an_error(burgers):
    base = stationary_shock(1.0, 32, 0.4, 0.5, burgers)
    with pytest.raises(OutOfRange):
        perturbed_shock(base, PerturbationSpec(5.0, wavenumber=1), burgers)


def test_perturbation_spec_requires_one_generator():
    with pytest.raises(StateError):
        PerturbationSpec(0.1)
    with pytest.raises(StateError):
        PerturbationSpec(0.1, wavenumber=1, seed=2)


def test_grid_state_minimum_cells():
    with pytest.raises(StateError):
        GridState(1.0, np.ones(3))


def test_total_variation_of_shock(burgers):
    st = stationary_shock(1.0, 64, 0.5, 0.5, burgers)
    assert total_variation(st) == pytest.approx(2.0, abs=1e-12)
