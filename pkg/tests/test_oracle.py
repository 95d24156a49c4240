import numpy as np
import pytest

from shockloop import SolverConfig, make_flux, run_open_loop
from shockloop.errors import OutOfRegion
from shockloop.oracle import FrontSolution, evolve, riemann_solution
from shockloop.piecewise import average_on_cells
from shockloop.states import GridState


def bisect_speed_inverse(flux, xi, lo=-4.0, hi=4.0):
    """Independent inversion of f' by plain bisection."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(flux.deriv(np.float64(mid))) < xi:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="module")
def fx():
    return make_flux("burgers", half_width=4.0)


def test_riemann_shock_rays(fx):
    assert riemann_solution(fx, 1.0, -1.0, -0.1) == 1.0
    assert riemann_solution(fx, 1.0, -1.0, 0.1) == -1.0


def test_riemann_fan_value_against_bisection(fx, cosh_flux):
    assert riemann_solution(fx, -1.0, 1.0, 0.5) == pytest.approx(0.5, abs=1e-12)
    for flux in (fx, cosh_flux):
        for xi in (-0.2, 0.1, 0.35):
            val = riemann_solution(flux, -0.6, 0.6, xi)
            assert val == pytest.approx(bisect_speed_inverse(flux, xi), abs=1e-9)


def test_riemann_equal_states(fx):
    xs = np.linspace(-2, 2, 9)
    assert np.all(riemann_solution(fx, 0.3, 0.3, xs) == 0.3)


def test_single_stationary_shock_unchanged(fx):
    out = evolve(fx, [0.0], [1.0, -1.0], 5.0, np.array([-0.5, -1e-9, 1e-9, 0.5]))
    assert np.array_equal(out, [1.0, 1.0, -1.0, -1.0])


def test_two_shock_merge_event_algebra(fx):
    # speeds 1 and -1 from +-1 meet at the origin at t = 1
    fs = FrontSolution(fx, [-1.0, 1.0], [2.0, 0.0, -2.0], t_max=3.0)
    assert len(fs.events) == 1
    ev = fs.events[0]
    assert ev.time == pytest.approx(1.0, abs=1e-14)
    assert ev.position == pytest.approx(0.0, abs=1e-14)
    assert (ev.left_state, ev.right_state_before, ev.right_state_after) == (2.0, 0.0, -2.0)
    # merged jump is stationary
    assert np.array_equal(fs.sample(2.5, [-0.1, 0.1]), [2.0, -2.0])


def test_fan_sampling_matches_self_similar_profile(fx):
    eta = 1e-3
    xs = np.linspace(-0.999, 0.999, 401)
    out = evolve(fx, [0.0], [-1.0, 1.0], 1.0, xs, eta=eta)
    assert np.abs(out - xs).max() <= eta


def test_fan_cell_averages_exactness(fx):
    fs = FrontSolution(fx, [0.0], [-1.0, 1.0], t_max=1.0, eta=1e-3)
    edges = np.linspace(-2.0, 2.0, 81)
    avg = fs.cell_averages(1.0, edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    exact = np.clip(mids, -1.0, 1.0)
    assert np.abs(avg - exact).max() <= 2e-3


def test_backward_characteristic_constant_region(fx):
    fs = FrontSolution(fx, [0.0], [1.0, -1.0], t_max=2.0)
    path, v = fs.backward_characteristic(1.0, -0.4, side="min")
    assert v == 1.0
    (t1, x1), (t0, x0) = path
    assert (t1, x1) == (1.0, -0.4)
    assert t0 == 0.0 and x0 == pytest.approx(-1.4, abs=1e-14)


def test_backward_characteristic_two_sides_of_shock(fx):
    fs = FrontSolution(fx, [0.0], [1.0, -1.0], t_max=2.0)
    path_min, v_min = fs.backward_characteristic(1.0, 0.0, side="min")
    path_max, v_max = fs.backward_characteristic(1.0, 0.0, side="max")
    assert v_min == 1.0 and v_max == -1.0
    assert path_min[-1] == (0.0, pytest.approx(-1.0))
    assert path_max[-1] == (0.0, pytest.approx(1.0))


def test_backward_characteristic_inside_fan(fx):
    fs = FrontSolution(fx, [0.0], [-1.0, 1.0], t_max=2.0, eta=1e-3)
    path, v = fs.backward_characteristic(1.6, 0.8, side="min")
    assert v == pytest.approx(0.5, abs=1e-12)
    assert path == [(1.6, 0.8), (0.0, 0.0)]


def test_backward_characteristics_do_not_cross(fx):
    fs = FrontSolution(fx, [-1.0, 1.0], [2.0, 0.0, -2.0], t_max=3.0)
    probes = [(-2.5, "min"), (-1.2, "min"), (0.4, "min"), (0.4, "max"), (2.4, "max")]
    t_query = 2.5
    paths = []
    for x, side in probes:
        path, _ = fs.backward_characteristic(t_query, x, side=side)
        ts = np.array([p[0] for p in path])[::-1]
        xs = np.array([p[1] for p in path])[::-1]
        paths.append((ts, xs))
    grid = np.linspace(0.0, t_query, 400)
    curves = [np.interp(grid, ts, xs) for ts, xs in paths]
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            diff = curves[i] - curves[j]
            signs = np.sign(diff[np.abs(diff) > 1e-9])
            assert np.all(signs == signs[0]) or signs.size == 0


def test_out_of_region_rejected(fx):
    fs = FrontSolution(fx, [0.0], [1.0, -1.0], t_max=1.0)
    with pytest.raises(OutOfRegion):
        fs.sample(2.0, [0.0])
    with pytest.raises(OutOfRegion):
        fs.backward_characteristic(1.5, 0.0)


def test_event_cap(fx):
    xs = np.linspace(-1, 1, 21)
    vals = np.linspace(2.0, 0.0, 22)  # staircase of merging shocks
    from shockloop.errors import TooManyEvents

    with pytest.raises(TooManyEvents):
        FrontSolution(fx, xs, vals, t_max=50.0, max_events=3)


def test_oracle_vs_solver_on_disconnected_domain(fx):
    # one shock and one fan, boundaries causally out of reach
    L, T = 4.0, 0.3
    cases = [(1.5, -0.5), (-0.5, 1.5)]
    for a, b in cases:
        exact = FrontSolution(fx, [2.0], [a, b], t_max=T)
        n = 400
        edges = np.linspace(0.0, L, n + 1)
        u0 = GridState(L, average_on_cells(edges, [2.0], [a, b]))
        traj = run_open_loop(u0, a, b, fx, SolverConfig(t_end=T, snapshot_every=T))
        err = np.abs(traj.final.values - exact.cell_averages(T, edges)).sum() * L / n
        assert err <= 1.0 * (L / n) + 2.0 * exact.eta


def test_boundary_trace_follows_left_datum(fx):
    # piecewise-constant inflow datum: away from the switch the first interior
    # cell tracks the datum (admissible-trace behavior of the scheme)
    def left(t):
        return 0.8 if t < 1.0 else 1.2

    u0 = GridState(2.0, np.full(200, 0.8))
    traj = run_open_loop(u0, left, 0.8, fx, SolverConfig(t_end=2.0))
    for t, first in zip(traj.times, traj.first_cell):
        datum = left(t)
        if abs(t - 1.0) > 0.05 and t > 0.02:
            assert first == pytest.approx(datum, abs=0.02)
        speed = float(fx.deriv(np.float64(first)))
        assert speed > 0.0
        assert 0.8 - 1e-9 <= first <= 1.2 + 1e-9
