import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgl1d.errors import NoExactSolution, UnknownProblem
from cgl1d.problems import (OUTFLOW, PERIODIC, PROBLEM_IDS, RIEMANN_IDS, alfven_params, apply_bc, exact_solution,
                            get_problem, init_problem, initial_omega_regions, pad, with_overrides, zone_centres)
from cgl1d.state import cons_to_prim_grid

from conftest import FOUR_PI, SQRT4PI

# left state, right state, Bx, domain, t_end
GOLDEN = {
    "rp1": ([1, 0, 0, 0, 1, 1, SQRT4PI, 0], [0.125, 0, 0, 0, 0.1, 0.1, -SQRT4PI, 0], 0.75 * SQRT4PI,
            (-1.0, 1.0), 0.2),
    "rp2": ([1.08, 1.2, 0, 0, 0.95, 0.95, 3.6, 2.0], [1, 0, 0, 0, 1, 1, 4, 2], 2.0, (-0.5, 0.5), 0.2),
    "rp3": ([1.7, 0, 0, 0, 1.7, 1.7, 3.544908, 0], [0.2, 0, 0, -1.496891, 0.2, 0.2, 2.785898, 2.192064],
            3.899398, (-0.5, 0.5), 0.15),
    "rp4": ([1, 0, 0, 0, 1, 1, SQRT4PI, 0], [0.4, 0, 0, 0, 0.4, 0.4, -SQRT4PI, 0], 1.3 * SQRT4PI,
            (-0.5, 0.5), 0.15),
    "rp5": ([1 / FOUR_PI, -1, 1, -1, 1, 1, -1, 1], [1 / FOUR_PI, -1, -1, -1, 1, 1, 1, 1], 1.0, (-0.5, 0.5), 0.1),
}


class TestRegistry:
    def test_seven_problems(self):
        assert set(PROBLEM_IDS) == {"accuracy", "alfven", "reconnection", "rp1", "rp2", "rp3", "rp4", "rp5"}

    @pytest.mark.parametrize("alias,pid", [("RP1_BrioWu", "rp1"), ("brio-wu", "rp1"), ("RP2_RyuJones", "rp2"),
                                           ("AlfvenWave", "alfven"), ("ReconnectionLayer", "reconnection"),
                                           ("Accuracy", "accuracy")])
    def test_aliases(self, alias, pid):
        assert get_problem(alias).id == pid

    def test_unknown(self):
        with pytest.raises(UnknownProblem):
            get_problem("orszag-tang")

    def test_overrides(self):
        spec = with_overrides(get_problem("rp1"), n=100, t_end=None)
        assert spec.n == 100 and spec.t_end == 0.2
        assert with_overrides(spec, tau=1e-8).tau == 1e-8
        assert with_overrides(with_overrides(spec, tau=1e-8), disable_source=True).tau is None


class TestRiemannStates:
    @pytest.mark.parametrize("pid", RIEMANN_IDS)
    def test_golden_values(self, pid):
        left, right, Bx, (xa, xb), t_end = GOLDEN[pid]
        spec = get_problem(pid)
        assert (spec.xa, spec.xb, spec.bc, spec.n, spec.t_end) == (xa, xb, OUTFLOW, 800, t_end)
        assert spec.Bx == pytest.approx(Bx, rel=1e-15)
        W = spec.init(np.array([xa, -1e-9, 1e-9, xb]))
        np.testing.assert_allclose(W[0], left, rtol=1e-15)
        np.testing.assert_allclose(W[1], left, rtol=1e-15)
        np.testing.assert_allclose(W[2], right, rtol=1e-15)
        np.testing.assert_allclose(W[3], right, rtol=1e-15)

    def test_single_jump_at_origin(self):
        g = init_problem("rp1", 100)
        jumps = np.flatnonzero(np.any(np.diff(g.U, axis=0) != 0, axis=1))
        assert jumps.tolist() == [49]


class TestAccuracy:
    def test_setup(self):
        spec = get_problem("accuracy")
        assert (spec.xa, spec.xb, spec.bc, spec.t_end) == (0.0, 1.0, PERIODIC, 2.0)
        assert spec.Bx == 1.0

    def test_quarter_point(self):
        assert exact_solution("accuracy", [0.25], 0.0)[0, 0] == pytest.approx(3.0, abs=1e-15)

    def test_fields(self):
        W = exact_solution("accuracy", np.linspace(0, 1, 9), 0.3)
        np.testing.assert_array_equal(W[:, 1:], np.tile([1.0, 0, 0, 1, 1, 1, 0], (9, 1)))

    def test_integer_periods(self):
        x = zone_centres(get_problem("accuracy"), 50)
        np.testing.assert_allclose(exact_solution("accuracy", x, 2.0), exact_solution("accuracy", x, 0.0),
                                   atol=1e-14)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 5))
    def test_travelling_wave(self, x, t):
        a = exact_solution("accuracy", [x], t)[0, 0]
        assert a == pytest.approx(2 + math.sin(2 * math.pi * (x - t)), abs=1e-12)


class TestAlfven:
    def test_parameters(self):
        prm = alfven_params()
        assert prm.deltaB == 0.1
        assert prm.epsilon == 1.0
        assert prm.Va == pytest.approx(1.0, rel=1e-15)
        assert prm.Va_star == pytest.approx(math.sqrt(prm.epsilon) * prm.Va)

    def test_walen_relation(self):
        prm = alfven_params()
        assert prm.deltaU / prm.Va == pytest.approx(SQRT4PI * prm.deltaB / get_problem("alfven").Bx, rel=1e-15)

    def test_walen_at_every_zone(self):
        g = init_problem("alfven", 64)
        W = cons_to_prim_grid(g.U, g.Bx)
        prm = alfven_params()
        # velocity and field perturbations are proportional with the Walen factor
        np.testing.assert_allclose(W[:, 2] * g.Bx / prm.Va, W[:, 6], atol=1e-14)
        np.testing.assert_allclose(W[:, 3] * g.Bx / prm.Va, W[:, 7], atol=1e-14)

    def test_initial_velocity(self):
        x = np.linspace(0, 1, 17)
        prm = alfven_params()
        np.testing.assert_allclose(exact_solution("alfven", x, 0.0)[:, 2], prm.deltaU * np.sin(prm.k * x),
                                   atol=1e-15)

    def test_constant_magnitude(self):
        W = exact_solution("alfven", np.linspace(0, 1, 33), 0.37)
        np.testing.assert_allclose(W[:, 6] ** 2 + W[:, 7] ** 2, FOUR_PI * 0.01, rtol=1e-13)

    def test_period(self):
        spec = get_problem("alfven")
        x = zone_centres(spec, 40)
        np.testing.assert_allclose(exact_solution(spec, x, spec.t_end), exact_solution(spec, x, 0.0), atol=1e-12)


class TestReconnection:
    def test_setup(self):
        spec = get_problem("reconnection")
        assert (spec.xa, spec.xb, spec.bc, spec.n, spec.t_end) == (-200.0, 200.0, OUTFLOW, 2000, 3500.0)
        assert spec.Bx == pytest.approx(0.05 * SQRT4PI)

    def test_total_pressure_balance(self):
        W = get_problem("reconnection").init(np.linspace(-20, 20, 201))
        ptot = W[:, 5] + (W[:, 6] ** 2 + W[:, 7] ** 2) / (2 * FOUR_PI)
        np.testing.assert_allclose(ptot, ptot[0], rtol=1e-14)

    def test_lobes(self):
        W = get_problem("reconnection").init(np.array([-200.0, 200.0]))
        np.testing.assert_allclose(W[:, 0], 1.0, rtol=1e-14)
        np.testing.assert_allclose(W[:, 4], 0.125, rtol=1e-14)
        assert W[0, 6] == pytest.approx(-SQRT4PI * math.cos(math.radians(30)))
        np.testing.assert_allclose(W[:, 7], SQRT4PI * 0.5)
        assert np.all(W[:, 1:4] == 0.0)

    def test_lobe_beta(self):
        # beta = 8 pi p / B0^2 with the lobe field B0 = sqrt(4 pi)
        W = get_problem("reconnection").init(np.array([150.0]))[0]
        B0sq = W[6] ** 2 + W[7] ** 2
        assert B0sq == pytest.approx(FOUR_PI, rel=1e-12)
        assert 8 * math.pi * W[4] / B0sq == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("pid", PROBLEM_IDS)
def test_initial_grid_inside_omega(pid):
    regions = initial_omega_regions(get_problem(pid), 200)
    assert np.all(regions > 0)


@pytest.mark.parametrize("pid", ["reconnection", "rp1", "rp2", "rp3", "rp4", "rp5"])
def test_no_exact_solution(pid):
    with pytest.raises(NoExactSolution):
        exact_solution(pid, [0.0], 0.0)


class TestBoundaries:
    def test_periodic(self):
        U = np.arange(40, dtype=float).reshape(5, 8)
        P = pad(U, PERIODIC, 2)
        np.testing.assert_array_equal(P[1], U[-1])
        np.testing.assert_array_equal(P[0], U[-2])
        np.testing.assert_array_equal(P[-1], U[1])

    def test_outflow(self):
        U = np.arange(40, dtype=float).reshape(5, 8)
        P = pad(U, OUTFLOW, 3)
        assert np.all(P[:3] == U[0]) and np.all(P[-3:] == U[-1])

    @pytest.mark.parametrize("bc", [PERIODIC, OUTFLOW])
    def test_free_stream(self, bc):
        U = np.tile(np.linspace(1, 2, 8), (6, 1))
        P = pad(U, bc, 4)
        assert np.all(P == U[0])

    def test_interior_untouched(self):
        U = np.random.default_rng(0).normal(size=(7, 8))
        np.testing.assert_array_equal(pad(U, OUTFLOW, 4)[4:-4], U)

    def test_unknown_bc(self):
        with pytest.raises(ValueError):
            apply_bc(np.zeros((10, 8)), "reflecting", 2)
