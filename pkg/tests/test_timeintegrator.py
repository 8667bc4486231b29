import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgl1d.errors import NonPhysical
from cgl1d.eigensystem import wave_speeds
from cgl1d.state import DP, prim_to_cons_grid
from cgl1d.timeintegrator import (IMEX_B, IMEX_B_EXPLICIT, IMEX_EXPLICIT, IMEX_GAMMA, IMEX_IMPLICIT, StepControl,
                                  accuracy_dt_rule, compute_dt, imex_rk3_step, max_signal_speed,
                                  relaxation_stability, ssprk3_step)

from conftest import SQRT4PI


def integrate(step, U0, t_end, nsteps):
    U = U0.copy()
    dt = t_end / nsteps
    for _ in range(nsteps):
        U = step(U, dt)
    return U


def rates(errs):
    return [math.log2(a / b) for a, b in zip(errs, errs[1:])]


class TestTableaux:
    c = IMEX_EXPLICIT.sum(axis=1)

    def test_abscissae_agree(self):
        np.testing.assert_allclose(IMEX_IMPLICIT.sum(axis=1), self.c, atol=1e-15)

    @pytest.mark.parametrize("A,b", [(IMEX_EXPLICIT, IMEX_B_EXPLICIT), (IMEX_IMPLICIT, IMEX_B)])
    def test_third_order_conditions(self, A, b):
        c = self.c
        assert b.sum() == pytest.approx(1.0, abs=1e-15)
        assert b @ c == pytest.approx(0.5, abs=1e-15)
        assert b @ c ** 2 == pytest.approx(1 / 3, abs=1e-15)
        assert b @ A @ c == pytest.approx(1 / 6, abs=1e-15)

    def test_coupling_conditions(self):
        c = self.c
        assert IMEX_B @ IMEX_EXPLICIT @ c == pytest.approx(1 / 6, abs=1e-15)
        assert IMEX_B_EXPLICIT @ IMEX_IMPLICIT @ c == pytest.approx(1 / 6, abs=1e-15)

    def test_explicit_is_strictly_lower(self):
        assert np.all(np.triu(IMEX_EXPLICIT) == 0.0)

    def test_stiffly_accurate(self):
        np.testing.assert_array_equal(IMEX_IMPLICIT[-1], IMEX_B)
        assert np.all(np.diag(IMEX_IMPLICIT)[1:] == IMEX_GAMMA)

    def test_gamma_root(self):
        g = IMEX_GAMMA
        assert abs(24 * g ** 3 - 36 * g ** 2 + 12 * g - 1) < 1e-15
        assert 0.30 < g < 0.31


class TestStability:
    def test_l_stable(self):
        for z in (-1e3, -1e5, -1e8):
            assert abs(relaxation_stability(z)) < 10.0 / abs(z)
        assert abs(relaxation_stability(-1e5)) == pytest.approx(2e-9, rel=0.5)

    def test_consistent(self):
        z = -1e-3
        assert relaxation_stability(z) == pytest.approx(math.exp(z), abs=1e-11)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(-50, 0), st.floats(-50, 50))
    def test_a_stable(self, re, im):
        assert abs(relaxation_stability(complex(re, im))) <= 1.0 + 1e-12


def relax_only(U):
    return np.zeros_like(U)


class TestConvergence:
    def test_ssprk3_third_order(self):
        U0 = np.ones((1, 8))
        errs = [np.abs(integrate(lambda U, dt: ssprk3_step(U, dt, lambda V: -V), U0, 1.0, n) - math.exp(-1)).max()
                for n in (10, 20, 40)]
        assert min(rates(errs)) > 2.9

    def test_relaxation_third_order(self):
        # dp' = -dp / tau with tau = 1 over [0, 1]
        U0 = np.zeros((1, 8))
        U0[0, DP] = 1.0
        errs = []
        for n in (10, 20, 40, 80):
            U = integrate(lambda U, dt: imex_rk3_step(U, dt, relax_only, 1.0), U0, 1.0, n)
            errs.append(abs(U[0, DP] - math.exp(-1.0)))
        assert min(rates(errs)) > 2.8

    def test_coupled_third_order(self):
        # y' = -y explicit; dp' = y - dp / tau with tau = 1/2: dp = exp(-t) - exp(-2t)
        def L(U):
            out = np.zeros_like(U)
            out[:, 0] = -U[:, 0]
            out[:, DP] = U[:, 0]
            return out

        U0 = np.zeros((1, 8))
        U0[0, 0] = 1.0
        exact = math.exp(-1) - math.exp(-2)
        errs = [abs(integrate(lambda U, dt: imex_rk3_step(U, dt, L, 0.5), U0, 1.0, n)[0, DP] - exact)
                for n in (10, 20, 40, 80)]
        assert min(rates(errs)) > 2.8


class TestStiffLimit:
    def test_anisotropy_damped(self):
        U = np.zeros((3, 8))
        U[:, DP] = [0.5, -1.0, 2.0]
        # dt / tau = 1e5: one step damps by about 2e-9
        out = imex_rk3_step(U, 1e-3, relax_only, 1e-8)
        assert np.all(np.abs(out[:, DP]) < 5e-9 * np.abs(U[:, DP]))

    @pytest.mark.parametrize("tau", [1e-8, 1e-3, 1.0])
    def test_steady_state_preserved(self, tau):
        # dp' = G - dp / tau has the steady state dp = tau G
        G = np.array([0.3, -2.0, 5.0])

        def L(U):
            out = np.zeros_like(U)
            out[:, DP] = G
            return out

        U = np.zeros((3, 8))
        U[:, DP] = tau * G
        for dt in (1e-4, 0.1):
            out = imex_rk3_step(U, dt, L, tau)
            np.testing.assert_allclose(out[:, DP], tau * G, rtol=1e-12)

    def test_other_components_untouched(self):
        U = np.arange(16, dtype=float).reshape(2, 8)
        out = imex_rk3_step(U, 0.1, relax_only, 1e-6)
        mask = np.arange(8) != DP
        np.testing.assert_array_equal(out[:, mask], U[:, mask])


class TestSourceOff:
    def test_matches_ssprk3(self):
        rng = np.random.default_rng(0)
        U0 = rng.normal(size=(5, 8))
        M = rng.normal(size=(8, 8)) * 0.3

        def L(U):
            return U @ M.T

        a = ssprk3_step(U0, 0.2, L)
        b = imex_rk3_step(U0, 0.2, L, None)
        np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-14)

    def test_three_rhs_evaluations(self):
        calls = []

        def L(U):
            calls.append(1)
            return np.zeros_like(U)

        imex_rk3_step(np.zeros((2, 8)), 0.1, L, 1.0)
        assert len(calls) == 3

    def test_bad_tau(self):
        with pytest.raises(ValueError):
            imex_rk3_step(np.zeros((2, 8)), 0.1, relax_only, 0.0)


class TestStepSize:
    Bx = SQRT4PI

    def uniform(self, ux=0.5):
        w = np.array([1.0, ux, 0, 0, 1.0, 1.0, 0.0, 0.0])
        return w, prim_to_cons_grid(np.tile(w, (10, 1)), self.Bx)

    def test_cfl_step(self):
        w, U = self.uniform()
        cf = wave_speeds(w, self.Bx).cf
        assert compute_dt(U, self.Bx, 0.01, 0.4) == pytest.approx(0.4 * 0.01 / (0.5 + cf), rel=1e-14)

    def test_clipped_at_end(self):
        _, U = self.uniform()
        assert compute_dt(U, self.Bx, 0.01, 0.4, t=0.999, t_end=0.9995) == pytest.approx(5e-4)

    def test_unphysical_zone(self):
        _, U = self.uniform()
        U[6, 0] = -1.0
        with pytest.raises(NonPhysical) as exc:
            max_signal_speed(U, self.Bx)
        assert exc.value.index == 6

    @pytest.mark.parametrize("order,factor", [(3, 0.5), (5, 0.5 ** (5 / 3)), (7, 0.5 ** (7 / 3))])
    def test_accuracy_rule(self, order, factor):
        assert accuracy_dt_rule(0, 0.1, order) == 0.1
        assert accuracy_dt_rule(2, 0.1, order) == pytest.approx(0.1 * factor ** 2, rel=1e-14)

    def test_accuracy_rule_bad_order(self):
        with pytest.raises(ValueError):
            accuracy_dt_rule(1, 0.1, 4)

    @pytest.mark.parametrize("cfl", [0.0, -0.1, 1.5])
    def test_step_control_validation(self, cfl):
        with pytest.raises(ValueError):
            StepControl(cfl=cfl, t=0.0, t_end=1.0)
