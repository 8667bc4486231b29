import mpmath
import numpy as np
import pytest
from hypothesis import given, settings

from cgl1d.errors import DegenerateField, NonPhysical
from cgl1d.state import (DP, EN, OmegaRegion, classify_omega, cons_to_prim, cons_to_prim_grid, flux,
                         noncons_matrix, prim_to_cons, prim_to_cons_grid, source)

from conftest import SQRT4PI, physical_states


class TestConversions:
    def test_brio_wu_left_energy(self, brio_wu):
        wL, _, Bx = brio_wu
        u = prim_to_cons(wL, Bx)
        assert u[EN] == pytest.approx(2.28125, abs=1e-14)
        assert u[DP] == 0.0

    def test_kinetic_term(self):
        w = np.array([2.0, 1.0, 0, 0, 1.0, 1.0, 1.0, 0])
        u = prim_to_cons(w, 1.0)
        w0 = w.copy()
        w0[1] = 0.0
        assert u[EN] - prim_to_cons(w0, 1.0)[EN] == pytest.approx(1.0, abs=1e-15)

    def test_inverse_of_brio_wu(self, brio_wu):
        wL, _, Bx = brio_wu
        w = cons_to_prim(prim_to_cons(wL, Bx), Bx)
        assert w[4] == pytest.approx(1.0, abs=1e-14)
        assert w[5] == pytest.approx(1.0, abs=1e-14)

    def test_anisotropy_split(self):
        # p = 1 (so 3p/2 = 1.5 of internal energy) and dp = 0.3
        u = np.array([1.0, 0, 0, 0, 0.3, 1.5, 0, 0])
        w = cons_to_prim(u, 0.0)
        assert w[4] == pytest.approx(1.2, abs=1e-14)
        assert w[5] == pytest.approx(0.9, abs=1e-14)

    @pytest.mark.parametrize("u", [
        [1.0, 0, 0, 0, 0, 0.01, 0, 0],     # energy below magnetic floor
        [1.0, 3.0, 0, 0, 0, 1.0, 0, 0],    # energy below kinetic floor
        [-1.0, 0, 0, 0, 0, 5.0, 0, 0],     # negative density
        [1.0, 0, 0, 0, 10.0, 3.0, 0, 0],   # p_perp < 0 from a large anisotropy
    ])
    def test_nonphysical(self, u):
        with pytest.raises(NonPhysical):
            cons_to_prim(u, 1.0)

    def test_round_trip_random(self):
        rng = np.random.default_rng(1)
        W = np.column_stack([rng.uniform(0.1, 5, 1000), rng.normal(size=(1000, 3)),
                             rng.uniform(0.05, 5, (1000, 2)), rng.normal(size=(1000, 2)) * 3])
        back = cons_to_prim_grid(prim_to_cons_grid(W, 1.7), 1.7)
        assert np.max(np.abs(back - W) / (1.0 + np.abs(W))) < 1e-13

    @settings(max_examples=300, deadline=None)
    @given(physical_states())
    def test_round_trip_property(self, state):
        w, Bx = state
        back = cons_to_prim(prim_to_cons(w, Bx), Bx)
        scale = 1.0 + np.abs(w) + np.abs(prim_to_cons(w, Bx)[EN])
        assert np.all(np.abs(back - w) <= 1e-13 * scale)

    def test_grid_reports_zone(self):
        U = prim_to_cons_grid(np.tile([1.0, 0, 0, 0, 1, 1, 0, 0], (5, 1)), 1.0)
        U[3, 0] = -1.0
        with pytest.raises(NonPhysical) as exc:
            cons_to_prim_grid(U, 1.0)
        assert exc.value.index == 3


class TestFlux:
    def test_brio_wu_momentum_flux(self, brio_wu):
        wL, _, Bx = brio_wu
        assert flux(wL, Bx)[1] == pytest.approx(1.21875, abs=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(physical_states())
    def test_static_state(self, state):
        w, Bx = state
        w = w.copy()
        w[1:4] = 0.0
        F = flux(w, Bx)
        assert F[0] == 0.0 and F[DP] == 0.0 and F[6] == 0.0 and F[7] == 0.0

    def test_induction_flux(self):
        w = np.array([1.0, 1.0, 0, 0, 1, 1, SQRT4PI, 0])
        assert flux(w, 0.75 * SQRT4PI)[6] == pytest.approx(SQRT4PI, abs=1e-15)

    def test_degenerate_field(self):
        with pytest.raises(DegenerateField):
            flux([1.0, 0, 0, 0, 1, 1, 0, 0], 0.0)


class TestNonconservative:
    def test_static_parallel_row(self):
        C = noncons_matrix([1.0, 0, 0, 0, 1, 1, 0, 0], 1.0)
        np.testing.assert_array_equal(C[DP], [0, 2, 0, 0, 0, 0, 0, 0])

    @settings(max_examples=100, deadline=None)
    @given(physical_states())
    def test_only_anisotropy_row(self, state):
        w, Bx = state
        C = noncons_matrix(w, Bx)
        mask = np.ones_like(C, dtype=bool)
        mask[DP, :4] = False
        assert np.all(C[mask] == 0.0)

    def test_entry_against_high_precision(self):
        mpmath.mp.dps = 40
        rho, ux, uy, uz, pp, pt, By, Bz = map(mpmath.mpf, ["1.3", "1", "1", "0", "1.7", "0.6", "0.4", "-0.9"])
        Bx = mpmath.mpf("1.1")
        B = mpmath.sqrt(Bx ** 2 + By ** 2 + Bz ** 2)
        bx, by, bz = Bx / B, By / B, Bz / B
        bu = bx * ux + by * uy + bz * uz
        expect = pt * ux / rho - (2 * pp + pt) * bu * bx / rho
        C = noncons_matrix([1.3, 1, 1, 0, 1.7, 0.6, 0.4, -0.9], 1.1)
        assert C[DP, 0] == pytest.approx(float(expect), rel=1e-14)


class TestSource:
    def test_isotropic(self):
        assert np.all(source([1, 0, 0, 0, 0.0, 2, 0, 0], 1e-8) == 0)

    def test_stiff_value(self):
        s = source([1, 0, 0, 0, 0.5, 2, 0, 0], 1e-8)
        assert s[DP] == pytest.approx(-5e7)
        assert np.count_nonzero(s) == 1

    def test_disabled(self):
        assert np.all(source([1, 0, 0, 0, 0.5, 2, 0, 0], None) == 0)

    def test_bad_tau(self):
        with pytest.raises(ValueError):
            source([1, 0, 0, 0, 0.5, 2, 0, 0], 0.0)


class TestOmega:
    def test_region_three(self):
        info = classify_omega([1, 0, 0, 0, 1.0, 1.0, 0, 0], SQRT4PI)
        assert info.pm == pytest.approx(1 / 9)
        assert info.pM == pytest.approx(2.0)
        assert info.region is OmegaRegion.REGION_III

    def test_outside(self):
        assert classify_omega([1, 0, 0, 0, 3.0, 1.0, 0, 0], SQRT4PI).region is OmegaRegion.OUTSIDE

    def test_lower_limit_is_region_one(self):
        pm = 1.0 / 9.0
        assert classify_omega([1, 0, 0, 0, pm, 1.0, 0, 0], SQRT4PI).region is OmegaRegion.REGION_I

    @pytest.mark.parametrize("ppar,region", [(0.3, OmegaRegion.REGION_I), (0.55, OmegaRegion.REGION_II),
                                             (1.5, OmegaRegion.REGION_III), (0.05, OmegaRegion.OUTSIDE)])
    def test_sub_intervals(self, ppar, region):
        # pm = 1/9, pM/4 = 0.5, pM/4 + 3 pm/4 = 0.5833
        assert classify_omega([1, 0, 0, 0, ppar, 1.0, 0, 0], SQRT4PI).region is region

    def test_ordering_text(self):
        assert classify_omega([1, 0, 0, 0, 1.0, 1.0, 0, 0], SQRT4PI).ordering == "ca <= cs < cf"
