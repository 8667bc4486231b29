import math

import numpy as np
import pytest
from hypothesis import strategies as st

FOUR_PI = 4.0 * math.pi
SQRT4PI = math.sqrt(FOUR_PI)


def random_omega_state(rng, margin=0.02):
    """A random primitive state strictly inside the hyperbolicity region.

    Returns ``(w, Bx)``. ``p_par`` is drawn between the pressure limits with a
    relative ``margin`` kept away from both ends.
    """
    rho = rng.uniform(0.2, 5.0)
    u = rng.normal(size=3)
    pperp = rng.uniform(0.05, 5.0)
    Bx = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 3.0) * SQRT4PI
    By, Bz = rng.normal(size=2) * 2.0
    B2 = Bx * Bx + By * By + Bz * Bz
    pm = pperp * pperp / (6 * pperp + 3 * B2 / FOUR_PI)
    pM = B2 / FOUR_PI + pperp
    ppar = pm + (pM - pm) * rng.uniform(margin, 1 - margin)
    return np.array([rho, *u, ppar, pperp, By, Bz]), Bx


def random_omega_states(n, seed=0, margin=0.02):
    rng = np.random.default_rng(seed)
    return [random_omega_state(rng, margin) for _ in range(n)]


@st.composite
def omega_states(draw, margin=0.02):
    """Hypothesis strategy yielding ``(w, Bx)`` inside the hyperbolicity region."""
    rho = draw(st.floats(0.2, 5.0))
    u = [draw(st.floats(-2.0, 2.0)) for _ in range(3)]
    pperp = draw(st.floats(0.05, 5.0))
    Bx = draw(st.sampled_from([-1.0, 1.0])) * draw(st.floats(0.3, 3.0)) * SQRT4PI
    By = draw(st.floats(-4.0, 4.0))
    Bz = draw(st.floats(-4.0, 4.0))
    B2 = Bx * Bx + By * By + Bz * Bz
    pm = pperp * pperp / (6 * pperp + 3 * B2 / FOUR_PI)
    pM = B2 / FOUR_PI + pperp
    frac = draw(st.floats(margin, 1 - margin))
    return np.array([rho, *u, pm + (pM - pm) * frac, pperp, By, Bz]), Bx


@st.composite
def physical_states(draw):
    """Positive density and pressures, arbitrary velocity and field."""
    rho = draw(st.floats(0.05, 10.0))
    u = [draw(st.floats(-5.0, 5.0)) for _ in range(3)]
    ppar = draw(st.floats(0.01, 10.0))
    pperp = draw(st.floats(0.01, 10.0))
    By = draw(st.floats(-5.0, 5.0))
    Bz = draw(st.floats(-5.0, 5.0))
    Bx = draw(st.floats(0.1, 5.0))
    return np.array([rho, *u, ppar, pperp, By, Bz]), Bx


@pytest.fixture
def brio_wu():
    """Brio-Wu left/right primitive states and normal field."""
    wL = np.array([1.0, 0, 0, 0, 1.0, 1.0, SQRT4PI, 0])
    wR = np.array([0.125, 0, 0, 0, 0.1, 0.1, -SQRT4PI, 0])
    return wL, wR, 0.75 * SQRT4PI
