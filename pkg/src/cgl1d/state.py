"""State vectors, equation of state, flux, non-conservative matrix and source.

Conventions
-----------
Primitive vector ``W = (rho, ux, uy, uz, p_par, p_perp, By, Bz)``.
Conserved vector ``U = (rho, rho*ux, rho*uy, rho*uz, p_par - p_perp, E, By, Bz)``.
The normal field ``Bx`` is a constant passed separately. Gaussian units are
used throughout, so magnetic pressure is ``|B|^2 / (8 pi)``.

The one-dimensional system is ``U_t + F(U)_x + C(U) U_x = S(U)`` where only the
anisotropy row (index 4) of ``C`` is nonzero.

Each public function has an ``_nb`` numba kernel twin that works on raw float
arrays and reports failures through integer status codes; the kernels are what
the scheme calls in its inner loops.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from numba import njit

from .errors import DegenerateField, NonPhysical

NVAR = 8

# conserved slots
RHO, MX, MY, MZ, DP, EN, BY, BZ = range(8)
# primitive slots (rho, By, Bz share positions with the conserved vector)
UX, UY, UZ, PPAR, PPERP = 1, 2, 3, 4, 5

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi

# status codes returned by kernels
OK = 0
BAD_RHO = 1
BAD_PPAR = 2
BAD_PPERP = 3
BAD_FIELD = 4


class OmegaRegion(IntEnum):
    """Sub-regions of the hyperbolicity set, ordered by p_par."""

    OUTSIDE = 0
    REGION_I = 1
    REGION_II = 2
    REGION_III = 3


# Expected speed ordering within each region.
SPEED_ORDERING = {
    OmegaRegion.REGION_I: "cs <= ca <= cf",
    OmegaRegion.REGION_II: "cs <= ca < cf",
    OmegaRegion.REGION_III: "ca <= cs < cf",
    OmegaRegion.OUTSIDE: "undefined",
}


@dataclass(frozen=True)
class OmegaInfo:
    region: OmegaRegion
    pm: float
    pM: float

    @property
    def ordering(self) -> str:
        return SPEED_ORDERING[self.region]


def field_floor(Bx: float) -> float:
    """Smallest |B|^2 for which the field direction is considered defined."""
    return 1e-14 * max(1.0, Bx * Bx)


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def prim_to_cons_nb(w, Bx, out):
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    out[0] = rho
    out[1] = rho * ux
    out[2] = rho * uy
    out[3] = rho * uz
    out[4] = ppar - pperp
    out[5] = (0.5 * rho * (ux * ux + uy * uy + uz * uz)
              + (Bx * Bx + By * By + Bz * Bz) / EIGHT_PI
              + 0.5 * ppar + pperp)
    out[6] = By
    out[7] = Bz


@njit(cache=True, inline="always")
def cons_to_prim_nb(u, Bx, out):
    """Invert the EOS. Returns a status code; ``out`` is filled regardless."""
    rho = u[0]
    out[0] = rho
    out[6] = u[6]
    out[7] = u[7]
    if not rho > 0.0:
        out[1] = 0.0
        out[2] = 0.0
        out[3] = 0.0
        out[4] = 0.0
        out[5] = 0.0
        return BAD_RHO
    ux = u[1] / rho
    uy = u[2] / rho
    uz = u[3] / rho
    kin = 0.5 * (u[1] * ux + u[2] * uy + u[3] * uz)
    mag = (Bx * Bx + u[6] * u[6] + u[7] * u[7]) / EIGHT_PI
    p = (2.0 / 3.0) * (u[5] - kin - mag)
    dp = u[4]
    out[1] = ux
    out[2] = uy
    out[3] = uz
    out[4] = p + (2.0 / 3.0) * dp
    out[5] = p - dp / 3.0
    if not out[4] > 0.0:
        return BAD_PPAR
    if not out[5] > 0.0:
        return BAD_PPERP
    return OK


@njit(cache=True, inline="always")
def flux_nb(w, Bx, out):
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    B2 = Bx * Bx + By * By + Bz * Bz
    dp = ppar - pperp
    bx2_dp = dp * Bx / B2  # dp * bx / |B|  (times B_j gives dp bx b_j)
    E = 0.5 * rho * (ux * ux + uy * uy + uz * uz) + B2 / EIGHT_PI + 0.5 * ppar + pperp
    udotB = ux * Bx + uy * By + uz * Bz
    out[0] = rho * ux
    out[1] = rho * ux * ux + pperp - Bx * Bx / FOUR_PI + B2 / EIGHT_PI + bx2_dp * Bx
    out[2] = rho * ux * uy - Bx * By / FOUR_PI + bx2_dp * By
    out[3] = rho * ux * uz - Bx * Bz / FOUR_PI + bx2_dp * Bz
    out[4] = dp * ux
    out[5] = ((E + pperp + B2 / EIGHT_PI) * ux - Bx * udotB / FOUR_PI
              + bx2_dp * udotB)
    out[6] = ux * By - uy * Bx
    out[7] = ux * Bz - uz * Bx


@njit(cache=True, inline="always")
def noncons_row_nb(w, Bx, out):
    """The four nonzero entries of row 4 of C(U), written to ``out[0:4]``."""
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    B2 = Bx * Bx + By * By + Bz * Bz
    inv = 1.0 / math.sqrt(B2)
    bx, by, bz = Bx * inv, By * inv, Bz * inv
    q = (2.0 * ppar + pperp) / rho
    bu = bx * ux + by * uy + bz * uz
    out[0] = pperp * ux / rho - q * bu * bx
    out[1] = q * bx * bx - pperp / rho
    out[2] = q * bx * by
    out[3] = q * bx * bz


@njit(cache=True, inline="always")
def noncons_dot_nb(w, Bx, du):
    """Return ``(C(U) du)[4]``, the only nonzero component of C(U) du."""
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    B2 = Bx * Bx + By * By + Bz * Bz
    inv = 1.0 / math.sqrt(B2)
    bx, by, bz = Bx * inv, By * inv, Bz * inv
    q = (2.0 * ppar + pperp) / rho
    bu = bx * ux + by * uy + bz * uz
    return ((pperp * ux / rho - q * bu * bx) * du[0]
            + (q * bx * bx - pperp / rho) * du[1]
            + q * bx * by * du[2]
            + q * bx * bz * du[3])


@njit(cache=True, inline="always")
def classify_omega_nb(ppar, pperp, B2):
    pm = pperp * pperp / (6.0 * pperp + 3.0 * B2 / FOUR_PI)
    pM = B2 / FOUR_PI + pperp
    if ppar < pm or ppar > pM:
        region = 0
    elif ppar <= 0.25 * pM:
        region = 1
    elif ppar <= 0.25 * pM + 0.75 * pm:
        region = 2
    else:
        region = 3
    return region, pm, pM


@njit(cache=True)
def prim_to_cons_grid_nb(W, Bx):
    n = W.shape[0]
    U = np.empty_like(W)
    for i in range(n):
        prim_to_cons_nb(W[i], Bx, U[i])
    return U


@njit(cache=True)
def cons_to_prim_grid_nb(U, Bx):
    """Convert a grid; returns (W, index of first bad zone or -1, status)."""
    n = U.shape[0]
    W = np.empty_like(U)
    bad = -1
    code = OK
    for i in range(n):
        s = cons_to_prim_nb(U[i], Bx, W[i])
        if s != OK and bad < 0:
            bad = i
            code = s
    return W, bad, code


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

_STATUS_TEXT = {
    BAD_RHO: "non-positive density",
    BAD_PPAR: "non-positive parallel pressure",
    BAD_PPERP: "non-positive perpendicular pressure",
}


def _vec(x) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (NVAR,):
        raise ValueError(f"expected a state vector of length {NVAR}, got shape {a.shape}")
    return np.ascontiguousarray(a)


def _check_field(w: np.ndarray, Bx: float) -> None:
    B2 = Bx * Bx + w[BY] ** 2 + w[BZ] ** 2
    if B2 < field_floor(Bx):
        raise DegenerateField(f"|B|^2 = {B2:.3e} is below the field floor")


def prim_to_cons(w, Bx: float) -> np.ndarray:
    """Conserved vector from primitive vector ``w`` and normal field ``Bx``."""
    w = _vec(w)
    out = np.empty(NVAR)
    prim_to_cons_nb(w, float(Bx), out)
    return out


def cons_to_prim(u, Bx: float) -> np.ndarray:
    """Primitive vector from conserved vector.

    Raises
    ------
    NonPhysical
        If the density or either recovered pressure is not positive.
    """
    u = _vec(u)
    out = np.empty(NVAR)
    status = cons_to_prim_nb(u, float(Bx), out)
    if status != OK:
        raise NonPhysical(_STATUS_TEXT[status])
    return out


def flux(w, Bx: float) -> np.ndarray:
    """Physical flux ``F`` evaluated at primitive state ``w``."""
    w = _vec(w)
    _check_field(w, Bx)
    out = np.empty(NVAR)
    flux_nb(w, float(Bx), out)
    return out


def noncons_matrix(w, Bx: float) -> np.ndarray:
    """The 8x8 matrix ``C(U)`` (only row 4 is nonzero)."""
    w = _vec(w)
    _check_field(w, Bx)
    row = np.zeros(4)
    noncons_row_nb(w, float(Bx), row)
    C = np.zeros((NVAR, NVAR))
    C[DP, :4] = row
    return C


def source(u, tau) -> np.ndarray:
    """Relaxation source; ``tau=None`` disables it.

    Only the anisotropy slot is nonzero: ``(p_perp - p_par) / tau = -dp / tau``.
    """
    u = _vec(u)
    out = np.zeros(NVAR)
    if tau is None:
        return out
    if not tau > 0:
        raise ValueError("tau must be positive (or None to disable the source)")
    out[DP] = -u[DP] / tau
    return out


def classify_omega(w, Bx: float) -> OmegaInfo:
    """Locate ``w`` in the hyperbolicity set and its three sub-regions."""
    w = _vec(w)
    B2 = Bx * Bx + w[BY] ** 2 + w[BZ] ** 2
    region, pm, pM = classify_omega_nb(w[PPAR], w[PPERP], B2)
    return OmegaInfo(OmegaRegion(region), pm, pM)


def cons_to_prim_grid(U: np.ndarray, Bx: float) -> np.ndarray:
    """Vectorised :func:`cons_to_prim` over an ``(n, 8)`` array."""
    W, bad, code = cons_to_prim_grid_nb(np.ascontiguousarray(U, dtype=np.float64), float(Bx))
    if bad >= 0:
        raise NonPhysical(f"{_STATUS_TEXT[code]} in zone {bad}", index=int(bad))
    return W


def prim_to_cons_grid(W: np.ndarray, Bx: float) -> np.ndarray:
    """Vectorised :func:`prim_to_cons` over an ``(n, 8)`` array."""
    return prim_to_cons_grid_nb(np.ascontiguousarray(W, dtype=np.float64), float(Bx))
