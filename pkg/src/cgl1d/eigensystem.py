"""Characteristic speeds and eigenvectors of the 1-D CGL system.

The quasilinear matrix ``A`` acts on primitive variables
``W = (rho, ux, uy, uz, p_par, p_perp, By, Bz)``. Its eigenvalues are

``ux - cf, ux - ca, ux - cs, ux, ux, ux + cs, ux + ca, ux + cf``

and are always returned in this positional order. That order is ascending
whenever ``cs <= ca``; in the third sub-region of the hyperbolicity set the
slow speed exceeds the Alfven speed and the order is not sorted. Keeping the
position fixed means a given column always belongs to the same wave family.

Right eigenvectors are first built in primitive space and then mapped to
conserved space with the Jacobian ``dU/dW``. Left eigenvectors are obtained by
inverting the (column-normalised) right eigenvector matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import DegenerateField, IllConditioned, NotHyperbolic
from .state import FOUR_PI, NVAR, _check_field, _vec

PI = math.pi

# flag bits reported by the kernels
FLAG_TRANSVERSE = 1  # transverse field regularisation applied
FLAG_CLAMPED = 2  # a slightly negative radicand was clamped to zero
FLAG_OUTSIDE = 4  # a radicand was clearly negative (state outside Omega)
FLAG_ILLCOND = 8  # condition estimate of R above the threshold
FLAG_SINGULAR = 16  # R could not be inverted at all

TRANSVERSE_TOL = 1e-12  # on Bt^2 / |B|^2
TRANSVERSE_FLOOR = 1e-6  # regularised |Bt| / |B|
RADICAND_TOL = 1e-12
COND_MAX = 1e12

# Column positions of the wave families
FAST_MINUS, ALFVEN_MINUS, SLOW_MINUS, ENTROPY, ANISOTROPY, SLOW_PLUS, ALFVEN_PLUS, FAST_PLUS = range(8)


@dataclass(frozen=True)
class WaveSpeeds:
    ux: float
    ca: float
    cs: float
    cf: float

    @property
    def eigenvalues(self) -> np.ndarray:
        u, ca, cs, cf = self.ux, self.ca, self.cs, self.cf
        return np.array([u - cf, u - ca, u - cs, u, u, u + cs, u + ca, u + cf])


@dataclass(frozen=True)
class EigenDecomp:
    lam: np.ndarray
    R: np.ndarray
    L: np.ndarray
    flags: int

    @property
    def transverse_regularised(self) -> bool:
        return bool(self.flags & FLAG_TRANSVERSE)

    @property
    def ill_conditioned(self) -> bool:
        return bool(self.flags & (FLAG_ILLCOND | FLAG_SINGULAR))


class Field(Enum):
    ENTROPY = "entropy"
    ANISOTROPY = "anisotropy"
    ALFVEN_PLUS = "alfven+"
    ALFVEN_MINUS = "alfven-"


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def upsilon12_nb(ppar, pperp, Bx, By, Bz):
    Bt2 = By * By + Bz * Bz
    B2 = Bx * Bx + Bt2
    Bx2 = Bx * Bx
    a1 = B2 * B2 - 16.0 * Bx2 * PI * ppar
    u1sq = (a1 * a1 + 8.0 * a1 * (Bx2 + 2.0 * Bt2) * PI * pperp
            + 16.0 * (Bx2 * Bx2 + 8.0 * Bx2 * Bt2 + 4.0 * Bt2 * Bt2) * PI * PI * pperp * pperp)
    u2 = B2 * B2 + 4.0 * PI * Bx2 * (2.0 * ppar + pperp) + Bt2 * 8.0 * PI * pperp
    return u1sq, u2


@njit(cache=True, inline="always")
def wave_speeds_nb(w, Bx):
    """Return ``(ca, cs, cf, flags)``; radicands are clamped at zero."""
    rho = w[0]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    B2 = Bx * Bx + By * By + Bz * Bz
    flags = 0
    # Alfven
    ca_scale = Bx * Bx / (FOUR_PI * rho) + abs(ppar - pperp) * Bx * Bx / (rho * B2)
    ca2 = Bx * Bx / (FOUR_PI * rho) - (ppar - pperp) * Bx * Bx / (rho * B2)
    if ca2 < 0.0:
        if ca2 < -RADICAND_TOL * ca_scale:
            flags |= FLAG_OUTSIDE
        else:
            flags |= FLAG_CLAMPED
        ca2 = 0.0
    # magnetosonic
    u1sq, u2 = upsilon12_nb(ppar, pperp, Bx, By, Bz)
    if u1sq < 0.0:
        if u1sq < -RADICAND_TOL * u2 * u2:
            flags |= FLAG_OUTSIDE
        else:
            flags |= FLAG_CLAMPED
        u1sq = 0.0
    u1 = math.sqrt(u1sq)
    denom = 8.0 * PI * rho * B2  # (2 |B| sqrt(2 pi rho))^2
    cf2 = (u2 + u1) / denom
    diff = u2 - u1
    if diff < 0.0:
        if diff < -RADICAND_TOL * u2:
            flags |= FLAG_OUTSIDE
        else:
            flags |= FLAG_CLAMPED
        diff = 0.0
    if diff < 0.1 * u2 and cf2 > 0.0:
        # u2 - u1 suffers cancellation; use (u2^2 - u1^2) / (u2 + u1) instead.
        cs2 = (u2 * u2 - u1sq) / ((u2 + u1) * denom)
        if cs2 < 0.0:
            cs2 = 0.0
    else:
        cs2 = diff / denom
    # the fast speed bounds the others; where they coincide (e.g. a parallel
    # field) round-off must not reorder them
    cf2 = max(cf2, ca2, cs2)
    return math.sqrt(ca2), math.sqrt(cs2), math.sqrt(cf2), flags


@njit(cache=True, inline="always")
def max_signal_speed_nb(w, Bx):
    ca, cs, cf, flags = wave_speeds_nb(w, Bx)
    return abs(w[1]) + cf


@njit(cache=True)
def right_eigenvectors_prim_nb(w, Bx, R):
    """Fill the primitive-space right eigenvectors (column-max normalised).

    Returns the flag bits (``FLAG_TRANSVERSE`` when the transverse field had to
    be regularised).
    """
    rho = w[0]
    ppar, pperp = w[4], w[5]
    By, Bz = w[6], w[7]
    flags = 0
    Bt2 = By * By + Bz * Bz
    B2 = Bx * Bx + Bt2
    if Bt2 < TRANSVERSE_TOL * B2:
        # b_y, b_z are undefined; use a fixed 45 degree direction with a small
        # but nonzero magnitude so the formulas stay well defined.
        bt = TRANSVERSE_FLOOR * math.sqrt(B2)
        By = bt / math.sqrt(2.0)
        Bz = bt / math.sqrt(2.0)
        Bt2 = By * By + Bz * Bz
        B2 = Bx * Bx + Bt2
        flags |= FLAG_TRANSVERSE
    Bn = math.sqrt(B2)
    bx, by, bz = Bx / Bn, By / Bn, Bz / Bn
    dp = ppar - pperp
    Bx2 = Bx * Bx

    u1sq, u2 = upsilon12_nb(ppar, pperp, Bx, By, Bz)
    if u1sq < 0.0:
        u1sq = 0.0
    u1 = math.sqrt(u1sq)
    a2 = 1.0 / (8.0 * PI * pperp * Bn)
    a3 = 1.0 / (8.0 * PI * pperp * B2)
    u3 = 4.0 * Bx2 * PI * (4.0 * ppar - pperp) - B2 * B2
    u4 = B2 * B2 - 4.0 * PI * Bx2 * (4.0 * ppar - 3.0 * pperp) + Bt2 * 8.0 * PI * pperp
    u5 = 4.0 * PI * pperp * (3.0 * Bx2 + 4.0 * Bt2) + 3.0 * B2 * B2 - 48.0 * Bx2 * PI * ppar
    u6 = B2 * B2 - 4.0 * PI * Bx2 * (4.0 * ppar - pperp) - Bt2 * 8.0 * PI * pperp
    af2 = B2 / (FOUR_PI * rho) - dp / rho
    af = math.sqrt(af2) if af2 > 0.0 else 0.0
    s = 1.0 if Bx >= 0.0 else -1.0
    r22 = 2.0 * math.sqrt(2.0)
    qf2 = (u2 + u1) / (PI * rho)
    qs2 = (u2 - u1) / (PI * rho)
    qf = math.sqrt(qf2) if qf2 > 0.0 else 0.0
    qs = math.sqrt(qs2) if qs2 > 0.0 else 0.0

    for i in range(8):
        for j in range(8):
            R[i, j] = 0.0
    # entropy
    R[0, 3] = 1.0
    # anisotropy
    R[4, 4] = (1.0 - bx * bx) * dp
    R[5, 4] = bx * bx * dp - B2 / FOUR_PI
    R[6, 4] = By
    R[7, 4] = Bz
    for k in range(2):
        sg = 1.0 if k == 1 else -1.0
        # Alfven
        ca_col = 6 if k == 1 else 1
        R[2, ca_col] = sg * bz * s * af
        R[3, ca_col] = -sg * by * s * af
        R[6, ca_col] = -Bz
        R[7, ca_col] = By
        # fast
        cf_col = 7 if k == 1 else 0
        R[0, cf_col] = a2 * bx * (u1 + u3) * rho
        R[1, cf_col] = sg * a3 * bx / r22 * (u1 + u3) * qf
        R[2, cf_col] = -sg * a3 * by / r22 * (u4 - u1) * qf
        R[3, cf_col] = -sg * a3 * bz / r22 * (u4 - u1) * qf
        R[4, cf_col] = -a2 * ppar * bx * (u5 - 3.0 * u1)
        R[5, cf_col] = -a2 * pperp * bx * (u6 - u1)
        R[6, cf_col] = Bx * By
        R[7, cf_col] = Bx * Bz
        # slow
        cs_col = 5 if k == 1 else 2
        R[0, cs_col] = a2 * bx * (u3 - u1) * rho
        R[1, cs_col] = sg * a3 * bx / r22 * (u3 - u1) * qs
        R[2, cs_col] = -sg * a3 * by / r22 * (u4 + u1) * qs
        R[3, cs_col] = -sg * a3 * bz / r22 * (u4 + u1) * qs
        R[4, cs_col] = -a2 * ppar * bx * (u5 + 3.0 * u1)
        R[5, cs_col] = -a2 * pperp * bx * (u6 + u1)
        R[6, cs_col] = Bx * By
        R[7, cs_col] = Bx * Bz
    _normalise_columns(R)
    return flags


@njit(cache=True, inline="always")
def _normalise_columns(R):
    for j in range(8):
        m = 0.0
        for i in range(8):
            a = abs(R[i, j])
            if a > m:
                m = a
        if m > 0.0:
            for i in range(8):
                R[i, j] /= m


@njit(cache=True)
def jacobian_dU_dW_nb(w, Bx, J):
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    for i in range(8):
        for j in range(8):
            J[i, j] = 0.0
    J[0, 0] = 1.0
    J[1, 0] = ux
    J[1, 1] = rho
    J[2, 0] = uy
    J[2, 2] = rho
    J[3, 0] = uz
    J[3, 3] = rho
    J[4, 4] = 1.0
    J[4, 5] = -1.0
    J[5, 0] = 0.5 * (ux * ux + uy * uy + uz * uz)
    J[5, 1] = rho * ux
    J[5, 2] = rho * uy
    J[5, 3] = rho * uz
    J[5, 4] = 0.5
    J[5, 5] = 1.0
    J[5, 6] = w[6] / FOUR_PI
    J[5, 7] = w[7] / FOUR_PI
    J[6, 6] = 1.0
    J[7, 7] = 1.0


@njit(cache=True)
def invert8_nb(A, Ainv, M):
    """Invert an 8 x 8 matrix by Gauss-Jordan elimination with partial pivoting.

    ``M`` is an (8, 16) scratch array. Returns False if ``A`` is singular.
    The fixed size (and full-width row operations) let the compiler unroll
    and vectorise the loops.
    """
    n = 8
    for i in range(n):
        for j in range(n):
            M[i, j] = A[i, j]
            M[i, n + j] = 1.0 if i == j else 0.0
    for c in range(n):
        p = c
        best = abs(M[c, c])
        for r in range(c + 1, n):
            v = abs(M[r, c])
            if v > best:
                best = v
                p = r
        if not (best > 0.0 and best < math.inf):
            return False
        if p != c:
            for j in range(2 * n):
                t = M[c, j]
                M[c, j] = M[p, j]
                M[p, j] = t
        inv = 1.0 / M[c, c]
        for j in range(2 * n):
            M[c, j] *= inv
        for r in range(n):
            if r != c:
                f = M[r, c]
                for j in range(2 * n):
                    M[r, j] -= f * M[c, j]
    for i in range(n):
        for j in range(n):
            Ainv[i, j] = M[i, n + j]
    return True


@njit(cache=True, inline="always")
def _inf_norm(A):
    m = 0.0
    for i in range(A.shape[0]):
        s = 0.0
        for j in range(A.shape[1]):
            s += abs(A[i, j])
        if s > m:
            m = s
    return m


@njit(cache=True)
def prim_to_cons_columns_nb(w, R, tmp):
    """In place ``R <- (dU/dW) R`` exploiting the sparsity of the Jacobian."""
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ke = 0.5 * (ux * ux + uy * uy + uz * uz)
    by4, bz4 = w[6] / FOUR_PI, w[7] / FOUR_PI
    for j in range(8):
        tmp[j] = (ke * R[0, j] + rho * (ux * R[1, j] + uy * R[2, j] + uz * R[3, j])
                  + 0.5 * R[4, j] + R[5, j] + by4 * R[6, j] + bz4 * R[7, j])
    for j in range(8):
        r0 = R[0, j]
        R[4, j] = R[4, j] - R[5, j]
        R[5, j] = tmp[j]
        R[1, j] = ux * r0 + rho * R[1, j]
        R[2, j] = uy * r0 + rho * R[2, j]
        R[3, j] = uz * r0 + rho * R[3, j]


@njit(cache=True)
def eigendecomp_cons_nb(w, Bx, lam, R, L, work):
    """Eigenvalues and conserved-space eigenvectors. Returns flag bits.

    ``work`` is an (8, 16) scratch array.
    """
    ca, cs, cf, flags = wave_speeds_nb(w, Bx)
    ux = w[1]
    lam[0] = ux - cf
    lam[1] = ux - ca
    lam[2] = ux - cs
    lam[3] = ux
    lam[4] = ux
    lam[5] = ux + cs
    lam[6] = ux + ca
    lam[7] = ux + cf
    flags |= right_eigenvectors_prim_nb(w, Bx, R)
    prim_to_cons_columns_nb(w, R, work[0])
    _normalise_columns(R)
    if not invert8_nb(R, L, work):
        flags |= FLAG_SINGULAR
        return flags
    cond = _inf_norm(R) * _inf_norm(L)
    if not (cond <= COND_MAX):
        flags |= FLAG_ILLCOND
    return flags


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _raise_if_outside(flags: int) -> None:
    if flags & FLAG_OUTSIDE:
        raise NotHyperbolic("state lies outside the hyperbolicity region (negative radicand)")


def wave_speeds(w, Bx: float) -> WaveSpeeds:
    """Alfven, slow and fast speeds of state ``w``.

    Raises
    ------
    NotHyperbolic
        If a radicand is negative beyond round-off (state outside Omega).
    """
    w = _vec(w)
    _check_field(w, Bx)
    ca, cs, cf, flags = wave_speeds_nb(w, float(Bx))
    _raise_if_outside(flags)
    return WaveSpeeds(float(w[1]), ca, cs, cf)


def quasilinear_matrix(w, Bx: float) -> np.ndarray:
    """The 8x8 primitive-variable matrix ``A`` with ``W_t + A W_x = S``."""
    w = _vec(w)
    _check_field(w, Bx)
    rho, ux, uy, uz, pp, pt, By, Bz = w
    B2 = Bx * Bx + By * By + Bz * Bz
    B = math.sqrt(B2)
    bx, by, bz = Bx / B, By / B, Bz / B
    dp = pp - pt
    A = np.zeros((NVAR, NVAR))
    A[0] = [ux, rho, 0, 0, 0, 0, 0, 0]
    A[1] = [0, ux, 0, 0, bx**2 / rho, (1 - bx**2) / rho,
            By / (FOUR_PI * rho) - 2 * bx**2 * by * dp / (rho * B),
            Bz / (FOUR_PI * rho) - 2 * bx**2 * bz * dp / (rho * B)]
    A[2] = [0, 0, ux, 0, bx * by / rho, -bx * by / rho,
            bx * (1 - 2 * by**2) * dp / (rho * B) - Bx / (FOUR_PI * rho),
            -2 * bx * by * bz * dp / (rho * B)]
    A[3] = [0, 0, 0, ux, bx * bz / rho, -bx * bz / rho,
            -2 * bx * by * bz * dp / (rho * B),
            bx * (1 - 2 * bz**2) * dp / (rho * B) - Bx / (FOUR_PI * rho)]
    A[4] = [0, pp * (1 + 2 * bx**2), 2 * pp * bx * by, 2 * pp * bx * bz, ux, 0, 0, 0]
    A[5] = [0, pt * (2 - bx**2), -pt * bx * by, -pt * bx * bz, 0, ux, 0, 0]
    A[6] = [0, By, -Bx, 0, 0, 0, ux, 0]
    A[7] = [0, Bz, 0, -Bx, 0, 0, 0, ux]
    return A


def right_eigenvectors_prim(w, Bx: float, return_flags: bool = False):
    """Primitive-space right eigenvectors as columns, each scaled to max-norm 1."""
    w = _vec(w)
    _check_field(w, Bx)
    R = np.empty((NVAR, NVAR))
    flags = right_eigenvectors_prim_nb(w, float(Bx), R)
    if return_flags:
        return R, flags
    return R


def jacobian_dU_dW(w, Bx: float) -> np.ndarray:
    """Analytic Jacobian of the primitive-to-conserved map."""
    w = _vec(w)
    J = np.empty((NVAR, NVAR))
    jacobian_dU_dW_nb(w, float(Bx), J)
    return J


def eigendecomp_cons(w, Bx: float) -> EigenDecomp:
    """Eigenvalues with conserved-space right/left eigenvector matrices.

    Raises
    ------
    NotHyperbolic
        If ``w`` lies outside the hyperbolicity region.
    IllConditioned
        If the right eigenvector matrix is singular or its condition
        estimate exceeds ``COND_MAX``.
    """
    w = _vec(w)
    _check_field(w, Bx)
    lam = np.empty(NVAR)
    R = np.empty((NVAR, NVAR))
    L = np.empty((NVAR, NVAR))
    flags = eigendecomp_cons_nb(w, float(Bx), lam, R, L, np.empty((NVAR, 2 * NVAR)))
    _raise_if_outside(flags)
    if flags & (FLAG_ILLCOND | FLAG_SINGULAR):
        raise IllConditioned("right eigenvector matrix is numerically singular")
    return EigenDecomp(lam, R, L, int(flags))


def alfven_speed_gradient(w, Bx: float) -> np.ndarray:
    """Analytic gradient of ``ca`` with respect to the primitive variables."""
    w = _vec(w)
    rho, _, _, _, pp, pt, By, Bz = w
    B2 = Bx * Bx + By * By + Bz * Bz
    dp = pp - pt
    ca2 = Bx * Bx / (FOUR_PI * rho) - dp * Bx * Bx / (rho * B2)
    if ca2 <= 0.0:
        raise NotHyperbolic("Alfven speed vanishes; its gradient is undefined")
    g = np.zeros(NVAR)
    g[0] = -ca2 / rho
    g[4] = -Bx * Bx / (rho * B2)
    g[5] = Bx * Bx / (rho * B2)
    g[6] = 2.0 * dp * Bx * Bx * By / (rho * B2 * B2)
    g[7] = 2.0 * dp * Bx * Bx * Bz / (rho * B2 * B2)
    return g / (2.0 * math.sqrt(ca2))


def eigenvalue_gradient(w, Bx: float, field: Field) -> np.ndarray:
    """Gradient of the eigenvalue of ``field`` with respect to ``W``."""
    g = np.zeros(NVAR)
    g[1] = 1.0
    if field is Field.ALFVEN_PLUS:
        g = g + alfven_speed_gradient(w, Bx)
    elif field is Field.ALFVEN_MINUS:
        g = g - alfven_speed_gradient(w, Bx)
    return g


_FIELD_COLUMN = {
    Field.ENTROPY: ENTROPY,
    Field.ANISOTROPY: ANISOTROPY,
    Field.ALFVEN_PLUS: ALFVEN_PLUS,
    Field.ALFVEN_MINUS: ALFVEN_MINUS,
}


def linear_degeneracy_check(w, Bx: float, field: Field | str) -> float:
    """Return ``grad(lambda) . R`` for a linearly degenerate field (should be 0)."""
    field = Field(field)
    R = right_eigenvectors_prim(w, Bx)
    return float(eigenvalue_gradient(w, Bx, field) @ R[:, _FIELD_COLUMN[field]])


__all__ = [
    "WaveSpeeds",
    "EigenDecomp",
    "Field",
    "wave_speeds",
    "quasilinear_matrix",
    "right_eigenvectors_prim",
    "jacobian_dU_dW",
    "eigendecomp_cons",
    "alfven_speed_gradient",
    "eigenvalue_gradient",
    "linear_degeneracy_check",
    "DegenerateField",
]
