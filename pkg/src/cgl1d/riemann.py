"""Path-conservative HLL and HLLI Riemann solvers.

At a face with left state ``uL`` and right state ``uR`` the solvers return the
left-going fluctuation ``D-`` and the right-going fluctuation ``D+``. Both are
built around the intermediate state

``U* = [sR uR - sL uL - (F(uR) - F(uL))] / (sR - sL)
       - [Ct(uL, U*) (U* - uL) + Ct(U*, uR) (uR - U*)] / (sR - sL)``

where ``Ct(a, b)`` is the average of ``C`` along the straight segment from
``a`` to ``b`` (4-point Gauss-Lobatto quadrature). The equation is solved by
five fixed-point sweeps starting from the single-segment guess
``Ct(uL, uR) (uR - uL)``.

Only the anisotropy row of ``C`` is nonzero, so only the ``dp`` component of
``U*`` changes between sweeps; the other seven components equal the classical
HLL state.

HLLI adds an anti-diffusive correction built from the eigenvectors at ``U*``
that restores the intermediate (contact, Alfven, slow) waves HLL smears out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .eigensystem import FLAG_ILLCOND, FLAG_OUTSIDE, FLAG_SINGULAR, eigendecomp_cons_nb, wave_speeds_nb
from .errors import IllConditioned, NonPhysical, NotHyperbolic
from .state import DP, EIGHT_PI, NVAR, OK, _vec, cons_to_prim_nb, flux_nb

# 4-point Gauss-Lobatto rule on [0, 1]
_R5 = math.sqrt(5.0) / 10.0
LOBATTO_NODES = np.array([0.0, 0.5 - _R5, 0.5 + _R5, 1.0])
LOBATTO_WEIGHTS = np.array([1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0])

STAR_ITERATIONS = 5
FACE_SCRATCH_ROWS = 10
SPEED_UNDERFLOW = 1e-12

# shock detector thresholds
KAPPA = 0.1
PRESSURE_RATIO_GUARD = 3.0

# status values reported by the kernels
STAR_OK = 0
STAR_NODE_FAILED = 1  # an iterate produced an unphysical state on the path
SOLVER_PASSTHROUGH = 2  # sR - sL underflow; zero fluctuations
HLLI_FALLBACK = 4  # HLLI fell back to HLL


@dataclass
class SpeedBounds:
    sL: float
    sR: float


@dataclass
class FluctuationPair:
    d_minus: np.ndarray
    d_plus: np.ndarray
    u_star: np.ndarray
    iterations_used: int
    status: int = 0
    residuals: tuple = ()

    @property
    def fell_back(self) -> bool:
        return bool(self.status & HLLI_FALLBACK)


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _extreme_speeds(w, Bx):
    ca, cs, cf, flags = wave_speeds_nb(w, Bx)
    # in all sub-regions cf is the largest speed
    return w[1] - cf, w[1] + cf, flags


@njit(cache=True)
def speed_bounds_nb(uL, uR, wL, wR, Bx, um, wm):
    """Return ``(sL, sR, flags)``; ``um`` and ``wm`` are scratch vectors."""
    lo1, hi1, f1 = _extreme_speeds(wL, Bx)
    lo2, hi2, f2 = _extreme_speeds(wR, Bx)
    for j in range(NVAR):
        um[j] = 0.5 * (uL[j] + uR[j])
    st = cons_to_prim_nb(um, Bx, wm)
    flags = f1 | f2
    sL = min(lo1, lo2)
    sR = max(hi1, hi2)
    if st == OK:
        lo3, hi3, f3 = _extreme_speeds(wm, Bx)
        flags |= f3
        sL = min(sL, lo3)
        sR = max(sR, hi3)
    return sL, sR, flags


@njit(cache=True, inline="always")
def _row_at(ua, ub, xi, Bx):
    """C row at the node ``ua + xi (ub - ua)``.

    Returns ``(ok, r0, r1, r2, r3)``; ``ok`` is False when the node is
    unphysical. Works on scalars only, which keeps the fixed-point sweeps
    free of temporary arrays.
    """
    rho = ua[0] + xi * (ub[0] - ua[0])
    m1 = ua[1] + xi * (ub[1] - ua[1])
    m2 = ua[2] + xi * (ub[2] - ua[2])
    m3 = ua[3] + xi * (ub[3] - ua[3])
    dp = ua[4] + xi * (ub[4] - ua[4])
    E = ua[5] + xi * (ub[5] - ua[5])
    By = ua[6] + xi * (ub[6] - ua[6])
    Bz = ua[7] + xi * (ub[7] - ua[7])
    if not rho > 0.0:
        return False, 0.0, 0.0, 0.0, 0.0
    ux, uy, uz = m1 / rho, m2 / rho, m3 / rho
    B2 = Bx * Bx + By * By + Bz * Bz
    p = (2.0 / 3.0) * (E - 0.5 * (m1 * ux + m2 * uy + m3 * uz) - B2 / EIGHT_PI)
    ppar = p + (2.0 / 3.0) * dp
    pperp = p - dp / 3.0
    if not (ppar > 0.0 and pperp > 0.0):
        return False, 0.0, 0.0, 0.0, 0.0
    inv = 1.0 / math.sqrt(B2)
    bx, by, bz = Bx * inv, By * inv, Bz * inv
    q = (2.0 * ppar + pperp) / rho
    bu = bx * ux + by * uy + bz * uz
    return True, pperp * ux / rho - q * bu * bx, q * bx * bx - pperp / rho, q * bx * by, q * bx * bz


@njit(cache=True, inline="always")
def _segment_dot(ua, ub, ra0, ra1, ra2, ra3, rb0, rb1, rb2, rb3, Bx):
    """Lobatto average of the C row on ``ua -> ub`` dotted with ``ub - ua``.

    The endpoint rows are supplied by the caller. Returns ``(ok, value)``.
    """
    w0, w1 = LOBATTO_WEIGHTS[0], LOBATTO_WEIGHTS[1]
    ok1, p0, p1, p2, p3 = _row_at(ua, ub, LOBATTO_NODES[1], Bx)
    ok2, q0, q1, q2, q3 = _row_at(ua, ub, LOBATTO_NODES[2], Bx)
    if not (ok1 and ok2):
        return False, 0.0
    # interior weights are equal, as are the endpoint weights
    c0 = w0 * (ra0 + rb0) + w1 * (p0 + q0)
    c1 = w0 * (ra1 + rb1) + w1 * (p1 + q1)
    c2 = w0 * (ra2 + rb2) + w1 * (p2 + q2)
    c3 = w0 * (ra3 + rb3) + w1 * (p3 + q3)
    return True, (c0 * (ub[0] - ua[0]) + c1 * (ub[1] - ua[1])
                  + c2 * (ub[2] - ua[2]) + c3 * (ub[3] - ua[3]))


@njit(cache=True)
def path_row_nb(ua, ub, Bx, row):
    """Average of the nonzero row of C along the segment ua -> ub.

    Writes the 4 nonzero entries to ``row``; returns False if a quadrature
    node is unphysical.
    """
    for k in range(4):
        row[k] = 0.0
    for q in range(4):
        ok, r0, r1, r2, r3 = _row_at(ua, ub, LOBATTO_NODES[q], Bx)
        if not ok:
            return False
        wq = LOBATTO_WEIGHTS[q]
        row[0] += wq * r0
        row[1] += wq * r1
        row[2] += wq * r2
        row[3] += wq * r3
    return True


@njit(cache=True)
def hll_star_nb(uL, uR, FL, FR, sL, sR, Bx, ustar, niter, use_c, resid):
    """Fixed-point solve for U*. Returns (status, iterations performed).

    ``resid[k]`` receives |dp_{k+1} - dp_k| for each sweep; ``use_c=False``
    zeroes the non-conservative contribution (diagnostic hook).

    The C rows at ``uL`` and ``uR`` are evaluated once; the row at the current
    ``U*`` is shared by the two segments of a sweep.
    """
    inv = 1.0 / (sR - sL)
    for j in range(NVAR):
        ustar[j] = (sR * uR[j] - sL * uL[j] - (FR[j] - FL[j])) * inv
    if not use_c:
        return STAR_OK, 0
    base = ustar[DP]
    okL, a0, a1, a2, a3 = _row_at(uL, uR, 0.0, Bx)
    okR, b0, b1, b2, b3 = _row_at(uL, uR, 1.0, Bx)
    if not (okL and okR):
        return STAR_NODE_FAILED, 0
    # first iterate: single segment from uL to uR
    ok, v = _segment_dot(uL, uR, a0, a1, a2, a3, b0, b1, b2, b3, Bx)
    if not ok:
        return STAR_NODE_FAILED, 0
    ustar[DP] = base - v * inv
    done = 0
    for it in range(niter):
        okS, s0, s1, s2, s3 = _row_at(ustar, ustar, 0.0, Bx)
        if not okS:
            return STAR_NODE_FAILED, done
        okA, vA = _segment_dot(uL, ustar, a0, a1, a2, a3, s0, s1, s2, s3, Bx)
        if not okA:
            return STAR_NODE_FAILED, done
        okB, vB = _segment_dot(ustar, uR, s0, s1, s2, s3, b0, b1, b2, b3, Bx)
        if not okB:
            return STAR_NODE_FAILED, done
        new = base - (vA + vB) * inv
        if it < resid.shape[0]:
            resid[it] = abs(new - ustar[DP])
        ustar[DP] = new
        done += 1
    return STAR_OK, done


@njit(cache=True, inline="always")
def hll_from_star_nb(uL, uR, ustar, sL, sR, dm, dpl):
    """The piecewise HLL fluctuations given U*."""
    if sL >= 0.0:
        for j in range(NVAR):
            dm[j] = 0.0
            dpl[j] = sL * (ustar[j] - uL[j]) + sR * (uR[j] - ustar[j])
    elif sR <= 0.0:
        for j in range(NVAR):
            dm[j] = sL * (ustar[j] - uL[j]) + sR * (uR[j] - ustar[j])
            dpl[j] = 0.0
    else:
        for j in range(NVAR):
            dm[j] = sL * (ustar[j] - uL[j])
            dpl[j] = sR * (uR[j] - ustar[j])


@njit(cache=True)
def antidiffusion_nb(uL, uR, ustar, sL, sR, psi, Bx, phi, vs, R, L, work):
    """Anti-diffusion term at U*. Returns False when the eigensystem is unusable.

    ``vs`` (three rows of length 8), ``R``, ``L`` (8 x 8) and ``work``
    (8 x 16) are scratch arrays.
    """
    wstar, lam, a = vs[0], vs[1], vs[2]
    if cons_to_prim_nb(ustar, Bx, wstar) != OK:
        return False
    flags = eigendecomp_cons_nb(wstar, Bx, lam, R, L, work)
    if flags & (FLAG_ILLCOND | FLAG_SINGULAR | FLAG_OUTSIDE):
        return False
    for k in range(NVAR):
        s = 0.0
        for j in range(NVAR):
            s += L[k, j] * (uR[j] - uL[j])
        lk = lam[k]
        # Roe-type dissipation |lambda_k| for every field with sL <= lambda_k <= sR
        delta = 1.0 - min(lk, 0.0) / sL - max(lk, 0.0) / sR
        a[k] = s * delta
    coef = -psi * sL * sR / (sR - sL)
    for j in range(NVAR):
        s = 0.0
        for k in range(NVAR):
            s += R[j, k] * a[k]
        phi[j] = coef * s
    return True


@njit(cache=True)
def solve_face_nb(uL, uR, wL, wR, FL, FR, Bx, hlli, psi, dm, dpl, ustar, vs, R, L, work):
    """Full face solve. Returns a status bit-set (see module constants).

    Scratch: ``vs`` is (FACE_SCRATCH_ROWS, 8), ``R`` and ``L`` are 8 x 8 and
    ``work`` is 8 x 16 (see :func:`face_workspace`).
    """
    sL, sR, fl = speed_bounds_nb(uL, uR, wL, wR, Bx, vs[0], vs[1])
    scale = max(abs(sL), abs(sR))
    if not (sR - sL > SPEED_UNDERFLOW * scale) or scale == 0.0:
        for j in range(NVAR):
            dm[j] = 0.0
            dpl[j] = 0.0
            ustar[j] = 0.5 * (uL[j] + uR[j])
        return SOLVER_PASSTHROUGH
    status, _ = hll_star_nb(uL, uR, FL, FR, sL, sR, Bx, ustar, STAR_ITERATIONS, True, vs[5])
    hll_from_star_nb(uL, uR, ustar, sL, sR, dm, dpl)
    if hlli and sL < 0.0 and sR > 0.0 and psi > 0.0:
        phi = vs[6]
        if status == STAR_OK and antidiffusion_nb(uL, uR, ustar, sL, sR, psi, Bx, phi, vs[7:],
                                                  R, L, work):
            for j in range(NVAR):
                dm[j] += phi[j]
                dpl[j] -= phi[j]
        else:
            status |= HLLI_FALLBACK
    return status


@njit(cache=True)
def shock_detector_nb(ux, pth, cf, j0, j1):
    """Detector value over zones ``j0..j1`` (inclusive) of the given profiles.

    1 when the flow is smooth, 0 under strong compression or large pressure
    jumps, linear in between.
    """
    dumin = 0.0
    for j in range(j0, j1):
        d = ux[j + 1] - ux[j]
        if d < dumin:
            dumin = d
    c = cf[j0]
    pmin = pth[j0]
    pmax = pth[j0]
    for j in range(j0, j1 + 1):
        if cf[j] < c:
            c = cf[j]
        if pth[j] < pmin:
            pmin = pth[j]
        if pth[j] > pmax:
            pmax = pth[j]
    if pmax > PRESSURE_RATIO_GUARD * pmin:
        return 0.0
    return compression_ramp_nb(dumin, c)


@njit(cache=True, inline="always")
def compression_ramp_nb(dumin, c):
    kc = KAPPA * c
    if kc <= 0.0:
        return 1.0 if dumin >= 0.0 else 0.0
    v = (dumin + 2.0 * kc) / kc
    if v > 1.0:
        return 1.0
    if v < 0.0:
        return 0.0
    return v


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def face_workspace():
    """Scratch arrays ``(vs, R, L, work)`` for :func:`solve_face_nb`."""
    return (np.empty((FACE_SCRATCH_ROWS, NVAR)), np.empty((NVAR, NVAR)), np.empty((NVAR, NVAR)),
            np.empty((NVAR, 2 * NVAR)))


def _prim(u, Bx):
    w = np.empty(NVAR)
    if cons_to_prim_nb(u, float(Bx), w) != OK:
        raise NonPhysical("face state is unphysical")
    return w


def _flux(w, Bx):
    F = np.empty(NVAR)
    flux_nb(w, float(Bx), F)
    return F


def speed_bounds(wL, wR, Bx: float) -> SpeedBounds:
    """Slowest and fastest signal speeds over wL, wR and their conserved mean."""
    from .state import prim_to_cons

    wL, wR = _vec(wL), _vec(wR)
    uL, uR = prim_to_cons(wL, Bx), prim_to_cons(wR, Bx)
    sL, sR, flags = speed_bounds_nb(uL, uR, wL, wR, float(Bx), np.empty(NVAR), np.empty(NVAR))
    if flags & FLAG_OUTSIDE:
        raise NotHyperbolic("face state outside the hyperbolicity region")
    return SpeedBounds(sL, sR)


def path_integral_C(ua, ub, Bx: float) -> np.ndarray:
    """Segment average of ``C`` from ``ua`` to ``ub`` (4-point Gauss-Lobatto)."""
    ua, ub = _vec(ua), _vec(ub)
    row = np.empty(4)
    if not path_row_nb(ua, ub, float(Bx), row):
        raise NonPhysical("unphysical state on the integration path")
    C = np.zeros((NVAR, NVAR))
    C[DP, :4] = row
    return C


def hll_star_state(uL, uR, bounds: SpeedBounds, Bx: float, iterations: int = STAR_ITERATIONS,
                   noncons: bool = True):
    """Intermediate state and per-sweep residuals.

    Returns ``(u_star, residuals)``. ``noncons=False`` drops the
    non-conservative terms, giving the classical HLL state.
    """
    uL, uR = _vec(uL), _vec(uR)
    wL, wR = _prim(uL, Bx), _prim(uR, Bx)
    FL, FR = _flux(wL, Bx), _flux(wR, Bx)
    ustar = np.empty(NVAR)
    resid = np.zeros(iterations)
    status, done = hll_star_nb(uL, uR, FL, FR, bounds.sL, bounds.sR, float(Bx), ustar,
                               iterations, noncons, resid)
    if status != STAR_OK:
        raise NonPhysical("intermediate state left the physical set")
    return ustar, tuple(resid[:done])


def _fluctuations(uL, uR, Bx, hlli, psi):
    uL, uR = _vec(uL), _vec(uR)
    wL, wR = _prim(uL, Bx), _prim(uR, Bx)
    FL, FR = _flux(wL, Bx), _flux(wR, Bx)
    dm = np.empty(NVAR)
    dpl = np.empty(NVAR)
    ustar = np.empty(NVAR)
    status = solve_face_nb(uL, uR, wL, wR, FL, FR, float(Bx), hlli, float(psi), dm, dpl, ustar,
                           *face_workspace())
    if status & STAR_NODE_FAILED:
        raise NonPhysical("intermediate state left the physical set")
    return FluctuationPair(dm, dpl, ustar, STAR_ITERATIONS, int(status))


def hll_fluctuations(uL, uR, Bx: float) -> FluctuationPair:
    """HLL fluctuations ``(D-, D+)`` at a face."""
    return _fluctuations(uL, uR, Bx, False, 0.0)


def hlli_fluctuations(uL, uR, Bx: float, psi: float = 1.0, strict: bool = False) -> FluctuationPair:
    """HLLI fluctuations; falls back to HLL if the eigensystem at U* is unusable.

    With ``strict=True`` the fallback raises :class:`IllConditioned` instead.
    """
    pair = _fluctuations(uL, uR, Bx, True, psi)
    if strict and pair.fell_back:
        raise IllConditioned("eigen-decomposition at the intermediate state failed")
    return pair


def shock_detector(ux, p, cf) -> float:
    """Detector over a neighbourhood of zone-centred profiles (at least 3 zones)."""
    ux = np.ascontiguousarray(ux, dtype=np.float64)
    p = np.ascontiguousarray(p, dtype=np.float64)
    cf = np.ascontiguousarray(cf, dtype=np.float64)
    n = ux.shape[0]
    if n < 3 or p.shape[0] != n or cf.shape[0] != n:
        raise ValueError("need matching profiles of at least 3 zones")
    return float(shock_detector_nb(ux, p, cf, 0, n - 1))
