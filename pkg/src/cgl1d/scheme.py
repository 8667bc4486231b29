"""Semi-discrete AFD-WENO right-hand side at orders 3, 5 and 7.

For zone ``i`` with faces ``i-1/2`` and ``i+1/2`` the update is

    dU_i/dt = -1/dx [ D-_{i+1/2} + D+_{i-1/2} ]
              -1/dx [ F(U^-_{i+1/2}) - F(U^+_{i-1/2}) + G_{i+1/2} - G_{i-1/2} ]
              -1/dx C(U_i) [ U^-_{i+1/2} - U^+_{i-1/2} + H_{i+1/2} - H_{i-1/2} ]

where ``U^-_{i+1/2}`` and ``U^+_{i-1/2}`` are characteristic WENO-AO face
values from zone ``i``, ``D-``/``D+`` are the Riemann-solver fluctuations, and
``G``/``H`` are the even-derivative corrections of the zone-centred fluxes and
states at a face:

    G = -d2/24 + 7 d4/5760 - 31 d6/967680      (dk = dx^k d^k/dx^k)

Order 3 keeps only the ``d2`` term, order 5 adds ``d4``, order 7 adds ``d6``.

The arrays handed to the kernel carry ``NGHOST`` ghost zones on each side.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .eigensystem import FLAG_ILLCOND, FLAG_OUTSIDE, FLAG_SINGULAR, eigendecomp_cons_nb, wave_speeds_nb
from .errors import NonPhysical
from .riemann import (FACE_SCRATCH_ROWS, HLLI_FALLBACK, STAR_NODE_FAILED, compression_ramp_nb, shock_detector_nb,
                      solve_face_nb)
from .state import NVAR, OK, cons_to_prim_nb, flux_nb, noncons_row_nb
from .weno import ao_batch_nb, derivative_tables, point_tables

NGHOST = 4

C2 = -1.0 / 24.0
C4 = 7.0 / 5760.0
C6 = -31.0 / 967680.0

# indices into the statistics counter array
STAT_OUTSIDE_OMEGA = 0
STAT_FLATTENED = 1
STAT_POSITIVITY_FALLBACK = 2
STAT_HLLI_FALLBACK = 3
STAT_CHAR_FALLBACK = 4
STAT_STAR_FAILED = 5
NSTATS = 6
STAT_NAMES = ("outside_omega", "flattened_zones", "positivity_fallbacks", "hlli_fallbacks",
              "componentwise_fallbacks", "star_state_failures")

# kernel return codes
RHS_OK = 0
RHS_BAD_ZONE = 1


@dataclass
class SchemeConfig:
    order: int = 5
    solver: str = "hll"
    flattener: bool = True

    def __post_init__(self):
        if self.order not in (3, 5, 7):
            raise ValueError(f"order must be 3, 5 or 7, got {self.order}")
        self.solver = self.solver.lower()
        if self.solver not in ("hll", "hlli"):
            raise ValueError(f"solver must be 'hll' or 'hlli', got {self.solver!r}")


@dataclass
class RunStats:
    """Counters accumulated over a run (see ``STAT_NAMES``)."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros(NSTATS, dtype=np.int64))
    rhs_evaluations: int = 0

    def as_dict(self):
        d = {name: int(v) for name, v in zip(STAT_NAMES, self.counts)}
        d["rhs_evaluations"] = self.rhs_evaluations
        return d


# ---------------------------------------------------------------------------
# kernel
# ---------------------------------------------------------------------------


@njit(cache=True)
def _face_values(U, W, i0, nz, s, Bx, PE, PC, PS, PG, PM, Um, Up, stats, g, n):
    """Characteristic WENO-AO face values of zones ``i0 .. i0+nz-1``.

    Each zone's stencil is projected onto the left eigenvectors of that zone,
    all characteristic windows are interpolated in one batch, and the results
    are mapped back with the right eigenvectors. Zones whose eigenvector
    matrix is unusable fall back to componentwise interpolation (identity
    projection).
    """
    m = 2 * s + 1
    Rz = np.empty((nz, NVAR, NVAR))
    Lz = np.empty((nz, NVAR, NVAR))
    lam = np.empty(NVAR)
    work = np.empty((NVAR, 2 * NVAR))
    for z in range(nz):
        i = i0 + z
        flags = eigendecomp_cons_nb(W[i], Bx, lam, Rz[z], Lz[z], work)
        interior = g <= i < g + n
        if interior and (flags & FLAG_OUTSIDE):
            stats[STAT_OUTSIDE_OMEGA] += 1
        if flags & (FLAG_ILLCOND | FLAG_SINGULAR):
            if interior:
                stats[STAT_CHAR_FALLBACK] += 1
            for a in range(NVAR):
                for b in range(NVAR):
                    v = 1.0 if a == b else 0.0
                    Rz[z, a, b] = v
                    Lz[z, a, b] = v
    chw = np.empty((NVAR, m, nz))
    for z in range(nz):
        i = i0 + z
        for j in range(m):
            row = U[i - s + j]
            for k in range(NVAR):
                t = 0.0
                for v in range(NVAR):
                    t += Lz[z, k, v] * row[v]
                chw[k, j, z] = t
    cfc = np.empty((NVAR, 2, nz))
    ws = np.empty((2 * PE.shape[0] + 1, nz))
    for k in range(NVAR):
        ao_batch_nb(chw[k], PE, PC, PS, PG, PM, False, cfc[k], ws)
    for z in range(nz):
        i = i0 + z
        for v in range(NVAR):
            a = 0.0
            b = 0.0
            for k in range(NVAR):
                a += Rz[z, v, k] * cfc[k, 0, z]
                b += Rz[z, v, k] * cfc[k, 1, z]
            Um[i, v] = a
            Up[i, v] = b


@njit(cache=True)
def _derivative_corrections(A, ncomp, j0, nf, s, order, DE, DC, DS, DG, DM, G):
    """``G[k, v]`` = even-derivative correction of column ``v < ncomp`` of ``A``
    at the faces ``k = 0..nf-1`` (face ``k`` has its window starting at row
    ``j0 + k``)."""
    mwin = 2 * s + 2
    Fw = np.empty((mwin, nf))
    d = np.empty((3, nf))
    ws = np.empty((2 * DE.shape[0] + 1, nf))
    for v in range(ncomp):
        for j in range(mwin):
            for k in range(nf):
                Fw[j, k] = A[j0 + j + k, v]
        ao_batch_nb(Fw, DE, DC, DS, DG, DM, False, d, ws)
        for k in range(nf):
            c = C2 * d[0, k]
            if order >= 5:
                c += C4 * d[1, k]
            if order >= 7:
                c += C6 * d[2, k]
            G[k, v] = c


@njit(cache=True)
def rhs_kernel(U, Bx, dx, order, hlli, flatten, PE, PC, PS, PG, PM, DE, DC, DS, DG, DM, out, stats):
    """Evaluate the RHS for the interior of ghost-padded ``U``.

    Returns ``(code, zone)``; ``code != 0`` means zone ``zone`` (interior
    index) is unphysical.
    """
    ntot = U.shape[0]
    g = NGHOST
    n = ntot - 2 * g
    s = (order - 1) // 2
    W = np.empty_like(U)
    F = np.empty_like(U)
    for i in range(ntot):
        st = cons_to_prim_nb(U[i], Bx, W[i])
        if st != OK:
            if g <= i < g + n:
                return RHS_BAD_ZONE, i - g
            return RHS_BAD_ZONE, (0 if i < g else n - 1)
        flux_nb(W[i], Bx, F[i])

    # zone-centred profiles for the detectors
    ux = np.empty(ntot)
    pth = np.empty(ntot)
    cf = np.empty(ntot)
    for i in range(ntot):
        ca, cs, c, fl = wave_speeds_nb(W[i], Bx)
        ux[i] = W[i, 1]
        pth[i] = (W[i, 4] + 2.0 * W[i, 5]) / 3.0
        cf[i] = c

    # face values of zones g-1 .. g+n
    Um = np.zeros_like(U)  # value at the zone's left face
    Up = np.zeros_like(U)  # value at the zone's right face
    _face_values(U, W, g - 1, n + 2, s, Bx, PE, PC, PS, PG, PM, Um, Up, stats, g, n)
    for i in range(g - 1, g + n + 1):
        if flatten:
            eta = compression_ramp_nb(_min_jump(ux, i - 2, i + 2), _min_of(cf, i - 1, i + 1))
            if eta < 1.0:
                if g <= i < g + n:
                    stats[STAT_FLATTENED] += 1
                for v in range(NVAR):
                    Um[i, v] = eta * Um[i, v] + (1.0 - eta) * U[i, v]
                    Up[i, v] = eta * Up[i, v] + (1.0 - eta) * U[i, v]

    # positivity fallback on face states
    Wm = np.empty_like(U)
    Wp = np.empty_like(U)
    for i in range(g - 1, g + n + 1):
        ok = cons_to_prim_nb(Um[i], Bx, Wm[i]) == OK and cons_to_prim_nb(Up[i], Bx, Wp[i]) == OK
        if not ok:
            if g <= i < g + n:
                stats[STAT_POSITIVITY_FALLBACK] += 1
            for v in range(NVAR):
                Um[i, v] = U[i, v]
                Up[i, v] = U[i, v]
                Wm[i, v] = W[i, v]
                Wp[i, v] = W[i, v]

    # Riemann problems at faces k = 0..n (between zones g+k-1 and g+k)
    nf = n + 1
    R = np.empty((NVAR, NVAR))
    L = np.empty((NVAR, NVAR))
    work = np.empty((NVAR, 2 * NVAR))
    vs = np.empty((FACE_SCRATCH_ROWS, NVAR))
    Dm = np.empty((nf, NVAR))
    Dp = np.empty((nf, NVAR))
    FLm = np.empty(NVAR)
    FRp = np.empty(NVAR)
    ustar = np.empty(NVAR)
    dm = np.empty(NVAR)
    dpl = np.empty(NVAR)
    for k in range(nf):
        jl = g + k - 1
        jr = g + k
        flux_nb(Wp[jl], Bx, FLm)
        flux_nb(Wm[jr], Bx, FRp)
        psi = 0.0
        if hlli:
            psi = shock_detector_nb(ux, pth, cf, jl - 1, jr + 1)
        st = solve_face_nb(Up[jl], Um[jr], Wp[jl], Wm[jr], FLm, FRp, Bx, hlli, psi, dm, dpl, ustar,
                           vs, R, L, work)
        if st & STAR_NODE_FAILED:
            stats[STAT_STAR_FAILED] += 1
        if st & HLLI_FALLBACK:
            stats[STAT_HLLI_FALLBACK] += 1
        for v in range(NVAR):
            Dm[k, v] = dm[v]
            Dp[k, v] = dpl[v]

    # even-derivative corrections at faces (componentwise); only the first
    # four components of U enter C(U) dU
    GF = np.empty((nf, NVAR))
    GU = np.zeros((nf, NVAR))
    _derivative_corrections(F, NVAR, g - 1 - s, nf, s, order, DE, DC, DS, DG, DM, GF)
    _derivative_corrections(U, 4, g - 1 - s, nf, s, order, DE, DC, DS, DG, DM, GU)

    # assemble
    Fm = np.empty(NVAR)
    Fp = np.empty(NVAR)
    row = np.empty(4)
    inv = 1.0 / dx
    for i in range(n):
        z = g + i
        flux_nb(Wm[z], Bx, Fm)
        flux_nb(Wp[z], Bx, Fp)
        for v in range(NVAR):
            out[i, v] = -inv * (Dm[i + 1, v] + Dp[i, v] + Fp[v] - Fm[v] + GF[i + 1, v] - GF[i, v])
        noncons_row_nb(W[z], Bx, row)
        jump = 0.0
        for v in range(4):
            jump += row[v] * (Up[z, v] - Um[z, v] + GU[i + 1, v] - GU[i, v])
        out[i, 4] -= inv * jump
    return RHS_OK, -1


@njit(cache=True, inline="always")
def _min_jump(a, j0, j1):
    m = 0.0
    for j in range(j0, j1):
        t = a[j + 1] - a[j]
        if t < m:
            m = t
    return m


@njit(cache=True, inline="always")
def _min_of(a, j0, j1):
    m = a[j0]
    for j in range(j0 + 1, j1 + 1):
        if a[j] < m:
            m = a[j]
    return m


@njit(cache=True)
def flattener_kernel(U, Bx):
    """Per-zone flattening factor for the interior of ghost-padded ``U``."""
    ntot = U.shape[0]
    g = NGHOST
    n = ntot - 2 * g
    W = np.empty(NVAR)
    ux = np.empty(ntot)
    cf = np.empty(ntot)
    for i in range(ntot):
        cons_to_prim_nb(U[i], Bx, W)
        ca, cs, c, fl = wave_speeds_nb(W, Bx)
        ux[i] = W[1]
        cf[i] = c
    eta = np.empty(n)
    for i in range(n):
        z = g + i
        eta[i] = compression_ramp_nb(_min_jump(ux, z - 2, z + 2), _min_of(cf, z - 1, z + 1))
    return eta


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def semidiscrete_rhs(Upad: np.ndarray, Bx: float, dx: float, cfg: SchemeConfig,
                     stats: RunStats | None = None) -> np.ndarray:
    """Time derivative of the interior zones of a ghost-padded state array.

    Parameters
    ----------
    Upad : ndarray, shape (n + 2*NGHOST, 8)
        Conserved point values with ghost zones already filled.
    Bx : float
        Normal magnetic field.
    dx : float
        Zone width.
    cfg : SchemeConfig
    stats : RunStats, optional
        Counters updated in place.

    Raises
    ------
    NonPhysical
        If a zone-centred state is unphysical (``index`` attribute set).
    """
    Upad = np.ascontiguousarray(Upad, dtype=np.float64)
    n = Upad.shape[0] - 2 * NGHOST
    out = np.empty((n, NVAR))
    counts = stats.counts if stats is not None else np.zeros(NSTATS, dtype=np.int64)
    PE, PC, PS, PG, PM = point_tables(cfg.order)
    DE, DC, DS, DG, DM = derivative_tables(cfg.order)
    code, zone = rhs_kernel(Upad, float(Bx), float(dx), cfg.order, cfg.solver == "hlli",
                            cfg.flattener, PE, PC, PS, PG, PM, DE, DC, DS, DG, DM, out,
                            counts)
    if stats is not None:
        stats.rhs_evaluations += 1
    if code != RHS_OK:
        raise NonPhysical(f"unphysical state in zone {zone}", index=int(zone))
    return out


def flatten(Upad: np.ndarray, Bx: float) -> np.ndarray:
    """Per-zone flattening factors ``eta`` in [0, 1] (1 means no flattening)."""
    return flattener_kernel(np.ascontiguousarray(Upad, dtype=np.float64), float(Bx))
