"""Independent low-order oracles.

* :func:`rusanov_step` advances a grid with a second-order path-conservative
  finite-volume scheme: MinMod-limited linear reconstruction of primitive
  variables, Rusanov fluctuations and SSP-RK2. The stiff relaxation source is
  applied after every stage with the closed-form implicit update
  ``dp <- dp / (1 + dt / tau)``.
* :func:`deep_star_oracle` solves the HLL intermediate-state equation with
  many fixed-point iterations and dense composite quadrature.

Apart from the conversions in :mod:`cgl1d.state` nothing here is shared with
the high-order code path: wave speeds, path integrals and boundary handling
are implemented again from scratch, in a different algebraic form where that
is natural (the magnetosonic speeds are obtained from the sum and product of
``cf^2`` and ``cs^2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import ConfigError, NoConvergence, NonPhysical
from .state import DP, NVAR, OK, cons_to_prim_nb, flux_nb, prim_to_cons_nb

FOUR_PI = 4.0 * math.pi

DEEP_ITERATIONS = 50
DEEP_QUADRATURE_POINTS = 1000
DEEP_TOLERANCE = 1e-10

# 3-point Gauss-Legendre rule on [0, 1] for the face path integrals
_GL_NODES = np.array([0.5 - 0.5 * math.sqrt(0.6), 0.5, 0.5 + 0.5 * math.sqrt(0.6)])
_GL_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


@dataclass
class OracleConfig:
    n: int = 10000
    limiter: str = "minmod"
    solver: str = "rusanov"
    time: str = "ssp-rk2"
    cfl: float = 0.4

    def __post_init__(self):
        if self.n < 4:
            raise ConfigError("oracle needs at least 4 zones")
        if (self.limiter, self.solver, self.time) != ("minmod", "rusanov", "ssp-rk2"):
            raise ConfigError("the oracle only implements MinMod / Rusanov / SSP-RK2")
        if not 0.0 < self.cfl <= 0.5:
            raise ConfigError("oracle cfl must lie in (0, 0.5]")


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def fast_speed_nb(w, Bx):
    """Fast magnetosonic speed from ``cf^2 + cs^2 = S`` and ``cf^2 cs^2 = P``."""
    rho = w[0]
    ppar, pperp = w[4], w[5]
    Bt2 = w[6] * w[6] + w[7] * w[7]
    B2 = Bx * Bx + Bt2
    bx2 = Bx * Bx / B2
    bt2 = Bt2 / B2
    S = B2 / (FOUR_PI * rho) + (bx2 * (2.0 * ppar + pperp) + 2.0 * bt2 * pperp) / rho
    P = bx2 / (rho * rho) * (3.0 * ppar * B2 / FOUR_PI + bt2 * pperp * (6.0 * ppar - pperp)
                             + 3.0 * bx2 * ppar * (pperp - ppar))
    disc = S * S - 4.0 * P
    if disc < 0.0:
        disc = 0.0
    cf2 = 0.5 * (S + math.sqrt(disc))
    return math.sqrt(cf2) if cf2 > 0.0 else 0.0


@njit(cache=True)
def _c_row(u, Bx, w, row):
    """Row ``DP`` of C at conserved state ``u``; False if ``u`` is unphysical."""
    if cons_to_prim_nb(u, Bx, w) != OK:
        return False
    rho = w[0]
    ux, uy, uz = w[1], w[2], w[3]
    ppar, pperp = w[4], w[5]
    Bn = math.sqrt(Bx * Bx + w[6] * w[6] + w[7] * w[7])
    bx, by, bz = Bx / Bn, w[6] / Bn, w[7] / Bn
    q = (2.0 * ppar + pperp) / rho
    bu = bx * ux + by * uy + bz * uz
    row[0] = pperp * ux / rho - q * bu * bx
    row[1] = q * bx * bx - pperp / rho
    row[2] = q * bx * by
    row[3] = q * bx * bz
    return True


@njit(cache=True)
def path_dot_nb(ua, ub, Bx, npanel, nodes, weights):
    """``(int_0^1 C(ua + s (ub - ua)) ds . (ub - ua))[DP]`` by composite quadrature.

    Returns ``(ok, value)``.
    """
    u = np.empty(NVAR)
    w = np.empty(NVAR)
    row = np.empty(4)
    acc = np.zeros(4)
    h = 1.0 / npanel
    for p in range(npanel):
        for q in range(nodes.shape[0]):
            s = (p + nodes[q]) * h
            for j in range(NVAR):
                u[j] = ua[j] + s * (ub[j] - ua[j])
            if not _c_row(u, Bx, w, row):
                return False, 0.0
            for k in range(4):
                acc[k] += weights[q] * h * row[k]
    val = 0.0
    for k in range(4):
        val += acc[k] * (ub[k] - ua[k])
    return True, val


@njit(cache=True)
def _minmod(a, b):
    if a * b <= 0.0:
        return 0.0
    return a if abs(a) < abs(b) else b


@njit(cache=True)
def oracle_rhs_nb(U, Bx, dx, periodic, out):
    """Semi-discrete second-order path-conservative Rusanov residual.

    ``U`` holds the ``n`` interior zones; two ghost zones per side are built
    internally. Returns -1 on success or the index of an unphysical zone.
    """
    n = U.shape[0]
    g = 2
    Wg = np.empty((n + 2 * g, NVAR))
    for i in range(n):
        if cons_to_prim_nb(U[i], Bx, Wg[i + g]) != OK:
            return i
    for k in range(g):
        for v in range(NVAR):
            if periodic:
                Wg[k, v] = Wg[n + k, v]
                Wg[n + g + k, v] = Wg[g + k, v]
            else:
                Wg[k, v] = Wg[g, v]
                Wg[n + g + k, v] = Wg[n + g - 1, v]
    # MinMod-limited primitive face values of zones 1 .. n+2 (padded index)
    WL = np.empty((n + 2 * g, NVAR))  # left face of each zone
    WR = np.empty((n + 2 * g, NVAR))  # right face of each zone
    for i in range(1, n + 2 * g - 1):
        for v in range(NVAR):
            sl = _minmod(Wg[i, v] - Wg[i - 1, v], Wg[i + 1, v] - Wg[i, v])
            WL[i, v] = Wg[i, v] - 0.5 * sl
            WR[i, v] = Wg[i, v] + 0.5 * sl
    uL = np.empty(NVAR)
    uR = np.empty(NVAR)
    FL = np.empty(NVAR)
    FR = np.empty(NVAR)
    # fluctuations at faces between padded zones f+g-1 and f+g, f = 0..n
    Dm = np.empty((n + 1, NVAR))
    Dp = np.empty((n + 1, NVAR))
    for f in range(n + 1):
        a = f + g - 1
        b = f + g
        prim_to_cons_nb(WR[a], Bx, uL)
        prim_to_cons_nb(WL[b], Bx, uR)
        flux_nb(WR[a], Bx, FL)
        flux_nb(WL[b], Bx, FR)
        s = max(abs(WR[a, 1]) + fast_speed_nb(WR[a], Bx), abs(WL[b, 1]) + fast_speed_nb(WL[b], Bx))
        ok, cdu = path_dot_nb(uL, uR, Bx, 1, _GL_NODES, _GL_WEIGHTS)
        if not ok:
            return a - g if a >= g else 0
        for v in range(NVAR):
            jump = FR[v] - FL[v]
            if v == DP:
                jump += cdu
            du = uR[v] - uL[v]
            Dm[f, v] = 0.5 * (jump - s * du)
            Dp[f, v] = 0.5 * (jump + s * du)
    # cell update: fluctuations + flux difference + cell-interior C(U) dU
    inv = 1.0 / dx
    row = np.empty(4)
    wtmp = np.empty(NVAR)
    ui = np.empty(NVAR)
    for i in range(n):
        z = i + g
        prim_to_cons_nb(WL[z], Bx, uL)
        prim_to_cons_nb(WR[z], Bx, uR)
        flux_nb(WL[z], Bx, FL)
        flux_nb(WR[z], Bx, FR)
        for v in range(NVAR):
            out[i, v] = -inv * (Dp[i, v] + Dm[i + 1, v] + FR[v] - FL[v])
        prim_to_cons_nb(Wg[z], Bx, ui)
        _c_row(ui, Bx, wtmp, row)
        cdu = 0.0
        for k in range(4):
            cdu += row[k] * (uR[k] - uL[k])
        out[i, DP] -= inv * cdu
    return -1


@njit(cache=True)
def oracle_max_speed_nb(U, Bx):
    w = np.empty(NVAR)
    smax = 0.0
    for i in range(U.shape[0]):
        if cons_to_prim_nb(U[i], Bx, w) != OK:
            return -1.0
        s = abs(w[1]) + fast_speed_nb(w, Bx)
        if s > smax:
            smax = s
    return smax


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def _rhs(U, Bx, dx, periodic):
    out = np.empty_like(U)
    bad = oracle_rhs_nb(U, float(Bx), float(dx), periodic, out)
    if bad >= 0:
        raise NonPhysical(f"oracle: unphysical state near zone {bad}", index=int(bad))
    return out


def _relax(U, dt, tau):
    if tau is not None:
        U[:, DP] /= 1.0 + dt / tau
    return U


def rusanov_step(U: np.ndarray, dt: float, Bx: float, dx: float, periodic: bool,
                 tau: Optional[float] = None) -> np.ndarray:
    """One SSP-RK2 step of the MinMod/Rusanov oracle (interior zones only)."""
    U = np.ascontiguousarray(U, dtype=np.float64)
    u1 = _relax(U + dt * _rhs(U, Bx, dx, periodic), dt, tau)
    u2 = u1 + dt * _rhs(u1, Bx, dx, periodic)
    return _relax(0.5 * (U + u2), dt, tau)


def oracle_dt(U: np.ndarray, Bx: float, dx: float, cfl: float) -> float:
    s = oracle_max_speed_nb(np.ascontiguousarray(U, dtype=np.float64), float(Bx))
    if s < 0:
        raise NonPhysical("oracle: unphysical state")
    return cfl * dx / s


def run_oracle(problem, cfg: OracleConfig | None = None, t_end: Optional[float] = None,
               tau: Optional[float] = "default", return_steps: bool = False):
    """Run a problem with the oracle to ``t_end``; returns ``(x, U)``
    (``(x, U, steps)`` with ``return_steps``).

    ``problem`` is a problem id or :class:`~cgl1d.problems.ProblemSpec`. The
    relaxation time defaults to the problem's own; pass ``None`` to disable
    the source.
    """
    from .problems import PERIODIC, get_problem, init_problem

    cfg = cfg or OracleConfig()
    spec = get_problem(problem) if isinstance(problem, str) else problem
    grid = init_problem(spec, cfg.n)
    t_final = spec.t_end if t_end is None else float(t_end)
    tau_v = spec.tau if tau == "default" else tau
    periodic = spec.bc == PERIODIC
    U = grid.U.copy()
    t = 0.0
    steps = 0
    while t < t_final * (1.0 - 1e-14):
        dt = min(oracle_dt(U, grid.Bx, grid.dx, cfg.cfl), t_final - t)
        U = rusanov_step(U, dt, grid.Bx, grid.dx, periodic, tau_v)
        t += dt
        steps += 1
    if return_steps:
        return grid.x, U, steps
    return grid.x, U


def oracle_speed_bounds(uL, uR, Bx: float):
    """``(sL, sR)`` from ``uL``, ``uR`` and their conserved mean (oracle speeds)."""
    wL, wR, wm = np.empty(NVAR), np.empty(NVAR), np.empty(NVAR)
    um = 0.5 * (uL + uR)
    if cons_to_prim_nb(uL, Bx, wL) != OK or cons_to_prim_nb(uR, Bx, wR) != OK:
        raise NonPhysical("oracle: unphysical Riemann data")
    states = [wL, wR]
    if cons_to_prim_nb(um, Bx, wm) == OK:
        states.append(wm)
    sL = min(w[1] - fast_speed_nb(w, Bx) for w in states)
    sR = max(w[1] + fast_speed_nb(w, Bx) for w in states)
    return sL, sR


def deep_star_oracle(uL, uR, Bx: float, bounds=None, iterations: int = DEEP_ITERATIONS,
                     points: int = DEEP_QUADRATURE_POINTS, noncons: bool = True,
                     tol: float = DEEP_TOLERANCE) -> np.ndarray:
    """Intermediate HLL state solved to convergence.

    The path integrals use ``points`` Gauss-Legendre nodes (composite 3-point
    rule) on each segment and the fixed-point iteration runs ``iterations``
    sweeps. ``bounds`` may be an object with ``sL``/``sR`` attributes or a
    pair; by default the oracle's own speed estimates are used.

    Raises
    ------
    NoConvergence
        If the last sweep changed ``dp*`` by more than ``tol``.
    """
    uL = np.ascontiguousarray(uL, dtype=np.float64)
    uR = np.ascontiguousarray(uR, dtype=np.float64)
    Bx = float(Bx)
    if bounds is None:
        sL, sR = oracle_speed_bounds(uL, uR, Bx)
    elif hasattr(bounds, "sL"):
        sL, sR = bounds.sL, bounds.sR
    else:
        sL, sR = bounds
    wL, wR = np.empty(NVAR), np.empty(NVAR)
    cons_to_prim_nb(uL, Bx, wL)
    cons_to_prim_nb(uR, Bx, wR)
    FL, FR = np.empty(NVAR), np.empty(NVAR)
    flux_nb(wL, Bx, FL)
    flux_nb(wR, Bx, FR)
    base = (sR * uR - sL * uL - (FR - FL)) / (sR - sL)
    if not noncons or np.array_equal(uL, uR):
        return base
    npanel = max(1, points // _GL_NODES.size)

    def seg(a, b):
        ok, v = path_dot_nb(a, b, Bx, npanel, _GL_NODES, _GL_WEIGHTS)
        if not ok:
            raise NonPhysical("oracle: unphysical state on the integration path")
        return v

    ustar = base.copy()
    ustar[DP] = base[DP] - seg(uL, uR) / (sR - sL)
    change = math.inf
    for _ in range(iterations):
        new = base[DP] - (seg(uL, ustar) + seg(ustar, uR)) / (sR - sL)
        change = abs(new - ustar[DP])
        ustar[DP] = new
    if not change <= tol:
        raise NoConvergence(f"deep star iteration stalled (last change {change:.3e})")
    return ustar
