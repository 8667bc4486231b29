"""Time stepping: SSP-RK3, an IMEX-RK3 pair for the stiff relaxation source,
and CFL time-step control.

IMEX scheme
-----------
The relaxation source acts only on the anisotropy ``dp`` and is linear,
``d(dp)/dt = -dp / tau``. The IMEX pair below is third order, its explicit
part is exactly SSP-RK3 (so with the source switched off it reproduces
:func:`ssprk3_step` and costs three RHS evaluations per step), and its
implicit part is L-stable and globally stiffly accurate (the last stage is
the new solution). Its stability function decays like ``1/z^2`` as
``z = -dt/tau -> -inf``, so a single step with ``dt/tau = 1e5`` damps the
anisotropy by about ``2e-9``.

Explicit tableau (strictly lower triangular, stages 4 and 5 reuse stage 3)::

    0   |
    1   | 1
    1/2 | 1/4  1/4
    1   | 1/6  1/6  2/3
    1   | 1/6  1/6  2/3  0

Implicit tableau with ``g`` the root of ``24 g^3 - 36 g^2 + 12 g - 1 = 0``
near 0.3025 and ``t = -(12 g^3 - 36 g^2 + 18 g - 2) / (9 g - 3)``::

    0
    1-g          g
    (1-g)/4      (1-3g)/4     g
    1/2 - t/2    1/2-g-t/2    t     g
    1/6          1/6          2/3  -g   g

Each implicit stage is solved in closed form,
``dp = rhs / (1 + a_ii dt / tau)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numba import njit

from .eigensystem import wave_speeds_nb
from .errors import NonPhysical
from .state import DP, NVAR, OK, cons_to_prim_nb

RHS = Callable[[np.ndarray], np.ndarray]


def _imex_gamma() -> float:
    # root of 24 g^3 - 36 g^2 + 12 g - 1 in (0.25, 0.35), by Newton iteration
    g = 0.3
    for _ in range(50):
        f = ((24 * g - 36) * g + 12) * g - 1
        df = (72 * g - 72) * g + 12
        g -= f / df
    return g


IMEX_GAMMA = _imex_gamma()
IMEX_T = -(12 * IMEX_GAMMA ** 3 - 36 * IMEX_GAMMA ** 2 + 18 * IMEX_GAMMA - 2) / (9 * IMEX_GAMMA - 3)

_g, _t = IMEX_GAMMA, IMEX_T
IMEX_EXPLICIT = np.array([
    [0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0.25, 0.25, 0, 0, 0],
    [1 / 6, 1 / 6, 2 / 3, 0, 0],
    [1 / 6, 1 / 6, 2 / 3, 0, 0],
])
IMEX_IMPLICIT = np.array([
    [0, 0, 0, 0, 0],
    [1 - _g, _g, 0, 0, 0],
    [(1 - _g) / 4, (1 - 3 * _g) / 4, _g, 0, 0],
    [0.5 - _t / 2, 0.5 - _g - _t / 2, _t, _g, 0],
    [1 / 6, 1 / 6, 2 / 3, -_g, _g],
])
IMEX_B = np.array([1 / 6, 1 / 6, 2 / 3, -_g, _g])
IMEX_B_EXPLICIT = np.array([1 / 6, 1 / 6, 2 / 3, 0, 0])


@dataclass
class StepControl:
    cfl: float
    t: float
    t_end: float
    dt_rule: str = "cfl"  # "cfl" or "accuracy"
    base_n: Optional[int] = None
    order: int = 5

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")


@njit(cache=True)
def max_speed_nb(U, Bx):
    """max over zones of |ux| + cf; returns -1 if a zone is unphysical."""
    w = np.empty(NVAR)
    smax = 0.0
    for i in range(U.shape[0]):
        if cons_to_prim_nb(U[i], Bx, w) != OK:
            return -1.0 - i
        ca, cs, cf, fl = wave_speeds_nb(w, Bx)
        s = abs(w[1]) + cf
        if s > smax:
            smax = s
    return smax


def max_signal_speed(U: np.ndarray, Bx: float) -> float:
    s = max_speed_nb(np.ascontiguousarray(U, dtype=np.float64), float(Bx))
    if s < 0:
        i = int(-s - 1)
        raise NonPhysical(f"unphysical state in zone {i}", index=i)
    return s


def compute_dt(U: np.ndarray, Bx: float, dx: float, cfl: float, t: float = 0.0,
               t_end: float = math.inf) -> float:
    """CFL step ``cfl * dx / max(|ux| + cf)`` clipped so as not to pass ``t_end``."""
    dt = cfl * dx / max_signal_speed(U, Bx)
    return min(dt, t_end - t)


def accuracy_dt_rule(level: int, base_dt: float, order: int) -> float:
    """Step for mesh ``level`` (0 = coarsest) in a convergence study.

    Each mesh doubling scales the step by ``(1/2)^(order/3)`` so the third
    order time error stays below the spatial error of an ``order``-order
    scheme. At order 3 this is plain halving (a fixed CFL number).
    """
    if order not in (3, 5, 7):
        raise ValueError(f"order must be 3, 5 or 7, got {order}")
    return base_dt * 0.5 ** (level * order / 3.0)


def ssprk3_step(U: np.ndarray, dt: float, L: RHS) -> np.ndarray:
    """One step of the three-stage, third-order SSP Runge-Kutta method."""
    u1 = U + dt * L(U)
    u2 = 0.75 * U + 0.25 * (u1 + dt * L(u1))
    return U / 3.0 + 2.0 / 3.0 * (u2 + dt * L(u2))


def imex_rk3_step(U: np.ndarray, dt: float, L: RHS, tau: Optional[float]) -> np.ndarray:
    """One IMEX step; the relaxation source on ``dp`` is treated implicitly.

    ``tau=None`` switches the source off, in which case the step equals
    :func:`ssprk3_step` up to round-off.
    """
    A, Ah = IMEX_IMPLICIT, IMEX_EXPLICIT
    if tau is not None and not tau > 0:
        raise ValueError("tau must be positive")
    k = 1.0 / tau if tau is not None else 0.0
    nst = 5
    Lk = []  # explicit stage derivatives (stages 0..2)
    Sk = []  # implicit stage source values (dp slot only)
    stage = U
    for i in range(nst):
        if i == 0:
            stage = U
        else:
            stage = U.copy()
            for j in range(min(i, 3)):
                if Ah[i, j] != 0.0:
                    stage += dt * Ah[i, j] * Lk[j]
            rhs_dp = stage[:, DP].copy()
            for j in range(i):
                if A[i, j] != 0.0:
                    rhs_dp += dt * A[i, j] * Sk[j]
            stage[:, DP] = rhs_dp / (1.0 + A[i, i] * dt * k)
        Sk.append(-k * stage[:, DP])
        if i < 3:
            Lk.append(L(stage))
    return stage


def relaxation_stability(z: complex) -> complex:
    """Stability function of the implicit tableau for ``y' = z y / dt``."""
    A = IMEX_IMPLICIT
    b = IMEX_B
    e = np.ones(5)
    M = np.eye(5) - z * A
    return complex(1.0 + z * b @ np.linalg.solve(M, e))
