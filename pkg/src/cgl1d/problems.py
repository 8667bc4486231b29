"""Built-in test problems, exact solutions and boundary conditions.

Problem ids (case-insensitive, several aliases accepted):

==============  =====================================================
``accuracy``     smooth density advection on a periodic unit domain
``alfven``       circularly polarised Alfven wave, periodic
``reconnection`` Harris-type current sheet with a guide field
``rp1``          Brio-Wu shock tube
``rp2``          Ryu-Jones shock tube
``rp3``..``rp5`` further shock tubes
==============  =====================================================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import NoExactSolution, UnknownProblem
from .state import NVAR, classify_omega_nb, prim_to_cons_grid

SQRT4PI = math.sqrt(4.0 * math.pi)

PERIODIC = "periodic"
OUTFLOW = "outflow"


@dataclass(frozen=True)
class ProblemSpec:
    """Static description of a test problem.

    ``init(x)`` returns primitive states at zone centres ``x``;
    ``exact(x, t)`` (when present) returns the exact primitive solution.
    """

    id: str
    title: str
    xa: float
    xb: float
    bc: str
    Bx: float
    n: int
    t_end: float
    cfl: float
    init: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    tau: Optional[float] = None
    error_variable: int = 0  # primitive slot used for error norms

    @property
    def length(self) -> float:
        return self.xb - self.xa


@dataclass
class GridState:
    """Interior zone-centred conserved values on a uniform mesh."""

    x: np.ndarray
    U: np.ndarray
    dx: float
    bc: str
    Bx: float

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def x0(self) -> float:
        return float(self.x[0] - 0.5 * self.dx)


@dataclass(frozen=True)
class AlfvenParams:
    deltaB: float
    deltaU: float
    k: float
    Va: float
    Va_star: float
    epsilon: float


# ---------------------------------------------------------------------------
# individual problems
# ---------------------------------------------------------------------------


def _uniform(x, w):
    return np.tile(np.asarray(w, dtype=np.float64), (x.shape[0], 1))


def _riemann(left, right):
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)

    def init(x):
        return np.where((x <= 0.0)[:, None], left, right)

    return init


# accuracy test -------------------------------------------------------------

def _accuracy_exact(x, t):
    W = _uniform(x, [0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0])
    W[:, 0] = 2.0 + np.sin(2.0 * np.pi * (x - t))
    return W


# circularly polarised Alfven wave ------------------------------------------

ALFVEN_RHO = 1.0
ALFVEN_P = 1.0
ALFVEN_BX = SQRT4PI
ALFVEN_DELTA_B = 0.1
ALFVEN_K = 2.0 * math.pi  # one wavelength across the unit periodic domain


def alfven_params() -> AlfvenParams:
    """Wave parameters; the velocity amplitude follows the Walen relation."""
    B2 = ALFVEN_BX ** 2 + 4.0 * math.pi * ALFVEN_DELTA_B ** 2
    dp = 0.0
    Va = math.sqrt(ALFVEN_BX ** 2 / (4.0 * math.pi * ALFVEN_RHO) - dp * ALFVEN_BX ** 2 / (ALFVEN_RHO * B2))
    epsilon = 1.0 - dp / B2
    # B_y amplitude is sqrt(4 pi) dB, so Walen gives du / Va = sqrt(4 pi) dB / Bx
    dU = Va * SQRT4PI * ALFVEN_DELTA_B / ALFVEN_BX
    return AlfvenParams(ALFVEN_DELTA_B, dU, ALFVEN_K, Va, math.sqrt(epsilon) * Va, epsilon)


def _alfven_exact(x, t):
    prm = alfven_params()
    # With u_y and B_y in phase the wave travels towards -x along Bx > 0.
    phase = prm.k * x + prm.k * prm.Va_star * t
    W = np.empty((x.shape[0], NVAR))
    W[:, 0] = ALFVEN_RHO
    W[:, 1] = 0.0
    W[:, 2] = prm.deltaU * np.sin(phase)
    W[:, 3] = prm.deltaU * np.cos(phase)
    W[:, 4] = ALFVEN_P
    W[:, 5] = ALFVEN_P
    W[:, 6] = SQRT4PI * prm.deltaB * np.sin(phase)
    W[:, 7] = SQRT4PI * prm.deltaB * np.cos(phase)
    return W


def _alfven_t_end():
    prm = alfven_params()
    return 5.0 * 1.0 / prm.Va_star


# reconnection layer --------------------------------------------------------

RECON_PHI = math.radians(30.0)
RECON_P_LOBE = 0.125
RECON_RHO_LOBE = 1.0


def _reconnection_init(x):
    """Isothermal Harris sheet in total-pressure balance, at rest."""
    W = np.zeros((x.shape[0], NVAR))
    sech2 = 1.0 / np.cosh(x) ** 2
    # p + By^2 / 8 pi = const with By = sqrt(4 pi) cos(phi) tanh(x)
    p = RECON_P_LOBE + 0.5 * math.cos(RECON_PHI) ** 2 * sech2
    W[:, 0] = RECON_RHO_LOBE * p / RECON_P_LOBE
    W[:, 4] = p
    W[:, 5] = p
    W[:, 6] = SQRT4PI * math.cos(RECON_PHI) * np.tanh(x)
    W[:, 7] = SQRT4PI * math.sin(RECON_PHI)
    return W


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_PROBLEMS = {
    "accuracy": ProblemSpec(
        "accuracy", "Smooth density advection", 0.0, 1.0, PERIODIC, 1.0, 80, 2.0, 0.3,
        init=lambda x: _accuracy_exact(x, 0.0), exact=_accuracy_exact, error_variable=0),
    "alfven": ProblemSpec(
        "alfven", "Circularly polarised Alfven wave", 0.0, 1.0, PERIODIC, ALFVEN_BX, 80,
        _alfven_t_end(), 0.3, init=lambda x: _alfven_exact(x, 0.0), exact=_alfven_exact,
        error_variable=6),
    "reconnection": ProblemSpec(
        "reconnection", "Reconnection layer", -200.0, 200.0, OUTFLOW, 0.05 * SQRT4PI, 2000,
        3500.0, 0.8, init=_reconnection_init),
    "rp1": ProblemSpec(
        "rp1", "Brio-Wu shock tube", -1.0, 1.0, OUTFLOW, 0.75 * SQRT4PI, 800, 0.2, 0.8,
        init=_riemann([1, 0, 0, 0, 1, 1, SQRT4PI, 0], [0.125, 0, 0, 0, 0.1, 0.1, -SQRT4PI, 0])),
    "rp2": ProblemSpec(
        "rp2", "Ryu-Jones shock tube", -0.5, 0.5, OUTFLOW, 2.0, 800, 0.2, 0.8,
        init=_riemann([1.08, 1.2, 0.0, 0.0, 0.95, 0.95, 3.6, 2.0], [1, 0, 0, 0, 1, 1, 4, 2])),
    "rp3": ProblemSpec(
        "rp3", "Riemann problem 3", -0.5, 0.5, OUTFLOW, 3.899398, 800, 0.15, 0.8,
        init=_riemann([1.7, 0, 0, 0, 1.7, 1.7, 3.544908, 0],
                      [0.2, 0, 0, -1.496891, 0.2, 0.2, 2.785898, 2.192064])),
    "rp4": ProblemSpec(
        "rp4", "Riemann problem 4", -0.5, 0.5, OUTFLOW, 1.3 * SQRT4PI, 800, 0.15, 0.8,
        init=_riemann([1, 0, 0, 0, 1, 1, SQRT4PI, 0], [0.4, 0, 0, 0, 0.4, 0.4, -SQRT4PI, 0])),
    "rp5": ProblemSpec(
        "rp5", "Riemann problem 5", -0.5, 0.5, OUTFLOW, 1.0, 800, 0.1, 0.8,
        init=_riemann([1 / (4 * math.pi), -1, 1, -1, 1, 1, -1, 1],
                      [1 / (4 * math.pi), -1, -1, -1, 1, 1, 1, 1])),
}

_ALIASES = {
    "accuracy": "accuracy", "smooth": "accuracy",
    "alfven": "alfven", "alfvenwave": "alfven", "alfven_wave": "alfven",
    "reconnection": "reconnection", "reconnectionlayer": "reconnection",
    "reconnection_layer": "reconnection",
    "rp1": "rp1", "rp1_briowu": "rp1", "briowu": "rp1", "brio_wu": "rp1",
    "rp2": "rp2", "rp2_ryujones": "rp2", "ryujones": "rp2", "ryu_jones": "rp2",
    "rp3": "rp3", "rp4": "rp4", "rp5": "rp5",
}

PROBLEM_IDS = tuple(_PROBLEMS)
RIEMANN_IDS = ("rp1", "rp2", "rp3", "rp4", "rp5")


def get_problem(pid: str) -> ProblemSpec:
    """Look up a problem by id or alias."""
    key = _ALIASES.get(str(pid).strip().lower().replace("-", "_"))
    if key is None:
        raise UnknownProblem(f"unknown problem {pid!r}; choose from {', '.join(PROBLEM_IDS)}")
    return _PROBLEMS[key]


def with_overrides(spec: ProblemSpec, **kw) -> ProblemSpec:
    """Copy of ``spec`` with some fields replaced (``None`` values are ignored,
    except ``tau`` which may be set to ``None`` explicitly via ``disable_source``)."""
    disable = kw.pop("disable_source", False)
    kw = {k: v for k, v in kw.items() if v is not None}
    if disable:
        kw["tau"] = None
    return replace(spec, **kw)


def zone_centres(spec: ProblemSpec, n: int) -> np.ndarray:
    dx = spec.length / n
    return spec.xa + (np.arange(n) + 0.5) * dx


def init_problem(spec: ProblemSpec | str, n: int | None = None) -> GridState:
    """Zone-centred initial conserved state for ``spec`` on ``n`` zones."""
    if isinstance(spec, str):
        spec = get_problem(spec)
    n = spec.n if n is None else int(n)
    x = zone_centres(spec, n)
    W = spec.init(x)
    U = prim_to_cons_grid(W, spec.Bx)
    return GridState(x=x, U=U, dx=spec.length / n, bc=spec.bc, Bx=spec.Bx)


def initial_omega_regions(spec: ProblemSpec, n: int | None = None) -> np.ndarray:
    """Hyperbolicity sub-region (0 = outside) of every initial zone."""
    n = spec.n if n is None else n
    W = spec.init(zone_centres(spec, n))
    out = np.empty(W.shape[0], dtype=np.int64)
    for i, w in enumerate(W):
        B2 = spec.Bx ** 2 + w[6] ** 2 + w[7] ** 2
        out[i] = classify_omega_nb(w[4], w[5], B2)[0]
    return out


def exact_solution(spec: ProblemSpec | str, x, t: float) -> np.ndarray:
    """Exact primitive solution (accuracy and Alfven problems only)."""
    if isinstance(spec, str):
        spec = get_problem(spec)
    if spec.exact is None:
        raise NoExactSolution(f"problem {spec.id!r} has no exact solution")
    return spec.exact(np.asarray(x, dtype=np.float64), float(t))


def apply_bc(Upad: np.ndarray, bc: str, ng: int) -> np.ndarray:
    """Fill ``ng`` ghost zones on each side of ``Upad`` in place and return it."""
    n = Upad.shape[0] - 2 * ng
    if bc == PERIODIC:
        Upad[:ng] = Upad[n:n + ng]
        Upad[n + ng:] = Upad[ng:2 * ng]
    elif bc == OUTFLOW:
        Upad[:ng] = Upad[ng]
        Upad[n + ng:] = Upad[n + ng - 1]
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    return Upad


def pad(U: np.ndarray, bc: str, ng: int) -> np.ndarray:
    """Copy interior ``U`` into a ghost-padded array with boundary values filled."""
    Upad = np.empty((U.shape[0] + 2 * ng, U.shape[1]))
    Upad[ng:-ng] = U
    return apply_bc(Upad, bc, ng)
