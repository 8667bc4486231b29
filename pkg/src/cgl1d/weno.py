"""WENO-AO interpolation of point values and of even derivatives at faces.

Two kinds of interpolation are provided:

* :func:`weno_ao_interpolate` takes ``2s+1`` point values centred on a zone
  and returns the interpolated values at the zone's two faces. Order 3 uses a
  3-point parabola hybridised with two linear stencils; orders 5 and 7 use a
  5- or 7-point polynomial hybridised with the three parabolas that contain
  the centre zone.
* :func:`boundary_derivative_interpolate` takes ``2s+2`` point values
  straddling a face and returns the undivided even derivatives
  ``d2 = dx^2 f''``, ``d4 = dx^4 f''''`` and ``d6 = dx^6 f^(6)`` at that face.
  The two parabolas through the face's neighbours provide the small stencils;
  for orders 5 and 7 the full 6- or 8-point polynomial is the large stencil.

All stencil coefficients are derived once at import time from exact rational
arithmetic, so the tables carry no hand-typed constants.

Nonlinear weights follow the adaptive-order recipe

``w_k ~ gamma_k * (1 + (tau / (beta_k + EPS)) ** POWER)``

where ``beta_k`` is the usual sum of squared derivatives of stencil ``k``'s
polynomial over one zone width and ``tau`` measures how much the stencils
disagree. The high-order result is recovered as

``P = (w_hi / g_hi) * (P_hi - sum_k g_k P_k) + sum_k w_k P_k``.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

GAMMA_HI = 0.85
EPS = 1e-12
POWER = 4

# combination modes used by the kernel
_MODE_AO_MEAN = 0  # large stencil + small ones, tau = mean |beta_hi - beta_k|
_MODE_AO_PAIR = 1  # large stencil + two small ones, tau = |beta_1 - beta_2|
_MODE_PAIR = 2  # no large stencil; blend two small ones, tau = |beta_0 - beta_1|


# ---------------------------------------------------------------------------
# table construction (exact rational arithmetic)
# ---------------------------------------------------------------------------


def _solve_vandermonde(nodes):
    """Return the inverse Vandermonde matrix mapping samples to monomial coefficients."""
    m = len(nodes)
    A = [[Fraction(x) ** j for j in range(m)] + [Fraction(int(i == r)) for i in range(m)]
         for r, x in enumerate(nodes)]
    for c in range(m):
        p = next(r for r in range(c, m) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(m):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[m:] for row in A]  # coefficients = Vinv @ samples


def _monomial_derivative(j, l):
    """Coefficient and power of d^l/dx^l x^j."""
    if l > j:
        return Fraction(0), 0
    c = Fraction(1)
    for k in range(l):
        c *= j - k
    return c, j - l


def _int_half(n):
    """Integral of x^n over [-1/2, 1/2]."""
    if n % 2:
        return Fraction(0)
    return Fraction(2, n + 1) * Fraction(1, 2) ** (n + 1)


def _smoothness_form(m):
    """Quadratic form on monomial coefficients: sum_{l>=1} int (P^(l))^2."""
    M = [[Fraction(0)] * m for _ in range(m)]
    for j in range(m):
        for k in range(m):
            s = Fraction(0)
            for l in range(1, m):
                cj, pj = _monomial_derivative(j, l)
                ck, pk = _monomial_derivative(k, l)
                if cj and ck:
                    s += cj * ck * _int_half(pj + pk)
            M[j][k] = s
    return M


def _stencil_tables(nodes, window_nodes, points, derivs):
    """Evaluation rows and smoothness form of one stencil, embedded in the window.

    ``points`` are abscissae at which the polynomial is evaluated and
    ``derivs`` are derivative orders evaluated at x = 0.
    """
    m = len(nodes)
    Vinv = _solve_vandermonde(nodes)
    cols = [window_nodes.index(x) for x in nodes]
    W = len(window_nodes)
    rows = []
    for x in points:
        mono = [Fraction(x) ** j for j in range(m)]
        rows.append([sum(mono[j] * Vinv[j][r] for j in range(m)) for r in range(m)])
    for d in derivs:
        mono = [(_monomial_derivative(j, d)[0] if j == d else Fraction(0)) for j in range(m)]
        rows.append([sum(mono[j] * Vinv[j][r] for j in range(m)) for r in range(m)])
    # beta = c^T Mq c with c = Vinv f. The constant coefficient does not enter,
    # and the remaining block is positive definite, so beta is a sum of
    # m - 1 squares of linear combinations of the samples.
    Mq = np.array([[float(v) for v in row[1:]] for row in _smoothness_form(m)[1:]])
    chol = np.linalg.cholesky(Mq)
    Vf = np.array([[float(v) for v in row] for row in Vinv[1:]])
    S = chol.T @ Vf  # (m-1, m)
    E = np.zeros((len(rows), W))
    Cw = np.zeros((W - 1, W))
    for k, row in enumerate(rows):
        for r, v in enumerate(row):
            E[k, cols[r]] = float(v)
    for r in range(m - 1):
        for c in range(m):
            Cw[r, cols[c]] = S[r, c]
    return E, Cw, (cols[0], cols[-1] + 1, m - 1)


def _assemble(stencils, window, points, derivs, gam, mode):
    """Stack per-stencil tables into ``(E, C, sup, gamma, mode)``.

    ``E[k]`` holds the evaluation rows, ``C[k, :sup[k, 2]]`` the smoothness
    factor rows, and ``sup[k, 0]:sup[k, 1]`` is the stencil's column range.
    """
    W = len(window)
    E = np.zeros((len(stencils), len(points) + len(derivs), W))
    C = np.zeros((len(stencils), W - 1, W))
    sup = np.zeros((len(stencils), 3), dtype=np.int64)
    for k, st in enumerate(stencils):
        E[k], C[k], sup[k] = _stencil_tables(st, window, points, derivs)
    return E, C, sup, np.array(gam), mode


def _build_point_tables(order):
    s = (order - 1) // 2
    window = list(range(-s, s + 1))
    half = Fraction(1, 2)
    if order == 3:
        stencils = [[-1, 0, 1], [-1, 0], [0, 1]]
        gam = [GAMMA_HI, (1 - GAMMA_HI) / 2, (1 - GAMMA_HI) / 2]
        mode = _MODE_AO_PAIR
    else:
        stencils = [window, [-2, -1, 0], [-1, 0, 1], [0, 1, 2]]
        gam = [GAMMA_HI] + [(1 - GAMMA_HI) / 3] * 3
        mode = _MODE_AO_MEAN
    return _assemble(stencils, window, [-half, half], [], gam, mode)


def _build_derivative_tables(order):
    s = (order - 1) // 2
    half = Fraction(1, 2)
    window = [Fraction(2 * j - 1, 2) for j in range(-s, s + 2)]  # -(2s+1)/2 ... (2s+1)/2
    small = [[-3 * half, -half, half], [-half, half, 3 * half]]
    if order == 3:
        stencils = small
        gam = [0.5, 0.5]
        mode = _MODE_PAIR
    else:
        stencils = [window] + small
        gam = [GAMMA_HI, (1 - GAMMA_HI) / 2, (1 - GAMMA_HI) / 2]
        mode = _MODE_AO_MEAN
    return _assemble(stencils, window, [], [2, 4, 6], gam, mode)


_P3 = _build_point_tables(3)
_P5 = _build_point_tables(5)
_P7 = _build_point_tables(7)
_D3 = _build_derivative_tables(3)
_D5 = _build_derivative_tables(5)
_D7 = _build_derivative_tables(7)



# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


# Scratch layout: ws[0] smoothness indicators, ws[1] weights, ws[2] and ws[3]
# per-stencil values. Rows are indexed in place rather than sliced, which keeps
# the kernels free of array-view bookkeeping in the innermost loops.
_BETA, _W, _V0, _V1 = 0, 1, 2, 3


@njit(cache=True, inline="always")
def _weights(ws, gam, mode, linear):
    n = gam.shape[0]
    if linear:
        for k in range(n):
            ws[_W, k] = gam[k]
        return
    if mode == _MODE_AO_MEAN:
        tau = 0.0
        for k in range(1, n):
            tau += abs(ws[_BETA, 0] - ws[_BETA, k])
        tau /= n - 1
    elif mode == _MODE_AO_PAIR:
        tau = abs(ws[_BETA, 1] - ws[_BETA, 2])
    else:
        tau = abs(ws[_BETA, 0] - ws[_BETA, 1])
    tot = 0.0
    for k in range(n):
        r = tau / (ws[_BETA, k] + EPS)
        r2 = r * r
        wk = gam[k] * (1.0 + r2 * r2)  # POWER = 4
        ws[_W, k] = wk
        tot += wk
    inv = 1.0 / tot
    for k in range(n):
        ws[_W, k] *= inv


@njit(cache=True, inline="always")
def _combine(ws, row, gam, mode):
    """Hybridise the stencil values ``ws[row, k]`` with the weights ``ws[1]``."""
    n = gam.shape[0]
    if mode == _MODE_PAIR:
        out = 0.0
        for k in range(n):
            out += ws[_W, k] * ws[row, k]
        return out
    low = 0.0
    lin_low = 0.0
    for k in range(1, n):
        v = ws[row, k]
        low += ws[_W, k] * v
        lin_low += gam[k] * v
    return ws[_W, 0] / gam[0] * (ws[row, 0] - lin_low) + low


@njit(cache=True, inline="always")
def _betas(f, C, sup, ws):
    for k in range(C.shape[0]):
        lo, hi = sup[k, 0], sup[k, 1]
        s = 0.0
        for r in range(sup[k, 2]):
            t = 0.0
            for j in range(lo, hi):
                t += C[k, r, j] * f[j]
            s += t * t
        ws[_BETA, k] = s


@njit(cache=True, inline="always")
def ao_faces_nb(f, E, C, sup, gam, mode, linear, ws):
    """Face values (at -1/2 and +1/2) of the hybrid polynomial for window ``f``.

    ``ws`` is a scratch array of shape (4, >= number of stencils).
    """
    n = E.shape[0]
    _betas(f, C, sup, ws)
    _weights(ws, gam, mode, linear)
    for k in range(n):
        a = 0.0
        b = 0.0
        for j in range(sup[k, 0], sup[k, 1]):
            a += E[k, 0, j] * f[j]
            b += E[k, 1, j] * f[j]
        ws[_V0, k] = a
        ws[_V1, k] = b
    return _combine(ws, _V0, gam, mode), _combine(ws, _V1, gam, mode)


@njit(cache=True, inline="always")
def ao_derivs_nb(f, D, C, sup, gam, mode, linear, out, ws):
    """Undivided derivatives ``(d2, d4, d6)`` at the face for window ``f``.

    ``ws`` is a scratch array of shape (4, >= number of stencils).
    """
    n = D.shape[0]
    _betas(f, C, sup, ws)
    _weights(ws, gam, mode, linear)
    for d in range(3):
        for k in range(n):
            a = 0.0
            for j in range(sup[k, 0], sup[k, 1]):
                a += D[k, d, j] * f[j]
            ws[_V0, k] = a
        out[d] = _combine(ws, _V0, gam, mode)


@njit(cache=True)
def ao_batch_nb(Fw, E, C, sup, gam, mode, linear, out, ws):
    """Hybrid WENO-AO evaluation for many windows at once.

    ``Fw[j, i]`` is sample ``j`` of window ``i``; ``out[d, i]`` receives the
    ``d``-th evaluation row of ``E`` (face values or derivatives) of the
    hybrid polynomial of window ``i``. ``ws`` is scratch with at least
    ``2 * nst + 1`` rows of the same length as the windows. The window index
    is the innermost loop everywhere so the arithmetic vectorises.
    """
    m, N = Fw.shape
    nst, nd = E.shape[0], E.shape[1]
    tau = ws[2 * nst]
    # smoothness indicators
    for k in range(nst):
        beta = ws[k]
        beta[:] = 0.0
        for r in range(sup[k, 2]):
            tmp = ws[nst + k]
            tmp[:] = 0.0
            for j in range(sup[k, 0], sup[k, 1]):
                c = C[k, r, j]
                row = Fw[j]
                for i in range(N):
                    tmp[i] += c * row[i]
            for i in range(N):
                beta[i] += tmp[i] * tmp[i]
    # normalised nonlinear weights, then the combination coefficients
    if linear:
        for k in range(nst):
            ws[nst + k][:] = gam[k]
    else:
        if mode == _MODE_AO_MEAN:
            tau[:] = 0.0
            for k in range(1, nst):
                for i in range(N):
                    tau[i] += abs(ws[0, i] - ws[k, i])
            for i in range(N):
                tau[i] /= nst - 1
        elif mode == _MODE_AO_PAIR:
            for i in range(N):
                tau[i] = abs(ws[1, i] - ws[2, i])
        else:
            for i in range(N):
                tau[i] = abs(ws[0, i] - ws[1, i])
        for k in range(nst):
            g = gam[k]
            wk = ws[nst + k]
            bk = ws[k]
            for i in range(N):
                q = tau[i] / (bk[i] + EPS)
                q2 = q * q
                wk[i] = g * (1.0 + q2 * q2)  # POWER = 4
        tot = ws[0]  # smoothness indicators are no longer needed
        tot[:] = 0.0
        for k in range(nst):
            wk = ws[nst + k]
            for i in range(N):
                tot[i] += wk[i]
        for k in range(nst):
            wk = ws[nst + k]
            for i in range(N):
                wk[i] /= tot[i]
    if mode != _MODE_PAIR:
        w0 = ws[nst]
        g0 = gam[0]
        for k in range(1, nst):
            wk = ws[nst + k]
            gk = gam[k] / g0
            for i in range(N):
                wk[i] -= gk * w0[i]
        for i in range(N):
            w0[i] /= g0
    # evaluate
    for d in range(nd):
        od = out[d]
        od[:] = 0.0
        for k in range(nst):
            wk = ws[nst + k]
            v = tau
            v[:] = 0.0
            for j in range(sup[k, 0], sup[k, 1]):
                e = E[k, d, j]
                if e != 0.0:
                    row = Fw[j]
                    for i in range(N):
                        v[i] += e * row[i]
            for i in range(N):
                od[i] += wk[i] * v[i]


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

WORK_WIDTH = 4  # enough for the largest number of stencils
_POINT = {3: _P3, 5: _P5, 7: _P7}
_DERIV = {3: _D3, 5: _D5, 7: _D7}


def stencil_half_width(order: int) -> int:
    if order not in (3, 5, 7):
        raise ValueError(f"order must be 3, 5 or 7, got {order}")
    return (order - 1) // 2


def point_tables(order: int):
    """``(E, C, sup, gamma, mode)`` for point-value interpolation at ``order``."""
    stencil_half_width(order)
    return _POINT[order]


def derivative_tables(order: int):
    """``(D, C, sup, gamma, mode)`` for face-derivative interpolation at ``order``."""
    stencil_half_width(order)
    return _DERIV[order]


def weno_ao_interpolate(window, order: int, linear: bool = False):
    """Interpolate ``2s+1`` point values to the two faces of the centre zone.

    Parameters
    ----------
    window : array_like
        Point values ``f[i-s], ..., f[i+s]``.
    order : {3, 5, 7}
    linear : bool
        Use the linear (optimal) weights instead of the nonlinear ones.

    Returns
    -------
    (left, right) : tuple of float
        Values at ``x_{i-1/2}`` (from inside zone ``i``) and ``x_{i+1/2}``.
    """
    s = stencil_half_width(order)
    f = np.ascontiguousarray(window, dtype=np.float64)
    if f.shape != (2 * s + 1,):
        raise ValueError(f"order {order} needs a window of {2 * s + 1} values")
    E, C, sup, gam, mode = _POINT[order]
    return ao_faces_nb(f, E, C, sup, gam, mode, linear, np.empty((4, WORK_WIDTH)))


def boundary_derivative_interpolate(face_window, order: int, linear: bool = False) -> np.ndarray:
    """Undivided even derivatives at the face in the middle of ``face_window``.

    ``face_window`` holds ``2s+2`` point values ``f[i-s], ..., f[i+1+s]``
    around the face ``x_{i+1/2}``. Returns ``[d2, d4, d6]`` where
    ``dk = dx^k d^k f / dx^k``. Entries not required at ``order`` are zero.
    """
    s = stencil_half_width(order)
    f = np.ascontiguousarray(face_window, dtype=np.float64)
    if f.shape != (2 * s + 2,):
        raise ValueError(f"order {order} needs a face window of {2 * s + 2} values")
    D, C, sup, gam, mode = _DERIV[order]
    out = np.zeros(3)
    ao_derivs_nb(f, D, C, sup, gam, mode, linear, out, np.empty((4, WORK_WIDTH)))
    if order < 7:
        out[2] = 0.0
    if order < 5:
        out[1] = 0.0
    return out


def smoothness_indicators(window, order: int, derivative: bool = False) -> np.ndarray:
    """Smoothness indicators ``beta_k`` of every stencil (large stencil first).

    ``beta_k`` is the sum over derivative orders ``l >= 1`` of the integral
    over the centre cell (or, with ``derivative=True``, over the unit interval
    centred on the face) of the squared ``l``-th derivative of stencil ``k``'s
    polynomial, in units of the grid spacing.
    """
    s = stencil_half_width(order)
    E, C, sup, gam, mode = (_DERIV if derivative else _POINT)[order]
    f = np.ascontiguousarray(window, dtype=np.float64)
    m = 2 * s + 2 if derivative else 2 * s + 1
    if f.shape != (m,):
        raise ValueError(f"expected a window of {m} values")
    ws = np.empty((4, WORK_WIDTH))
    _betas(f, C, sup, ws)
    return ws[_BETA, :C.shape[0]].copy()
