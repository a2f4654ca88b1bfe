"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public names (``el_shoot``, ``el_path``, ``tail_path``, ``series_terms``,
``convolve_1d``) are bound to whichever backend :mod:`nashlab._backend`
selected at import time.  ``get_kernels("numba")`` / ``get_kernels("numpy")``
return both sets explicitly, which is what the tests and the benchmark use.

Event codes returned by the Euler-Lagrange integrators::

    0  reached the last node without an event
    1  U crossed zero (hit_zero)
    2  V crossed zero from below while U > 0 (slope_zero)
"""

import math
from types import SimpleNamespace

import numpy as np

from ._backend import HAS_NUMBA, USE_NUMBA, njit

MAX_SERIES_TERMS = 200
SERIES_RATIO_STOP = 1e-16


# ---------------------------------------------------------------------------
# radial Euler-Lagrange equation  u'' + (d-1)/r u' + u - |u|^{p-2} u = 0
# ---------------------------------------------------------------------------

def _el_rhs(r, U, V, p, d):
    # p = 1 is the linear flow V' = 1 - U - (d-1)/r V on both sides of U = 0
    if p == 1.0:
        nl = 1.0
    elif U > 0.0:
        nl = U ** (p - 1.0)
    elif U < 0.0:
        nl = -((-U) ** (p - 1.0))
    else:
        nl = 0.0
    return V, -(d - 1.0) / r * V - U + nl


def _el_nl_np(U, p):
    if p == 1.0:
        return np.ones_like(U)
    return np.sign(U) * np.abs(U) ** (p - 1.0)


def _el_batch_numpy(hs, p, d, nodes, store):
    hs = np.asarray(hs, dtype=float)
    nh = hs.shape[0]
    n = nodes.shape[0]
    r0 = nodes[0]
    curv = (hs ** (p - 1.0) - hs) / d
    U = hs + 0.5 * curv * r0 * r0
    V = curv * r0
    codes = np.zeros(nh, dtype=np.int64)
    kstop = np.full(nh, n - 1, dtype=np.int64)
    active = np.ones(nh, dtype=bool)
    if store:
        Us = np.full((nh, n), np.nan)
        Vs = np.full((nh, n), np.nan)
        Us[:, 0] = U
        Vs[:, 0] = V

    def rhs(r, u, v):
        return v, -(d - 1.0) / r * v - u + _el_nl_np(u, p)

    for k in range(n - 1):
        r = nodes[k]
        dr = nodes[k + 1] - r
        k1u, k1v = rhs(r, U, V)
        k2u, k2v = rhs(r + 0.5 * dr, U + 0.5 * dr * k1u, V + 0.5 * dr * k1v)
        k3u, k3v = rhs(r + 0.5 * dr, U + 0.5 * dr * k2u, V + 0.5 * dr * k2v)
        k4u, k4v = rhs(r + dr, U + dr * k3u, V + dr * k3v)
        Un = U + dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        Vn = V + dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        U = np.where(active, Un, U)
        V = np.where(active, Vn, V)
        if store:
            Us[active, k + 1] = U[active]
            Vs[active, k + 1] = V[active]
        bad = active & ~(np.isfinite(U) & np.isfinite(V))
        hit = active & ~bad & (U <= 0.0)
        turn = active & ~bad & ~hit & (V >= 0.0)
        codes[bad] = -1
        codes[hit] = 1
        codes[turn] = 2
        done = bad | hit | turn
        kstop[done] = k + 1
        active &= ~done
        if not active.any():
            break
    if store:
        return codes, kstop, Us, Vs
    return codes, kstop


def _el_shoot_numpy(hs, p, d, nodes):
    return _el_batch_numpy(hs, p, d, nodes, store=False)


def _el_path_numpy(h, p, d, nodes):
    codes, kstop, Us, Vs = _el_batch_numpy(np.array([h]), p, d, nodes, store=True)
    return Us[0], Vs[0], int(codes[0]), int(kstop[0])


# ---------------------------------------------------------------------------
# touchdown tail in t = log(R - r), scaled variables a = U s^-m, b = U_s s^(1-m)
# ---------------------------------------------------------------------------

def _tail_rhs(t, a, b, p, d, m, R):
    s = math.exp(t)
    da = b - m * a
    db = -(m - 1.0) * b + (d - 1.0) * s / (R - s) * b - s * s * a + a ** (p - 1.0)
    return da, db


def _build_scalar_loops(_el_rhs_nb, _tail_rhs_nb):
    """Scalar-loop integrators closed over the given right-hand sides."""

    def _el_shoot_loop(hs, p, d, nodes):
        nh = hs.shape[0]
        codes = np.zeros(nh, dtype=np.int64)
        kstop = np.full(nh, nodes.shape[0] - 1, dtype=np.int64)
        r0 = nodes[0]
        for j in range(nh):
            h = hs[j]
            curv = (h ** (p - 1.0) - h) / d
            U = h + 0.5 * curv * r0 * r0
            V = curv * r0
            for k in range(nodes.shape[0] - 1):
                r = nodes[k]
                dr = nodes[k + 1] - r
                k1u, k1v = _el_rhs_nb(r, U, V, p, d)
                k2u, k2v = _el_rhs_nb(r + 0.5 * dr, U + 0.5 * dr * k1u, V + 0.5 * dr * k1v, p, d)
                k3u, k3v = _el_rhs_nb(r + 0.5 * dr, U + 0.5 * dr * k2u, V + 0.5 * dr * k2v, p, d)
                k4u, k4v = _el_rhs_nb(r + dr, U + dr * k3u, V + dr * k3v, p, d)
                U = U + dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
                V = V + dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
                if not (math.isfinite(U) and math.isfinite(V)):
                    codes[j] = -1
                    kstop[j] = k + 1
                    break
                if U <= 0.0:
                    codes[j] = 1
                    kstop[j] = k + 1
                    break
                if V >= 0.0:
                    codes[j] = 2
                    kstop[j] = k + 1
                    break
        return codes, kstop


    def _el_path_loop(h, p, d, nodes):
        n = nodes.shape[0]
        Us = np.full(n, np.nan)
        Vs = np.full(n, np.nan)
        r0 = nodes[0]
        curv = (h ** (p - 1.0) - h) / d
        U = h + 0.5 * curv * r0 * r0
        V = curv * r0
        Us[0] = U
        Vs[0] = V
        code = 0
        kstop = n - 1
        for k in range(n - 1):
            r = nodes[k]
            dr = nodes[k + 1] - r
            k1u, k1v = _el_rhs_nb(r, U, V, p, d)
            k2u, k2v = _el_rhs_nb(r + 0.5 * dr, U + 0.5 * dr * k1u, V + 0.5 * dr * k1v, p, d)
            k3u, k3v = _el_rhs_nb(r + 0.5 * dr, U + 0.5 * dr * k2u, V + 0.5 * dr * k2v, p, d)
            k4u, k4v = _el_rhs_nb(r + dr, U + dr * k3u, V + dr * k3v, p, d)
            U = U + dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            V = V + dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            Us[k + 1] = U
            Vs[k + 1] = V
            if not (math.isfinite(U) and math.isfinite(V)):
                code = -1
                kstop = k + 1
                break
            if U <= 0.0:
                code = 1
                kstop = k + 1
                break
            if V >= 0.0:
                code = 2
                kstop = k + 1
                break
        return Us, Vs, code, kstop


    def _tail_path_loop(a0, b0, t0, dt, nmax, p, d, m, R, u_target):
        ts = np.empty(nmax + 1)
        As = np.empty(nmax + 1)
        Bs = np.empty(nmax + 1)
        a = a0
        b = b0
        t = t0
        ts[0] = t
        As[0] = a
        Bs[0] = b
        nused = nmax
        for k in range(nmax):
            k1a, k1b = _tail_rhs_nb(t, a, b, p, d, m, R)
            k2a, k2b = _tail_rhs_nb(t + 0.5 * dt, a + 0.5 * dt * k1a, b + 0.5 * dt * k1b, p, d, m, R)
            k3a, k3b = _tail_rhs_nb(t + 0.5 * dt, a + 0.5 * dt * k2a, b + 0.5 * dt * k2b, p, d, m, R)
            k4a, k4b = _tail_rhs_nb(t + dt, a + dt * k3a, b + dt * k3b, p, d, m, R)
            a = a + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
            b = b + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
            t = t0 + (k + 1) * dt
            ts[k + 1] = t
            As[k + 1] = a
            Bs[k + 1] = b
            if math.exp(m * t) * a >= u_target or not (math.isfinite(a) and math.isfinite(b)):
                nused = k + 1
                break
        return ts[: nused + 1], As[: nused + 1], Bs[: nused + 1]

    return _el_shoot_loop, _el_path_loop, _tail_path_loop


# ---------------------------------------------------------------------------
# ascending Bessel series  sum_k y^k / (k! Gamma(k+alpha+1)) * weight_k(deriv)
# ---------------------------------------------------------------------------

def _series_loop(alpha, y, x, deriv, inv_gamma0):
    """Return (sum, abs_sum) of the weighted ascending series per element.

    The k-th raw term is ``T_k = y^k / (k! Gamma(k+alpha+1))`` with
    ``T_0 = inv_gamma0``.  ``deriv`` selects the weight applied to ``T_k``:
    0 -> 1, 1 -> 2k/x, 2 -> 2k(2k-1)/x^2 (derivatives of x^{-alpha} J_alpha).
    """
    n = y.shape[0]
    out = np.empty(n)
    mag = np.empty(n)
    for i in range(n):
        T = inv_gamma0
        total = 0.0
        abs_total = 0.0
        xi = x[i]
        yi = y[i]
        if deriv == 0:
            total = T
            abs_total = abs(T)
        for k in range(1, MAX_SERIES_TERMS):
            T = T * yi / (k * (k + alpha))
            if deriv == 0:
                w = T
            elif deriv == 1:
                w = T * (2.0 * k) / xi
            else:
                w = T * (2.0 * k) * (2.0 * k - 1.0) / (xi * xi)
            total += w
            abs_total += abs(w)
            if abs(w) <= SERIES_RATIO_STOP * abs_total:
                break
        out[i] = total
        mag[i] = abs_total
    return out, mag


def _series_numpy(alpha, y, x, deriv, inv_gamma0):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    T = np.full(y.shape, inv_gamma0)
    if deriv == 0:
        total = T.copy()
        abs_total = np.abs(T)
    else:
        total = np.zeros(y.shape)
        abs_total = np.zeros(y.shape)
    live = np.ones(y.shape, dtype=bool)
    for k in range(1, MAX_SERIES_TERMS):
        T = T * y / (k * (k + alpha))
        if deriv == 0:
            w = T
        elif deriv == 1:
            w = T * (2.0 * k) / x
        else:
            w = T * (2.0 * k) * (2.0 * k - 1.0) / (x * x)
        w = np.where(live, w, 0.0)
        total = total + w
        abs_total = abs_total + np.abs(w)
        live &= np.abs(w) > SERIES_RATIO_STOP * abs_total
        if not live.any():
            break
    return total, abs_total


# ---------------------------------------------------------------------------
# discrete Gaussian convolution on a uniform grid (trapezoid weights)
# ---------------------------------------------------------------------------

def _convolve_loop(u0, kernel):
    n = u0.shape[0]
    half = (kernel.shape[0] - 1) // 2
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        for j in range(lo, hi):
            acc += kernel[i - j + half] * u0[j]
        out[i] = acc
    return out


def _convolve_numpy(u0, kernel):
    full = np.convolve(u0, kernel, mode="full")
    half = (kernel.shape[0] - 1) // 2
    return full[half: half + u0.shape[0]]


# ---------------------------------------------------------------------------
# backend wiring
# ---------------------------------------------------------------------------

_el_shoot_py, _el_path_py, _tail_path_py = _build_scalar_loops(_el_rhs, _tail_rhs)

if HAS_NUMBA:
    _el_shoot_numba, _el_path_numba, _tail_path_numba = (
        njit(f) for f in _build_scalar_loops(njit(_el_rhs), njit(_tail_rhs))
    )
    _series_numba = njit(_series_loop)
    _convolve_numba = njit(_convolve_loop)

_NUMPY = SimpleNamespace(
    name="numpy",
    el_shoot=_el_shoot_numpy,
    el_path=_el_path_numpy,
    # the tail is a single short trajectory; the plain loop is the numpy path
    tail_path=_tail_path_py,
    series_terms=_series_numpy,
    convolve_1d=_convolve_numpy,
    shoot_batch=8,
)

_NUMBA = SimpleNamespace(
    name="numba",
    el_shoot=_el_shoot_numba,
    el_path=_el_path_numba,
    tail_path=_tail_path_numba,
    series_terms=_series_numba,
    # np.convolve is compiled C and beats the jitted double loop; the loop is kept
    # as an independent reference for the slicing
    convolve_1d=_convolve_numpy,
    shoot_batch=1,
) if HAS_NUMBA else None


def get_kernels(name=None):
    """Return the kernel namespace for ``name`` ("numba", "numpy" or None=active)."""
    if name is None:
        return _NUMBA if USE_NUMBA else _NUMPY
    if name == "numba":
        if _NUMBA is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return _NUMBA
    if name == "numpy":
        return _NUMPY
    raise ValueError(f"unknown backend {name!r}")


_active = get_kernels()
el_shoot = _active.el_shoot
el_path = _active.el_path
tail_path = _active.tail_path
series_terms = _active.series_terms
convolve_1d = _active.convolve_1d
