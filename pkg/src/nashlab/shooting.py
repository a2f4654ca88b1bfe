"""Compactly supported radial ground states of  -Lap u = u - |u|^(p-2) u.

The center value ``h*`` is found by bisection between undershoot (the slope
vanishes while u > 0) and overshoot (u crosses zero).  The support radius is
*not* read off the forward event: near a touchdown ``u ~ A s^m`` with
``m = 2/(2-p)``, so an error ``dh`` in the center value moves the zero by
``dh**(1/m)``.  Instead the forward solution at ``h*`` is matched at a
moderate level ``u = U_m`` with a tail integrated inward from the touchdown,
started on the critical branch

    u = A s^m (1 + c1 s + c2 s^2),   s = R - r,   A^(2-p) = 1 / (m (m-1)),

and written in ``t = log s`` with ``a = u s^-m``, ``b = u_s s^(1-m)`` so that
the touchdown is a regular fixed point.  ``R`` solves ``R = r_m + s_m(R)``.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import kernels
from .radial import NormTriple, RadialProfile, gn_exponents, gn_quotient, norm_triple
from .specfun import spectral_data

HIT_ZERO = "hit_zero"
SLOPE_ZERO = "slope_zero"
MAX_RADIUS = "max_radius"

_CODE_TAGS = {0: MAX_RADIUS, 1: HIT_ZERO, 2: SLOPE_ZERO}


class ShootingError(RuntimeError):
    """Raised when the center-value bracket cannot be established or refined."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    r: np.ndarray
    U: np.ndarray
    V: np.ndarray
    event: str
    r_event: float
    U_event: float
    V_event: float
    steps_per_unit: float


@dataclass(frozen=True, eq=False)
class ShootingResult:
    p: float
    d: int
    h: float
    R_p: float
    profile: RadialProfile
    mu_p: float
    norms: NormTriple
    res1: float
    res2: float
    bracket: tuple
    terminal: tuple
    match_residual: float
    n_steps: int
    diagnostics: dict = field(default_factory=dict)


# -- node grids and the radial right-hand side -------------------------------

def series_start_radius(d):
    return 1e-4 * max(1.0, math.sqrt(d))


def radial_nodes(d, dr, r_max):
    """Integration nodes: series start, a geometric ramp out of the center, then uniform ``dr``.

    Near ``r = 0`` the friction term ``(d-1)/r`` is stiff, so the step is
    capped at ``r / (1 + (d-1)/2)`` until it reaches ``dr``.
    """
    r = series_start_radius(d)
    ramp = [r]
    if d > 1:
        factor = 1.0 + 1.0 / (1.0 + 0.5 * (d - 1))
        while r * factor - r < dr:
            r *= factor
            ramp.append(r)
    n_uniform = int(math.ceil((r_max - r) / dr))
    uniform = r + dr * np.arange(1, n_uniform + 1)
    return np.concatenate([np.array(ramp), uniform])


def el_rhs(r, U, V, p, d):
    """``V'`` of the radial Euler-Lagrange system (vectorized; linear at p = 1)."""
    nl = 1.0 if p == 1.0 else np.sign(U) * np.abs(U) ** (p - 1.0)
    return -(d - 1.0) / r * V - U + nl


def _hermite_U(nodes, U, V):
    return CubicHermiteSpline(nodes, U, V)


def _hermite_V(nodes, U, V, p, d):
    return CubicHermiteSpline(nodes, V, el_rhs(nodes, U, V, p, d))


def _solve_in_step(spline, target, lo, hi):
    f_lo = spline(lo) - target
    f_hi = spline(hi) - target
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0 or f_lo * f_hi > 0.0:
        return hi
    return brentq(lambda x: spline(x) - target, lo, hi, xtol=1e-15, rtol=1e-15)


# -- integrate_el ------------------------------------------------------------

def _path(h, p, d, nodes, backend=None):
    K = kernels.get_kernels(backend)
    Us, Vs, code, kstop = K.el_path(float(h), float(p), float(d), nodes)
    if code == -1:
        raise FloatingPointError("non-finite state in the radial integration; step too large")
    n = kstop + 1
    return nodes[:n], np.asarray(Us[:n]), np.asarray(Vs[:n]), int(code)


def _rk4_fan(r, U, V, steps, p, d):
    """One RK4 step of each length in ``steps`` from the same state (vectorized)."""
    f = lambda rr, u, v: (v, el_rhs(rr, u, v, p, d))
    k1u, k1v = f(r, U, V)
    k2u, k2v = f(r + 0.5 * steps, U + 0.5 * steps * k1u, V + 0.5 * steps * k1v)
    k3u, k3v = f(r + 0.5 * steps, U + 0.5 * steps * k2u, V + 0.5 * steps * k2v)
    k4u, k4v = f(r + steps, U + steps * k3u, V + steps * k3v)
    return (U + steps / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            V + steps / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))


def _event_state(r, U, V, code, p, d, n_fan=64):
    """Locate the event inside the last step; returns ``(r, U, V, code)``.

    The node after the event was computed with the right-hand side past
    ``U = 0``, which is wrong for a tangential touchdown.  Instead the step
    is redone from the last pre-event state with single RK4 steps of every
    length, and whichever of ``U = 0`` or ``V = 0`` comes first is root-found.
    """
    if code == 0:
        return float(r[-1]), float(U[-1]), float(V[-1]), code
    r0, U0, V0, H = float(r[-2]), float(U[-2]), float(V[-2]), float(r[-1] - r[-2])
    steps = H * np.arange(1, n_fan + 1) / n_fan
    Us, Vs = _rk4_fan(r0, U0, V0, steps, p, d)
    flags = (Us <= 0.0) | (Vs >= 0.0)
    if not flags.any():
        return float(r[-1]), float(U[-1]), float(V[-1]), code
    i = int(np.argmax(flags))
    a = 0.0 if i == 0 else steps[i - 1]
    b = steps[i]
    comp = lambda k: (lambda x: float(_rk4_fan(r0, U0, V0, np.array([x]), p, d)[k][0]))
    roots = {}
    if Us[i] <= 0.0:
        roots[1] = brentq(comp(0), a, b, xtol=1e-15, rtol=1e-15) if comp(0)(a) > 0.0 else a
    if Vs[i] >= 0.0:
        roots[2] = brentq(comp(1), a, b, xtol=1e-15, rtol=1e-15) if comp(1)(a) < 0.0 else a
    code = min(roots, key=roots.get)
    x = roots[code]
    Ue, Ve = _rk4_fan(r0, U0, V0, np.array([x]), p, d)
    return r0 + x, float(Ue[0]), float(Ve[0]), code


def _trajectory(h, p, d, path, dr, tol):
    r, U, V, code = path
    r_ev, U_ev, V_ev, code = _event_state(r, U, V, code, p, d)
    tag = _CODE_TAGS[code]
    if code == 2 and U_ev <= 10.0 * tol:
        tag = HIT_ZERO  # tangential touchdown
    # prepend the exact center state so that V(0) = 0 is part of the record
    return Trajectory(r=np.concatenate([[0.0], r]), U=np.concatenate([[h], U]),
                      V=np.concatenate([[0.0], V]), event=tag, r_event=float(r_ev),
                      U_event=float(U_ev), V_event=float(V_ev), steps_per_unit=1.0 / dr)


def integrate_fixed(p, d, h, dr, r_max, tol=1e-10, backend=None):
    """One RK4 run on the node grid with uniform step ``dr`` (no refinement)."""
    d = int(d)
    return _trajectory(h, p, d, _path(h, p, d, radial_nodes(d, dr, r_max), backend), dr, tol)


def integrate_el(p, d, h, r_max, tol=1e-10, backend=None, max_doublings=8):
    """Integrate the radial EL equation from the center value ``h`` until the first event.

    The fixed step starts at ``sqrt(lambda1)/2048`` and is halved until the
    doubled-step difference of U (compared on the coarse nodes) is below ``tol``.
    ``p = 1`` gives the linear system ``U' = V, V' = 1 - U - (d-1)/r V``.
    """
    if not 1.0 <= p < 2.0:
        raise ValueError(f"integrate_el needs p in [1, 2), got {p}")
    if not h > 1.0:
        raise ValueError(f"center value h = {h} must exceed 1")
    d = int(d)
    dr = spectral_data(d).R1 / 2048.0
    coarse = _path(h, p, d, radial_nodes(d, dr, r_max), backend)
    for _ in range(max_doublings):
        dr /= 2.0
        fine = _path(h, p, d, radial_nodes(d, dr, r_max), backend)
        r_c, U_c = coarse[0], coarse[1]
        n_cmp = np.searchsorted(r_c, min(r_c[-1], fine[0][-1]), side="right") - 1
        n_cmp = max(n_cmp, 1)
        spline = _hermite_U(fine[0], fine[1], fine[2])
        diff = np.max(np.abs(spline(r_c[:n_cmp]) - U_c[:n_cmp]))
        coarse = fine
        if diff <= tol:
            break
    return _trajectory(h, p, d, coarse, dr, tol)


# -- closed forms ------------------------------------------------------------

def norms_from_mu(p, d, mu):
    """Norm triple of the ground state implied by the two identities and ``mu``."""
    if not 1.0 <= p < 2.0:
        raise ValueError(f"norms_from_mu needs p in [1, 2), got {p}")
    if not mu > 0.0:
        raise ValueError("mu must be positive")
    a, b = gn_exponents(p, d)
    P = mu ** (p / (p - 2.0))
    return NormTriple(G=a / b * P, P=P, M=(1.0 + a / b) * P)


def pohozaev_residuals(p, d, norms):
    """Relative residuals of ``G + P = M`` and ``(d-2)/(2d) G + P/p = M/2``."""
    G, P, M = norms.G, norms.P, norms.M
    if not M > 0.0:
        raise ValueError("pohozaev_residuals: zero triple")
    res1 = (G + P - M) / M
    res2 = ((d - 2.0) / (2.0 * d) * G + P / p - 0.5 * M) / M
    return res1, res2


def touchdown_coefficients(p, d, R):
    """``(m, A, c1, c2)`` of ``u = A s^m (1 + c1 s + c2 s^2)`` at the support edge."""
    m = 2.0 / (2.0 - p)
    A = (m * (m - 1.0)) ** (-1.0 / (2.0 - p))
    c1 = (d - 1.0) / (R * (p + 2.0))
    num = (-16 * R**2 * m**2 + 16 * R**2 * m - 4 * R**2
           + 3 * d**2 * m**3 + 5 * d**2 * m**2 - 4 * d**2 * m
           + 10 * d * m**3 - 26 * d * m**2 + 12 * d * m
           - 13 * m**3 + 21 * m**2 - 8 * m)
    c2 = num / (24.0 * R**2 * m * (2.0 * m - 1.0) ** 2)
    return m, A, c1, c2


# -- bisection on the center value --------------------------------------------

def _classify(hs, p, d, nodes, K):
    codes, _ = K.el_shoot(np.asarray(hs, dtype=float), float(p), float(d), nodes)
    codes = np.asarray(codes)
    if np.any(codes == -1):
        raise FloatingPointError("non-finite state while shooting; step too large")
    # running past r_max without an event means u never reached zero: undershoot
    return np.where(codes == 0, 2, codes)


def _bisect_center(p, d, nodes, K, lo=1.0 + 1e-6, hi=50.0, h_cap=800.0):
    if _classify([lo], p, d, nodes, K)[0] != 2:
        raise ShootingError(f"h = {lo} does not undershoot for (p, d) = ({p}, {d})")
    while _classify([hi], p, d, nodes, K)[0] != 1:
        lo, hi = hi, 2.0 * hi
        if hi > h_cap:
            raise ShootingError(f"no overshoot found below h = {h_cap} for (p, d) = ({p}, {d})")
    batch = K.shoot_batch
    for _ in range(400):
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
        cand = lo + (hi - lo) * np.arange(1, batch + 1) / (batch + 1)
        cand = cand[(cand > lo) & (cand < hi)]
        if cand.size == 0:
            break
        codes = _classify(cand, p, d, nodes, K)
        over = np.nonzero(codes == 1)[0]
        if over.size:
            j = over[0]
            hi = cand[j]
            if j > 0:
                lo = cand[j - 1]
        else:
            lo = cand[-1]
    return lo, hi


def _core_match(h, p, d, nodes, u_match, backend):
    """Radius and slope where the forward solution at ``h`` first falls to ``u_match``."""
    r, U, V, code = _path(h, p, d, nodes, backend)
    k = np.nonzero(U < u_match)[0]
    if k.size == 0:
        raise ShootingError("forward solution never fell to the matching level")
    k = k[0]
    sl = slice(k - 1, k + 1)
    su = _hermite_U(r[sl], U[sl], V[sl])
    sv = _hermite_V(r[sl], U[sl], V[sl], p, d)
    r_m = _solve_in_step(su, u_match, r[k - 1], r[k])
    return r_m, float(sv(r_m)), (r, U, V, code)


def _tail(p, d, R, u_match, dt, s0, backend):
    K = kernels.get_kernels(backend)
    m, A, c1, c2 = touchdown_coefficients(p, d, R)
    a0 = A * (1.0 + c1 * s0 + c2 * s0 * s0)
    b0 = A * (m + c1 * (m + 1.0) * s0 + c2 * (m + 2.0) * s0 * s0)
    t0 = math.log(s0)
    nmax = int(math.ceil((math.log(R * (1.0 - 1e-9)) - t0) / dt))
    ts, As, Bs = K.tail_path(a0, b0, t0, dt, nmax, float(p), float(d), m, float(R), float(u_match))
    ts, As, Bs = np.asarray(ts), np.asarray(As), np.asarray(Bs)
    if math.exp(m * ts[-1]) * As[-1] < u_match:
        raise ShootingError("tail integration did not reach the matching level")
    s = np.exp(ts)
    da = Bs - m * As
    db = (-(m - 1.0) * Bs + (d - 1.0) * s / (R - s) * Bs - s * s * As + As ** (p - 1.0))
    sa = CubicHermiteSpline(ts, As, da)
    sb = CubicHermiteSpline(ts, Bs, db)
    k = len(ts) - 1
    t_m = _solve_in_step(lambda t: math.exp(m * t) * sa(t), u_match, ts[k - 1], ts[k])
    s_m = math.exp(t_m)
    W_m = s_m ** (m - 1.0) * float(sb(t_m))
    return s_m, W_m, (m, A, c1, c2, ts, sa, sb)


def _tail_converged(p, d, R, u_match, s0, tol, backend, dt=1.0 / 128):
    prev = _tail(p, d, R, u_match, dt, s0, backend)
    for _ in range(10):
        dt /= 2.0
        cur = _tail(p, d, R, u_match, dt, s0, backend)
        if abs(cur[0] - prev[0]) <= tol:
            return cur, dt
        prev = cur
    return cur, dt


def _assemble_profile(p, d, h, R, r_m, core, tail, n_knots, s0):
    r_core, U_core, V_core, _ = core
    m, A, c1, c2, ts, sa, sb = tail
    knots = np.linspace(0.0, R, n_knots)
    values = np.empty(n_knots)
    slopes = np.empty(n_knots)
    inner = knots <= r_m
    keep = r_core <= r_m + 4.0 * (r_core[-1] - r_core[-2])
    curv = (h ** (p - 1.0) - h) / d
    # exact center state (U = h, V = 0, V' = curv) so r = 0 is inside the interpolant
    nodes = np.concatenate([[0.0], r_core[keep]])
    Uc = np.concatenate([[h], U_core[keep]])
    Vc = np.concatenate([[0.0], V_core[keep]])
    su = CubicHermiteSpline(nodes, Uc, Vc)
    dV = el_rhs(nodes[1:], Uc[1:], Vc[1:], p, d)
    sv = CubicHermiteSpline(nodes, Vc, np.concatenate([[curv], dV]))
    values[inner] = su(knots[inner])
    slopes[inner] = sv(knots[inner])

    outer = ~inner
    s = R - knots[outer]
    u_out = np.empty(s.shape)
    v_out = np.empty(s.shape)
    near = s < s0
    sn = s[near]
    u_out[near] = A * sn ** m * (1.0 + c1 * sn + c2 * sn * sn)
    v_out[near] = -A * (m * sn ** (m - 1.0) + c1 * (m + 1.0) * sn ** m + c2 * (m + 2.0) * sn ** (m + 1.0))
    far = ~near
    with np.errstate(divide="ignore"):
        tf = np.log(s[far])
    u_out[far] = s[far] ** m * sa(tf)
    v_out[far] = -(s[far] ** (m - 1.0)) * sb(tf)
    values[outer] = u_out
    slopes[outer] = v_out
    values[-1] = 0.0
    slopes[-1] = 0.0
    slopes[0] = 0.0
    return RadialProfile(d=d, knots=knots, values=np.clip(values, 0.0, None), slopes=slopes)


def shoot(p, d, tol=1e-10, n_knots=4097, backend=None):
    """Certified compactly supported ground state for ``p`` in (1, 2), ``d`` in [1, 10]."""
    return _shoot_cached(float(p), int(d), float(tol), int(n_knots), backend)


@lru_cache(maxsize=64)
def _shoot_cached(p, d, tol, n_knots, backend):
    if not 1.0 < p < 2.0:
        raise ValueError(f"shoot needs p in (1, 2), got {p}")
    if not 1 <= d <= 10:
        raise ValueError(f"shoot needs an integer d in [1, 10], got {d}")
    K = kernels.get_kernels(backend)
    z = spectral_data(d).z
    r_max = max(1.5 * z / math.sqrt(2.0 - p) + 5.0, 4.0 * z)
    dr = z / 2048.0

    core_ok = False
    for _ in range(9):
        nodes = radial_nodes(d, dr, r_max)
        lo, hi = _bisect_center(p, d, nodes, K)
        h = 0.5 * (lo + hi)
        u_match = 0.5 * h
        if not core_ok:
            r_m, V_m, core = _core_match(h, p, d, nodes, u_match, backend)
            r_m2, V_m2, _ = _core_match(h, p, d, radial_nodes(d, dr / 2.0, r_max), u_match, backend)
            core_ok = abs(r_m2 - r_m) <= tol and abs(V_m2 - V_m) <= tol
        else:
            r_m, V_m, core = _core_match(h, p, d, nodes, u_match, backend)
        # terminal state at h*, read on the overshoot side of the bracket where U = 0
        # exactly; the touchdown slope is what the step size still controls
        r_t, U_t, V_t, code_t = _path(hi, p, d, nodes, backend)
        r_e, U_e, V_e, code_e = _event_state(r_t, U_t, V_t, code_t, p, d)
        terminal = (r_e, U_e, V_e, _CODE_TAGS[code_e])
        if core_ok and abs(terminal[2]) <= math.sqrt(tol):
            break
        dr /= 2.0
    else:
        raise ShootingError(f"step refinement did not reach tol = {tol}")

    s0 = 1e-3
    # the forward event radius is a rough (dh^(1/m)-accurate) start for the fixed point
    R = max(terminal[0], r_m + 10.0 * s0)
    for _ in range(60):
        try:
            (s_m, W_m, tail), dt = _tail_converged(p, d, R, u_match, s0, tol, backend)
        except ShootingError:
            R = r_m + 1.25 * (R - r_m)
            continue
        R_new = r_m + s_m
        if abs(R_new - R) <= 1e-14 * R_new:
            R = R_new
            break
        R = R_new
    else:
        raise ShootingError("support radius fixed point did not converge")
    (s_m, W_m, tail), dt = _tail_converged(p, d, R, u_match, s0, tol, backend)
    match_residual = abs(V_m + W_m) / abs(V_m)

    profile = _assemble_profile(p, d, h, R, r_m, core, tail, n_knots, s0)
    norms = norm_triple(profile, p)
    mu = norms.P ** ((p - 2.0) / p)
    res1, res2 = pohozaev_residuals(p, d, norms)

    # monotone dichotomy on the final bracket, checked rather than assumed
    codes = _classify([lo, hi], p, d, nodes, K)
    if not (codes[0] == 2 and codes[1] == 1):
        raise ShootingError("final bracket lost its undershoot/overshoot dichotomy")

    return ShootingResult(
        p=p, d=d, h=h, R_p=R, profile=profile, mu_p=mu, norms=norms, res1=res1, res2=res2,
        bracket=(lo, hi), terminal=terminal, match_residual=match_residual,
        n_steps=len(nodes),
        diagnostics={"dr": dr, "r_max": r_max, "dt_tail": dt, "r_match": r_m, "u_match": u_match,
                     "backend": K.name},
    )


@dataclass(frozen=True)
class SweepRow:
    p: float
    h: float
    R: float
    mu: float
    cgn: float
    r_gap: float


def sweep_p(d, p_list, tol=1e-10):
    """Ground-state summaries along ``p_list`` with ``C_GN(p) = Q_p[u_p]``."""
    R1 = spectral_data(d).R1
    rows = []
    for p in p_list:
        res = shoot(p, d, tol)
        rows.append(SweepRow(p=float(p), h=res.h, R=res.R_p, mu=res.mu_p,
                             cgn=gn_quotient(res.profile, p), r_gap=abs(res.R_p - R1)))
    return rows


def d1_center_value(p):
    """Exact center value in d = 1 (zero first integral): ``(2/p)^(1/(2-p))``."""
    return (2.0 / p) ** (1.0 / (2.0 - p))
