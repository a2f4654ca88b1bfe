"""Special functions behind the spectral characterization of the Nash constant.

Bessel functions are evaluated from the ascending power series.  The float
sum carries its own cancellation estimate (the sum of absolute terms); when
that estimate says double precision cannot deliver ~1e-13 absolute accuracy,
the same series is re-summed in :mod:`decimal` arithmetic.

The radial Neumann eigenfunction is written through the entire function
``g_alpha(x) = x**-alpha * J_alpha(x)``, so that

    phi1(r) = g_alpha(z r) / g_alpha(z),   z = first zero of J_{d/2},

which has no removable singularity at ``r = 0``.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np

from . import kernels
from .radial import RadialProfile

_ABS_ERR_TARGET = 1e-13
_DECIMAL_PREC = 60


def gamma(x):
    """Euler Gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma: domain error, x = {x!r} must be positive")
    return math.gamma(x)


def ball_volume(d):
    """Volume of the unit ball in dimension ``d`` (real ``d >= 1`` allowed)."""
    d = float(d)
    if d < 1.0:
        raise ValueError(f"ball_volume: d = {d} < 1")
    return math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)


def _check_alpha(alpha):
    if alpha < -0.5:
        raise ValueError(f"Bessel order {alpha} < -1/2 is outside the supported range")


def _series_decimal(alpha, x, deriv):
    """Weighted ascending series of g_alpha summed with 60 significant digits."""
    with localcontext() as ctx:
        ctx.prec = _DECIMAL_PREC
        xd = Decimal(float(x))
        y = -(xd * xd) / 4
        a = Decimal(float(alpha))
        T = Decimal(1)
        total = Decimal(1) if deriv == 0 else Decimal(0)
        scale = Decimal(1)
        for k in range(1, kernels.MAX_SERIES_TERMS):
            T = T * y / (k * (k + a))
            if deriv == 0:
                w = T
            elif deriv == 1:
                w = T * (2 * k) / xd
            else:
                w = T * (2 * k) * (2 * k - 1) / (xd * xd)
            total += w
            scale = max(scale, abs(w))
            if abs(w) < Decimal(10) ** (-40) * scale:
                break
        return float(total)


def _g_series(alpha, x, deriv=0):
    """``d^deriv/dx^deriv [x**-alpha J_alpha(x)]`` times ``2**alpha``, vectorized."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    inv_g0 = 1.0 / gamma(alpha + 1.0)
    out = np.empty_like(x)
    zero = x == 0.0
    if zero.any():
        # g(0) = 1/Gamma(a+1); g'(0) = 0; g''(0) = -1/(2 Gamma(a+2))
        out[zero] = (inv_g0, 0.0, -0.5 / gamma(alpha + 2.0))[deriv]
    nz = ~zero
    if nz.any():
        xs = x[nz]
        vals, mags = kernels.series_terms(float(alpha), -(xs * xs) / 4.0, xs, int(deriv), inv_g0)
        vals = np.asarray(vals, dtype=float)
        # float sum loses ~ eps * sum|terms|; fall back to decimal where that is too much
        bad = np.nonzero(mags * 4e-16 * np.maximum(np.abs(xs) ** alpha / 2.0 ** alpha, 1.0)
                         > _ABS_ERR_TARGET)[0]
        for i in bad:
            vals[i] = _series_decimal(alpha, xs[i], deriv) * inv_g0
        out[nz] = vals
    return out


def bessel_g(alpha, x, deriv=0):
    """``x**-alpha J_alpha(x)`` (entire in ``x``) or its first/second derivative."""
    _check_alpha(alpha)
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    scalar = np.ndim(x) == 0
    out = _g_series(alpha, x, deriv) / 2.0 ** alpha
    return float(out[0]) if scalar else out


def bessel_j(alpha, z, deriv=0):
    """Bessel function of the first kind ``J_alpha(z)`` for ``z >= 0``.

    ``deriv`` in {0, 1, 2} returns the term-by-term differentiated series.
    Absolute error stays at the 1e-13 level for ``z <= 30``.
    """
    _check_alpha(alpha)
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z < 0.0):
        raise ValueError("bessel_j: domain error, z must be >= 0")
    if alpha < 0.0 and np.any(z == 0.0):
        raise ValueError("bessel_j: J_alpha(0) is infinite for alpha < 0")
    g = _g_series(alpha, z, 0) / 2.0 ** alpha
    if deriv == 0:
        out = z ** alpha * g
    else:
        # J = z^a g  =>  J' = a z^(a-1) g + z^a g',  J'' = a(a-1) z^(a-2) g + 2a z^(a-1) g' + z^a g''
        g1 = _g_series(alpha, z, 1) / 2.0 ** alpha
        with np.errstate(divide="ignore", invalid="ignore"):
            if deriv == 1:
                out = z ** alpha * g1 + (alpha * z ** (alpha - 1.0) * g if alpha != 0.0 else 0.0)
            else:
                g2 = _g_series(alpha, z, 2) / 2.0 ** alpha
                out = z ** alpha * g2
                if alpha != 0.0:
                    out = out + 2.0 * alpha * z ** (alpha - 1.0) * g1
                    if alpha != 1.0:
                        out = out + alpha * (alpha - 1.0) * z ** (alpha - 2.0) * g
        out = np.where(z == 0.0, _j_derivs_at_zero(alpha, deriv), out)
    return float(out[0]) if scalar else out


def _j_derivs_at_zero(alpha, deriv):
    if deriv == 1:
        return {0.0: 0.0, 1.0: 0.5}.get(alpha, 0.0 if alpha > 1.0 else np.inf)
    if alpha == 0.0:
        return -0.5
    if alpha == 2.0:
        return 0.25
    return 0.0 if alpha > 2.0 else np.inf


@lru_cache(maxsize=512)
def bessel_first_zero(alpha):
    """Smallest positive zero of ``J_alpha`` for ``alpha`` in ``[-1/2, 30]``.

    Scans ``[max(alpha, 0.5), alpha + 10]`` in steps of 0.1 for a sign change
    of ``g_alpha`` (same zeros as ``J_alpha`` on z > 0), then bisects 80 times.
    """
    alpha = float(alpha)
    if not -0.5 <= alpha <= 30.0:
        raise ValueError(f"bessel_first_zero: alpha = {alpha} outside [-1/2, 30]")
    lo = max(alpha, 0.5)
    grid = np.arange(lo, alpha + 10.0 + 1e-12, 0.1)
    vals = bessel_g(alpha, grid)
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0.0)[0]
    if sign_change.size == 0:
        raise RuntimeError(f"no sign change of J_{alpha} found in [{lo}, {alpha + 10}]")
    i = sign_change[0]
    a, b = grid[i], grid[i + 1]
    fa = vals[i]
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = bessel_g(alpha, mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


@dataclass(frozen=True)
class SpectralData:
    d: float
    z: float
    lambda1: float
    R1: float


def spectral_data(d):
    """First radial Neumann eigenvalue of the unit ball: ``lambda1 = z_{d/2}**2``."""
    d = float(d)
    if d < 1.0:
        raise ValueError(f"spectral_data: d = {d} < 1")
    z = bessel_first_zero(d / 2.0)
    return SpectralData(d=d, z=z, lambda1=z * z, R1=z)


def _integer_dim(d):
    if int(d) != d or d < 1:
        raise ValueError(f"integer dimension >= 1 required, got {d}")
    return int(d)


def eigenfunction_phi1(d, r, deriv=0):
    """Radial Neumann eigenfunction on the unit ball, normalized by phi1(1) = 1.

    ``deriv`` = 1 or 2 gives the radial derivatives (from the differentiated
    series), used by the eigen-residual checks and by :func:`optimal_profile`.
    """
    d = _integer_dim(d)
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any((r < 0.0) | (r > 1.0)):
        raise ValueError("eigenfunction_phi1: r must lie in [0, 1]")
    alpha = (d - 2) / 2.0
    z = spectral_data(d).z
    out = bessel_g(alpha, z * r, deriv) * z ** deriv / bessel_g(alpha, z)
    if deriv == 0:
        out = np.where(r == 1.0, 1.0, out)
    return float(out[0]) if scalar else out


def optimal_profile(d, n_knots=2049):
    """Nash optimizer ``1 - phi1(|x|)`` on the unit ball, zero outside."""
    d = _integer_dim(d)
    if n_knots < 16:
        raise ValueError("optimal_profile needs at least 16 knots")
    r = np.linspace(0.0, 1.0, int(n_knots))
    values = np.clip(1.0 - eigenfunction_phi1(d, r), 0.0, None)
    values[-1] = 0.0
    slopes = -eigenfunction_phi1(d, r, deriv=1)
    slopes[0] = 0.0
    slopes[-1] = 0.0
    return RadialProfile(d=d, knots=r, values=values, slopes=slopes)


def nash_constant(d):
    """Sharp constant in Nash's inequality (real ``d >= 1`` allowed)."""
    d = float(d)
    lam = spectral_data(d).lambda1
    return (d + 2.0) ** (1.0 + 2.0 / d) / (d * lam * (2.0 * ball_volume(d)) ** (2.0 / d))
