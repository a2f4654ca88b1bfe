"""L2 decay of heat-equation solutions against the Nash and Young envelopes.

Two evolutions are provided: the exact one for Gaussian data in any dimension,
and a trapezoid convolution on a uniform grid for radial data in d = 1.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .radial import RadialProfile, grad_l2_sq, lp_norm
from .specfun import nash_constant, optimal_profile, spectral_data

# 2 sqrt(t) is the kernel's length scale; erfc(5) ~ 1.5e-12
_DEFAULT_TAIL = 10.0
_TAIL_MASS_TOL = 1e-10


def heat_kernel(t, rho, d):
    """``(4 pi t)^(-d/2) exp(-rho^2 / 4t)``."""
    if not t > 0.0:
        raise ValueError(f"heat_kernel needs t > 0, got {t}")
    rho = np.asarray(rho, dtype=float)
    out = (4.0 * math.pi * t) ** (-d / 2.0) * np.exp(-rho * rho / (4.0 * t))
    return float(out) if out.ndim == 0 else out


def nash_envelope(t, l2_0, l1_0, d):
    """``(l2_0^(-4/d) + (4/d) C_Nash^-1 l1_0^(-4/d) t)^(-d/4)``."""
    if not (l2_0 > 0.0 and l1_0 > 0.0):
        raise ValueError("nash_envelope needs positive initial norms")
    if t < 0.0:
        raise ValueError(f"nash_envelope needs t >= 0, got {t}")
    c = nash_constant(d)
    base = l2_0 ** (-4.0 / d) + (4.0 / d) / c * l1_0 ** (-4.0 / d) * t
    return base ** (-d / 4.0)


def young_envelope(t, l1_0, d):
    """``(8 pi t)^(-d/4) l1_0``; infinite at ``t = 0``."""
    if t < 0.0 or l1_0 < 0.0:
        raise ValueError("young_envelope needs t >= 0 and l1_0 >= 0")
    if l1_0 == 0.0:
        return 0.0
    if t == 0.0:
        return math.inf
    return (8.0 * math.pi * t) ** (-d / 4.0) * l1_0


@dataclass(frozen=True)
class DecaySample:
    t: float
    l2: float
    nash_env: float
    young_env: float
    mass: float = None

    @property
    def envelope(self):
        return min(self.nash_env, self.young_env)

    def within(self, rel=1e-6):
        return self.l2 <= self.envelope * (1.0 + rel)


def evolve_gaussian(eps, t, d):
    """``u0 = G(eps, .)`` evolves to ``G(t + eps, .)``; norms in closed form."""
    if not eps > 0.0:
        raise ValueError(f"evolve_gaussian needs eps > 0, got {eps}")
    if t < 0.0:
        raise ValueError(f"evolve_gaussian needs t >= 0, got {t}")
    l2_0 = (8.0 * math.pi * eps) ** (-d / 4.0)
    l2 = (8.0 * math.pi * (t + eps)) ** (-d / 4.0)
    return DecaySample(t=float(t), l2=l2, nash_env=nash_envelope(t, l2_0, 1.0, d),
                       young_env=young_envelope(t, 1.0, d), mass=1.0)


# -- d = 1 convolution -------------------------------------------------------

def symmetric_grid(support, half_width, n, t=None):
    """Uniform grid on ``[-L, L]`` with ``+-support`` on the nodes.

    About ``n`` points; refined further when the step would not resolve the
    kernel at time ``t``.
    """
    k = max(1, int(math.ceil(0.5 * (n - 1) * support / half_width)))
    h = support / k
    if t is not None and h > math.sqrt(t) / 3.0:
        k = int(math.ceil(3.0 * support / math.sqrt(t)))
        h = support / k
    J = int(math.ceil(half_width / h - 1e-9))
    return h * np.arange(-J, J + 1, dtype=float), h


def evolve_grid(values, h, t):
    """Heat flow of grid samples by trapezoid convolution (zero outside the grid)."""
    if not t > 0.0:
        raise ValueError(f"evolve_grid needs t > 0, got {t}")
    values = np.ascontiguousarray(values, dtype=float)
    n = values.shape[0]
    offsets = h * np.arange(-(n - 1), n, dtype=float)
    kern = heat_kernel(t, offsets, 1) * h
    return np.asarray(kernels.convolve_1d(values, kern))


def _grid_norms(u, h):
    return float(h * np.sum(np.abs(u))), math.sqrt(float(h * np.sum(u * u)))


def evolve_convolution_1d(u0, t, half_width=None, n=4096, return_grid=False):
    """Evolve a d = 1 profile to time ``t`` by quadrature convolution.

    ``half_width`` defaults to ``R + 10 sqrt(t)``; anything that lets more than
    1e-10 of the mass leave the grid is rejected.
    """
    if not isinstance(u0, RadialProfile) or u0.d != 1:
        raise ValueError("evolve_convolution_1d needs a d = 1 RadialProfile")
    if not t > 0.0:
        raise ValueError(f"evolve_convolution_1d needs t > 0, got {t}")
    if n < 16:
        raise ValueError("evolve_convolution_1d needs n >= 16")
    R = u0.support_radius
    st = math.sqrt(t)
    L = R + _DEFAULT_TAIL * st if half_width is None else float(half_width)
    if L < R + 6.0 * st:
        raise ValueError(f"half_width {L} < R + 6 sqrt(t) = {R + 6.0 * st}")
    # mass escaping [-L, L] is at most |u0|_1 erfc((L - R) / (2 sqrt t))
    if math.erfc((L - R) / (2.0 * st)) > _TAIL_MASS_TOL:
        raise ValueError(f"half_width {L} lets more than {_TAIL_MASS_TOL:g} of the mass escape")
    x, h = symmetric_grid(R, L, n, t)
    v0 = u0(np.abs(x))
    l1_0, l2_0 = _grid_norms(v0, h)
    u = evolve_grid(v0, h, t)
    mass, l2 = _grid_norms(u, h)
    sample = DecaySample(t=float(t), l2=l2, nash_env=nash_envelope(t, l2_0, l1_0, 1),
                         young_env=young_envelope(t, l1_0, 1), mass=mass)
    if return_grid:
        return sample, x, u
    return sample


def cosine_profile_1d(n_knots=2049):
    """``1 + cos x`` on ``[-pi, pi]`` (the d = 1 optimizer at its natural scale)."""
    return optimal_profile(1, n_knots).scaled(sigma=math.pi)


# -- sharpness at t = 0 -------------------------------------------------------

@dataclass(frozen=True)
class SharpnessReport:
    d: int
    lhs: float  # 2 |grad u0|^2 = -(d/dt)|u|_2^2 at t = 0
    rhs: float  # what the differential inequality allows
    gap: float  # (rhs - lhs) / rhs

    @property
    def ratio(self):
        return self.lhs / self.rhs


def t0_sharpness_check(d, u0=None):
    """Compare ``2|grad u0|^2`` with ``2 C_Nash^-1 |u0|_1^(-4/d) |u0|_2^(2+4/d)``.

    Default ``u0`` is the optimizer scaled to radius ``sqrt(lambda1)``.  The
    gap is zero exactly when ``u0`` saturates Nash's inequality.
    """
    if u0 is None:
        u0 = optimal_profile(d, 4097).scaled(sigma=spectral_data(d).R1)
    if u0.d != d:
        raise ValueError("profile dimension does not match d")
    G = grad_l2_sq(u0)
    l1 = lp_norm(u0, 1.0)
    l2 = lp_norm(u0, 2.0)
    lhs = 2.0 * G
    rhs = 2.0 / nash_constant(d) * l1 ** (-4.0 / d) * l2 ** (2.0 + 4.0 / d)
    return SharpnessReport(d=d, lhs=lhs, rhs=rhs, gap=(rhs - lhs) / rhs)


def gaussian_gap(d):
    """``8 pi - 4/(d C_Nash)``: positive means Young wins for large times."""
    return 8.0 * math.pi - 4.0 / (d * nash_constant(d))


# -- crossover ---------------------------------------------------------------

@dataclass(frozen=True)
class Crossover:
    t_star: float  # None when one envelope is tighter everywhere in the window
    before: str  # tighter envelope for t < t_star
    after: str


def crossover(d, l1_0, l2_0, window=1e12):
    """Time where the Nash and Young envelopes meet (bisection in ``log t``).

    The search runs over ``tau * [1/window, window]`` with the natural time
    ``tau = (l1_0 / l2_0)^(4/d)``, which makes ``t*`` invariant under
    ``u0 -> c u0``.
    """
    if not (l1_0 > 0.0 and l2_0 > 0.0):
        raise ValueError("crossover needs positive norms")
    tau = (l1_0 / l2_0) ** (4.0 / d)

    def f(logt):
        t = math.exp(logt)
        return math.log(nash_envelope(t, l2_0, l1_0, d)) - math.log(young_envelope(t, l1_0, d))

    a, b = math.log(tau / window), math.log(tau * window)
    fa, fb = f(a), f(b)
    name = lambda v: "nash" if v < 0.0 else "young"
    if fa * fb > 0.0:
        return Crossover(t_star=None, before=name(fa), after=name(fb))
    for _ in range(200):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0 or b - a < 1e-15:
            a = b = m
            break
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return Crossover(t_star=math.exp(0.5 * (a + b)), before=name(fa), after=name(fb))


# -- scenarios / CSV -----------------------------------------------------------

def decay_series(times, scenario="cosine", d=1, eps=0.05):
    """Decay samples for ``"gaussian"`` (any d) or ``"cosine"`` (1 + cos, d = 1)."""
    if scenario == "gaussian":
        return [evolve_gaussian(eps, t, d) for t in times]
    if scenario == "cosine":
        if d != 1:
            raise ValueError("the cosine scenario is one-dimensional")
        u0 = cosine_profile_1d()
        out = []
        for t in times:
            if t == 0.0:
                l1, l2 = lp_norm(u0, 1.0), lp_norm(u0, 2.0)
                out.append(DecaySample(0.0, l2, l2, math.inf, l1))
            else:
                out.append(evolve_convolution_1d(u0, t))
        return out
    raise ValueError(f"unknown heat scenario {scenario!r}")


def decay_csv(samples, fh=None):
    own = fh is None
    fh = io.StringIO() if own else fh
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "l2", "nash_env", "young_env"])
    for s in samples:
        w.writerow([f"{s.t:.17g}", f"{s.l2:.17g}", f"{s.nash_env:.17g}", f"{s.young_env:.17g}"])
    return fh.getvalue() if own else None
