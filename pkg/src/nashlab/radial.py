"""Sampled radial functions on R^d, their norms, and the Nash / GN quotients.

A profile lives on the half-line: knots ``0 = r_0 < ... < r_n = R`` with
values ``u(r_i)``.  Every full-space integral carries the surface factor

    int_{R^d} f(|x|) dx = d * omega_d * int_0^R f(r) r^(d-1) dr,

so callers never have to remember it.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline, CubicSpline


def _ball_volume(d):
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def surface_factor(d):
    """``d * omega_d``, the area of the unit sphere in R^d."""
    return d * _ball_volume(d)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Nonnegative radial function sampled on a uniform grid starting at 0."""

    d: int
    knots: np.ndarray
    values: np.ndarray
    slopes: np.ndarray = None

    def __post_init__(self):
        knots = np.array(self.knots, dtype=float)
        values = np.array(self.values, dtype=float)
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"profile dimension must be an integer >= 1, got {self.d}")
        if knots.ndim != 1 or knots.shape != values.shape:
            raise ValueError("knots and values must be 1-d arrays of equal length")
        if knots.size < 2:
            raise ValueError("degenerate profile: fewer than 2 knots")
        if knots[0] != 0.0:
            raise ValueError("knots must start at r = 0")
        steps = np.diff(knots)
        if np.any(steps <= 0.0):
            raise ValueError("knots must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-9 * knots[-1]:
            raise ValueError("knots must be uniformly spaced")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(knots))):
            raise ValueError("profile entries must be finite")
        if np.any(values < 0.0):
            raise ValueError("profile values must be nonnegative")
        slopes = self.slopes
        if slopes is not None:
            slopes = np.array(slopes, dtype=float)
            if slopes.shape != knots.shape or not np.all(np.isfinite(slopes)):
                raise ValueError("slopes must be finite and match the knots")
            slopes.setflags(write=False)
        knots.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "slopes", slopes)

    @property
    def support_radius(self):
        return float(self.knots[-1])

    @property
    def step(self):
        return float(self.knots[1] - self.knots[0])

    def derivative(self):
        """Slopes if stored, else centered differences (one-sided at the ends)."""
        if self.slopes is not None:
            return self.slopes
        return np.gradient(self.values, self.knots, edge_order=2)

    def scaled(self, sigma=1.0, amplitude=1.0):
        """The profile of ``amplitude * u(x / sigma)``."""
        slopes = None if self.slopes is None else self.slopes * amplitude / sigma
        return RadialProfile(self.d, self.knots * sigma, self.values * amplitude, slopes)

    def interpolator(self):
        """C^1 interpolant of the values (Hermite when slopes are known)."""
        if self.slopes is not None:
            return CubicHermiteSpline(self.knots, self.values, self.slopes)
        return CubicSpline(self.knots, self.values)

    def __call__(self, r):
        """Evaluate by interpolation; zero beyond the last knot."""
        r = np.asarray(r, dtype=float)
        inside = r <= self.support_radius
        out = np.where(inside, self.interpolator()(np.clip(r, 0.0, self.support_radius)), 0.0)
        return np.clip(out, 0.0, None)

    def resample(self, n_knots, radius=None):
        """Same function on a new uniform grid ``[0, radius]`` (zero past support)."""
        radius = self.support_radius if radius is None else float(radius)
        r = np.linspace(0.0, radius, int(n_knots))
        spline = self.interpolator()
        inside = r <= self.support_radius
        rc = np.clip(r, 0.0, self.support_radius)
        vals = np.where(inside, np.clip(spline(rc), 0.0, None), 0.0)
        slopes = np.where(inside, spline(rc, 1), 0.0)
        return RadialProfile(self.d, r, vals, slopes)


@dataclass(frozen=True)
class NormTriple:
    """``G = |grad u|_2^2``, ``P = |u|_p^p``, ``M = |u|_2^2``."""

    G: float
    P: float
    M: float


def radial_integral(r, f, d):
    """``d omega_d int f(r) r^(d-1) dr`` over a uniform grid ``r`` (composite Simpson)."""
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    if r.size < 2:
        raise ValueError("degenerate grid: fewer than 2 knots")
    if r.size == 2:
        return surface_factor(d) * float(np.trapezoid(f * r ** (d - 1), r))
    return surface_factor(d) * float(simpson(f * r ** (d - 1), x=r))


def _power_integral(u, q):
    return radial_integral(u.knots, u.values ** q, u.d)


def lp_norm(u, q):
    """``|u|_q`` on R^d for ``q >= 1``."""
    if q < 1.0:
        raise ValueError(f"lp_norm needs q >= 1, got {q}")
    return _power_integral(u, q) ** (1.0 / q)


def grad_l2_sq(u):
    """``|grad u|_2^2`` on R^d; for radial u, ``|grad u| = |u'(r)|``."""
    du = u.derivative()
    return radial_integral(u.knots, du * du, u.d)


def norm_triple(u, p):
    """The three integrals entering the Pohozaev identities."""
    if not np.any(u.values > 0.0):
        return NormTriple(0.0, 0.0, 0.0)
    return NormTriple(G=grad_l2_sq(u), P=_power_integral(u, p), M=_power_integral(u, 2.0))


def nash_quotient(u):
    """``|u|_2^(2+4/d) / (|u|_1^(4/d) |grad u|_2^2)``; at most C_Nash(d)."""
    d = u.d
    G = grad_l2_sq(u)
    if not G > 0.0:
        raise ValueError("nash_quotient: profile has zero gradient (constant or zero)")
    M = _power_integral(u, 2.0)
    L1 = _power_integral(u, 1.0)
    return M ** (1.0 + 2.0 / d) / (L1 ** (4.0 / d) * G)


def gn_exponents(p, d):
    return d * (2.0 - p), 2.0 * p


def gn_quotient(u, p):
    """``Q_p[u] = |grad u|_2^(2a/(a+b)) |u|_p^(2b/(a+b)) / |u|_2^2``, a = d(2-p), b = 2p."""
    if not 1.0 <= p < 2.0:
        raise ValueError(f"gn_quotient needs p in [1, 2), got {p}")
    a, b = gn_exponents(p, u.d)
    G = grad_l2_sq(u)
    if not G > 0.0:
        raise ValueError("gn_quotient: profile has zero gradient (constant or zero)")
    Lp = lp_norm(u, p)
    M = _power_integral(u, 2.0)
    return G ** (a / (a + b)) * Lp ** (2.0 * b / (a + b)) / M


def l2_distance(u, v, n_knots=8193):
    """``|u - v|_2`` on R^d for two profiles of the same dimension, both extended by 0."""
    if u.d != v.d:
        raise ValueError("profiles live in different dimensions")
    radius = max(u.support_radius, v.support_radius)
    r = np.linspace(0.0, radius, n_knots)
    diff = u(r) - v(r)
    return math.sqrt(radial_integral(r, diff * diff, u.d))


# -- CSV ---------------------------------------------------------------------

def profile_to_csv(u, fh=None):
    """Write ``r,u[,du]`` rows with 17 significant digits; returns text if ``fh`` is None."""
    own = fh is None
    fh = io.StringIO() if own else fh
    writer = csv.writer(fh, lineterminator="\n")
    with_slopes = u.slopes is not None
    writer.writerow(["r", "u", "du"] if with_slopes else ["r", "u"])
    for i, r in enumerate(u.knots):
        row = [f"{r:.17g}", f"{u.values[i]:.17g}"]
        if with_slopes:
            row.append(f"{u.slopes[i]:.17g}")
        writer.writerow(row)
    return fh.getvalue() if own else None


def profile_from_csv(fh, d):
    """Read a profile written by :func:`profile_to_csv` (or any ``r,u[,du]`` file)."""
    reader = csv.reader(fh)
    header = [h.strip() for h in next(reader)]
    if header[:2] != ["r", "u"] or len(header) > 3 or (len(header) == 3 and header[2] != "du"):
        raise ValueError(f"unexpected profile CSV header {header}")
    rows = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
    slopes = rows[:, 2] if rows.shape[1] == 3 else None
    return RadialProfile(d=d, knots=rows[:, 0], values=rows[:, 1], slopes=slopes)
