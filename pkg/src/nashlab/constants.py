"""Optimal and comparison constants for the Nash / Gagliardo-Nirenberg family.

Convention: ``C_Nash`` is the *supremum* of the Nash quotient, ``C_GN(p)`` the
*infimum* of ``Q_p``.  The two are reciprocal-power related, so the Hoelder
comparison reads ``C_GN(p) <= C_Nash**(-a/(a+b))`` and the ``p -> 1`` limit is
``C_Nash**(-d/(d+2))``.
"""

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .radial import gn_quotient
from .shooting import shoot
from .specfun import gamma, nash_constant, spectral_data


@dataclass(frozen=True)
class ExponentPair:
    a: float
    b: float

    @property
    def total(self):
        return self.a + self.b


def exponents(p, d):
    """``a = d(2-p)``, ``b = 2p``."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"exponents: p = {p} outside [1, 2]")
    if d < 1:
        raise ValueError(f"exponents: d = {d} < 1")
    return ExponentPair(a=d * (2.0 - p), b=2.0 * p)


def cgn(p, d, tol=1e-10):
    """Optimal GN constant, realized as ``Q_p`` of the shot ground state."""
    return gn_quotient(shoot(p, d, tol).profile, p)


def kgn(p, lam, d, cgn_value=None):
    """``K_GN(p, lam) = ((a+b) / (a^(a/(a+b)) b^(b/(a+b)))) lam^(b/(a+b)) C_GN(p)``.

    Equals 1 at ``lam = mu_p`` (the optimal Lagrange multiplier).
    """
    if not lam > 0.0:
        raise ValueError(f"kgn: lambda = {lam} must be positive")
    e = exponents(p, d)
    c = cgn(p, d) if cgn_value is None else cgn_value
    s = e.total
    pref = s / (e.a ** (e.a / s) * e.b ** (e.b / s))
    return pref * lam ** (e.b / s) * c


def holder_bound(p, d):
    """Upper bound ``C_Nash**(-a/(a+b))`` for ``C_GN(p)``."""
    e = exponents(p, d)
    return nash_constant(d) ** (-e.a / e.total)


def sobolev_constant(d):
    """Sharp Sobolev constant ``(1/(d(d-2)pi)) (Gamma(d)/Gamma(d/2))^(2/d)``, d > 2."""
    d = float(d)
    if not d > 2.0:
        raise ValueError(f"sobolev_constant needs d > 2, got {d}")
    return (gamma(d) / gamma(d / 2.0)) ** (2.0 / d) / (d * (d - 2.0) * math.pi)


def c1_bound(d):
    """Log-Sobolev route constant ``2/(pi d e)``."""
    if d < 1:
        raise ValueError(f"c1_bound: d = {d} < 1")
    return 2.0 / (math.pi * d * math.e)


def c2_bound(d):
    """Fourier-splitting constant ``(1/4pi) ((d+2)/d)^(1+2/d) Gamma(d/2)^(-2/d)``."""
    d = float(d)
    if d < 1:
        raise ValueError(f"c2_bound: d = {d} < 1")
    return ((d + 2.0) / d) ** (1.0 + 2.0 / d) * gamma(d / 2.0) ** (-2.0 / d) / (4.0 * math.pi)


def gaussian_lower(d):
    """Nash quotient of any Gaussian: ``1/(2 pi d)``."""
    return 1.0 / (2.0 * math.pi * d)


@dataclass(frozen=True)
class ConstantsRow:
    d: float
    lambda1: float
    c_nash: float
    c1: float
    c2: float
    sobolev: float  # None for d <= 2
    gaussian_lower: float

    def upper_bounds(self):
        b = [self.c1, self.c2]
        if self.sobolev is not None:
            b.append(self.sobolev)
        return b

    def ordering_ok(self):
        return self.gaussian_lower < self.c_nash <= min(self.upper_bounds())

    def as_csv_fields(self):
        sob = "" if self.sobolev is None else f"{self.sobolev:.17g}"
        return [f"{self.d:.17g}", f"{self.lambda1:.17g}", f"{self.c_nash:.17g}",
                f"{self.c1:.17g}", f"{self.c2:.17g}", sob, f"{self.gaussian_lower:.17g}"]


def constants_row(d):
    d = float(d)
    return ConstantsRow(
        d=d,
        lambda1=spectral_data(d).lambda1,
        c_nash=nash_constant(d),
        c1=c1_bound(d),
        c2=c2_bound(d),
        sobolev=sobolev_constant(d) if d > 2.0 else None,
        gaussian_lower=gaussian_lower(d),
    )


def figure_data(d_min=1.0, d_max=10.0, n=200):
    """Rows of :func:`constants_row` on ``np.linspace(d_min, d_max, n)``."""
    if n < 1:
        raise ValueError("figure_data needs n >= 1")
    if d_min < 1.0 or d_max < d_min:
        raise ValueError(f"bad range [{d_min}, {d_max}]")
    if n == 1 and d_min != d_max:
        raise ValueError("a single row needs d_min == d_max")
    return [constants_row(d) for d in np.linspace(d_min, d_max, int(n))]


FIGURE_HEADER = ["d", "lambda1", "c_nash", "c1", "c2", "sobolev", "lower"]

FIGURE_LEGEND = {
    "d": "dimension (real)",
    "lambda1": "first radial Neumann eigenvalue of the unit ball",
    "c_nash": "sharp Nash constant",
    "c1": "log-Sobolev route bound 2/(pi d e)",
    "c2": "Fourier-splitting bound",
    "sobolev": "Sobolev bound S_d (empty for d <= 2)",
    "lower": "Gaussian lower bound 1/(2 pi d)",
}


def figure_csv(rows, fh=None):
    own = fh is None
    fh = io.StringIO() if own else fh
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FIGURE_HEADER)
    for row in rows:
        w.writerow(row.as_csv_fields())
    return fh.getvalue() if own else None
