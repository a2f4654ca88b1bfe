"""Inequality checks over a seeded corpus of radial non-increasing test functions.

Every check returns a :class:`CheckReport` whose ``worst_slack`` is signed and
relative (or a log-ratio where the inequality lives on a log scale); a check
passes when ``worst_slack >= -tolerance``.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import c1_bound, c2_bound, cgn
from .radial import (
    RadialProfile,
    grad_l2_sq,
    gn_quotient,
    l2_distance,
    lp_norm,
    nash_quotient,
    radial_integral,
)
from .shooting import shoot
from .specfun import ball_volume, eigenfunction_phi1, nash_constant, optimal_profile, spectral_data

FAMILIES = ("gaussian", "cosine_bump", "poly_bump", "tent", "scaled_optimizer")
GAUSSIAN_CUTOFF = 8.0
DEFAULT_KNOTS = 2049


@dataclass(frozen=True)
class TestFunctionSpec:
    """``scale`` is s (gaussian), R (bumps, tent) or sigma (scaled optimizer)."""

    __test__ = False  # keep pytest from collecting this as a test class

    family: str
    d: int
    scale: float = 1.0
    k: int = 1
    amplitude: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be an integer >= 1, got {self.d}")
        if not (self.scale > 0.0 and self.amplitude > 0.0):
            raise ValueError("scale and amplitude must be positive")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k}")

    @property
    def support(self):
        return GAUSSIAN_CUTOFF * self.scale if self.family == "gaussian" else self.scale

    def label(self):
        extra = f",k={self.k}" if self.family == "poly_bump" else ""
        return f"{self.family}(d={self.d},scale={self.scale:.6g},amp={self.amplitude:.6g}{extra})"


def generate(spec, n_knots=DEFAULT_KNOTS):
    """Sample ``spec`` on a uniform grid over its support, slopes in closed form."""
    if n_knots < 16:
        raise ValueError("generate needs n_knots >= 16")
    f, s, c = spec.family, spec.scale, spec.amplitude
    if f == "scaled_optimizer":
        return optimal_profile(spec.d, n_knots).scaled(sigma=s, amplitude=c)
    r = np.linspace(0.0, spec.support, int(n_knots))
    x = r / s
    if f == "gaussian":
        e = np.exp(-x * x)
        u, du = e, -2.0 * x * e / s
    elif f == "cosine_bump":
        u, du = 0.5 * (1.0 + np.cos(np.pi * x)), -0.5 * np.pi * np.sin(np.pi * x) / s
    elif f == "poly_bump":
        q = 1.0 - x * x
        u = q ** spec.k
        du = -2.0 * spec.k * x * q ** (spec.k - 1) / s
    else:  # tent
        u, du = 1.0 - x, np.full_like(x, -1.0 / s)
    u = np.clip(u, 0.0, None)
    u[-1] = 0.0 if f != "gaussian" else u[-1]
    return RadialProfile(d=spec.d, knots=r, values=c * u, slopes=c * du)


def corpus(d, seed=0, n=120):
    """``n`` seeded specs in dimension ``d``, cycling through the families."""
    if n < 1:
        raise ValueError("corpus needs n >= 1")
    rng = np.random.default_rng([int(seed), int(d)])
    specs = []
    for i in range(n):
        fam = FAMILIES[i % len(FAMILIES)]
        amp = float(rng.uniform(0.2, 5.0))
        if fam == "gaussian":
            specs.append(TestFunctionSpec(fam, d, float(rng.uniform(0.3, 3.0)), amplitude=amp))
        elif fam == "poly_bump":
            specs.append(TestFunctionSpec(fam, d, float(rng.uniform(0.5, 4.0)),
                                          k=int(rng.integers(1, 6)), amplitude=amp))
        else:
            specs.append(TestFunctionSpec(fam, d, float(rng.uniform(0.5, 4.0)), amplitude=amp))
    return specs


@dataclass
class CheckReport:
    name: str
    n_samples: int
    worst_slack: float
    passed: bool
    seed: int = None
    tolerance: float = 0.0
    worst_sample: str = ""
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = asdict(self)
        out["worst_slack"] = float(self.worst_slack)
        return out


def _finish(name, slacks, labels, tol, seed=None, extra_ok=True, details=None):
    slacks = np.asarray(slacks, dtype=float)
    if slacks.size == 0:
        return CheckReport(name, 0, 0.0, bool(extra_ok), seed, tol, "", details or {})
    i = int(np.argmin(slacks))
    worst = float(slacks[i])
    return CheckReport(name=name, n_samples=int(slacks.size), worst_slack=worst,
                       passed=bool(worst >= -tol and extra_ok), seed=seed, tolerance=tol,
                       worst_sample=labels[i], details=details or {})


def _profiles(specs, n_knots):
    return [(s, generate(s, n_knots)) for s in specs]


# -- Nash ----------------------------------------------------------------------

def normalize_like(u, ref):
    """``c u(x/sigma)`` with the L1 and L2 norms of ``ref``."""
    d = u.d
    a1, a2 = lp_norm(ref, 1.0), lp_norm(ref, 2.0) ** 2
    b1, b2 = lp_norm(u, 1.0), lp_norm(u, 2.0) ** 2
    c = (a2 / b2) / (a1 / b1)
    sigma = ((a1 / b1) / c) ** (1.0 / d)
    return u.scaled(sigma=sigma, amplitude=c)


def optimizer_distance(u):
    """Relative L2 distance to the Nash optimizer after scale/amplitude normalization."""
    ref = optimal_profile(u.d, DEFAULT_KNOTS)
    v = normalize_like(u, ref)
    return l2_distance(v, ref) / lp_norm(ref, 2.0)


def check_nash(specs, tol=1e-6, n_knots=DEFAULT_KNOTS, seed=None,
               near_slack=1e-3, near_dist=0.05, equality_slack=1e-5):
    """``nash_quotient <= C_Nash`` with slack ``1 - Q/C_Nash``.

    Samples with slack below ``near_slack`` must sit within ``near_dist`` of the
    optimizer; scaled optimizers must have slack below ``equality_slack``.
    """
    slacks, labels, bad = [], [], []
    for spec, u in _profiles(specs, n_knots):
        c = nash_constant(spec.d)
        sl = 1.0 - nash_quotient(u) / c
        slacks.append(sl)
        labels.append(spec.label())
        if spec.family == "scaled_optimizer" and sl > equality_slack:
            bad.append(f"{spec.label()}: optimizer slack {sl:.3g}")
        if sl < near_slack:
            dist = optimizer_distance(u)
            if dist >= near_dist:
                bad.append(f"{spec.label()}: slack {sl:.3g} at distance {dist:.3g}")
    return _finish("nash", slacks, labels, tol, seed, not bad, {"violations": bad})


# -- Gagliardo-Nirenberg --------------------------------------------------------

def check_gn(specs, p, tol=1e-4, n_knots=DEFAULT_KNOTS, seed=None, include_ground_state=True):
    """``Q_p[u] >= C_GN(p)`` with slack ``Q_p/C_GN - 1``; the shot ``u_p`` sits at 0."""
    slacks, labels = [], []
    ref = {}
    for spec, u in _profiles(specs, n_knots):
        c = ref.setdefault(spec.d, cgn(p, spec.d))
        slacks.append(gn_quotient(u, p) / c - 1.0)
        labels.append(spec.label())
    details = {"p": p}
    extra_ok = True
    if include_ground_state:
        for d, c in ref.items():
            sl = gn_quotient(shoot(p, d).profile, p) / c - 1.0
            slacks.append(sl)
            labels.append(f"ground_state(d={d},p={p})")
            details[f"ground_state_slack_d{d}"] = sl
            extra_ok = extra_ok and abs(sl) <= 1e-6
    return _finish(f"gn_p{p:g}", slacks, labels, tol, seed, extra_ok, details)


# -- Carlen-Loss chain -----------------------------------------------------------

def _split_integrals(u, R, n=4097):
    """``(|u_R|_1, |u_R|_2^2, |u - u_R|_1, |u - u_R|_2^2)`` with ``u_R = u 1_{B_R}``."""
    S = u.support_radius
    rin = np.linspace(0.0, min(R, S), n)
    vin = u(rin)
    L1in = radial_integral(rin, vin, u.d)
    L2in = radial_integral(rin, vin * vin, u.d)
    if R >= S:
        return L1in, L2in, 0.0, 0.0
    rout = np.linspace(R, S, n)
    vout = u(rout)
    return L1in, L2in, radial_integral(rout, vout, u.d), radial_integral(rout, vout * vout, u.d)


def optimal_radius(u):
    """Minimizer of ``(R^2/lambda1) |grad u|^2 + |u|_1^2 / (R^d omega_d)``."""
    d = u.d
    lam = spectral_data(d).lambda1
    M1 = lp_norm(u, 1.0)
    return (d * lam * M1 ** 2 / (2.0 * ball_volume(d) * grad_l2_sq(u))) ** (1.0 / (d + 2))


def _rel(lhs, rhs):
    """Signed relative slack of ``lhs <= rhs``; 0 for ``0 <= 0``."""
    scale = max(abs(lhs), abs(rhs))
    return 0.0 if scale == 0.0 else (rhs - lhs) / scale


def carlen_loss_slacks(u, R):
    d = u.d
    if np.any(np.diff(u.values) > 1e-12 * max(1.0, float(np.max(u.values)))):
        raise ValueError("check_carlen_loss needs a radially non-increasing profile")
    lam = spectral_data(d).lambda1
    w = ball_volume(d)
    L1in, L2in, L1out, L2out = _split_integrals(u, R)
    L1 = L1in + L1out
    G = grad_l2_sq(u)
    M = lp_norm(u, 2.0) ** 2
    vol = R ** d * w
    return {
        "tail": _rel(L2out, L1in / vol * L1out),
        "poincare": _rel(L2in, R * R / lam * G + L1in ** 2 / vol),
        "mass": _rel(L1in * L1, L1 * L1),
        "assembled": _rel(M, R * R / lam * G + L1 * L1 / vol),
    }


def check_carlen_loss(u, R, tol=1e-9, label="profile", seed=None):
    s = carlen_loss_slacks(u, R)
    names = list(s)
    return _finish("carlen_loss", [s[k] for k in names], [f"{label}:{k}@R={R:.6g}" for k in names],
                   tol, seed, details=s)


def check_carlen_loss_corpus(specs, tol=1e-9, n_knots=DEFAULT_KNOTS, seed=None,
                             factors=(0.5, 1.0, 2.0)):
    """All four steps at ``R = f * R_star`` for each sample."""
    slacks, labels = [], []
    for spec, u in _profiles(specs, n_knots):
        Rs = optimal_radius(u)
        for f in factors:
            for k, v in carlen_loss_slacks(u, f * Rs).items():
                slacks.append(v)
                labels.append(f"{spec.label()}:{k}@{f:g}R*")
    return _finish("carlen_loss", slacks, labels, tol, seed)


# -- Poincare on the ball (radial functions) ---------------------------------------

def poincare_ratio(d, R, values, slopes, r):
    """``int_B v^2 / ((R^2/lambda1) int_B |grad v|^2)`` for radial zero-mean ``v``."""
    lam = spectral_data(d).lambda1
    num = radial_integral(r, values * values, d)
    den = R * R / lam * radial_integral(r, slopes * slopes, d)
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def check_poincare_ball(d, R=1.0, n_random=20, seed=0, tol=1e-9, n=4097):
    """Radial Poincare inequality on ``B_R`` with constant ``R^2/lambda1``.

    ``lambda1`` is the first *radial* Neumann eigenvalue, so only radial test
    functions are admissible.  The eigenfunction must give ratio 1 to 1e-6.
    """
    r = np.linspace(0.0, R, n)
    vol = ball_volume(d) * R ** d
    slacks, labels = [], []
    phi = eigenfunction_phi1(d, r / R)
    dphi = eigenfunction_phi1(d, r / R, deriv=1) / R
    phi = phi - radial_integral(r, phi, d) / vol
    eig = poincare_ratio(d, R, phi, dphi, r)
    slacks.append(1.0 - eig)
    labels.append("eigenfunction")
    rng = np.random.default_rng([int(seed), int(d), 7])
    for i in range(n_random):
        deg = int(rng.integers(1, 7))
        coef = rng.normal(size=deg)
        x = r / R
        powers = np.arange(1, deg + 1)
        v = (coef[None, :] * x[:, None] ** powers).sum(axis=1)
        dv = (coef[None, :] * powers * x[:, None] ** (powers - 1)).sum(axis=1) / R
        v = v - radial_integral(r, v, d) / vol
        slacks.append(1.0 - poincare_ratio(d, R, v, dv, r))
        labels.append(f"poly{i}(deg={deg})")
    slacks.append(0.0)
    labels.append("zero")
    ok = abs(eig - 1.0) <= 1e-6
    return _finish("poincare_ball", slacks, labels, tol, seed, ok,
                   {"d": d, "R": R, "eigen_ratio": eig})


# -- Beckner / log-Sobolev chain ---------------------------------------------------

def entropy_terms(u):
    """``(log(M/L1), E, logsob_rhs)`` with ``E = int u^2 log u / M``."""
    d = u.d
    v = u.values
    with np.errstate(divide="ignore", invalid="ignore"):
        ulog = np.where(v > 0.0, v * v * np.log(np.where(v > 0.0, v, 1.0)), 0.0)
    M = lp_norm(u, 2.0) ** 2
    L1 = lp_norm(u, 1.0)
    G = grad_l2_sq(u)
    E = radial_integral(u.knots, ulog, d) / M
    rhs = 0.5 * math.log(M) + 0.25 * d * math.log(2.0 / (math.pi * d * math.e) * G / M)
    return math.log(M / L1), E, rhs


def check_entropy_chain(specs, tol=1e-9, n_knots=DEFAULT_KNOTS, seed=None):
    """Jensen step, log-Sobolev step, and the implied ``Q <= C_1(d)`` per sample."""
    slacks, labels = [], []
    for spec, u in _profiles(specs, n_knots):
        jensen_lhs, E, ls_rhs = entropy_terms(u)
        slacks += [E - jensen_lhs, ls_rhs - E, 1.0 - nash_quotient(u) / c1_bound(spec.d)]
        labels += [f"{spec.label()}:jensen", f"{spec.label()}:logsobolev", f"{spec.label()}:c1"]
    return _finish("entropy_chain", slacks, labels, tol, seed)


# -- Fourier splitting ---------------------------------------------------------------

def fourier_split_rhs(u, R):
    d = u.d
    L1 = lp_norm(u, 1.0)
    return (2.0 * math.pi) ** (-d) * ball_volume(d) * R ** d * L1 ** 2 + grad_l2_sq(u) / (R * R)


def check_fourier_bound(specs, tol=1e-9, n_knots=DEFAULT_KNOTS, seed=None,
                        radii=np.logspace(-2, 2, 41)):
    """Split inequality on a radius grid (relative to the support) and ``Q <= C_2(d)``."""
    slacks, labels = [], []
    for spec, u in _profiles(specs, n_knots):
        M = lp_norm(u, 2.0) ** 2
        S = u.support_radius
        for R in radii:
            slacks.append(1.0 - M / fourier_split_rhs(u, R / S))
            labels.append(f"{spec.label()}:split@R={R / S:.4g}")
        slacks.append(1.0 - nash_quotient(u) / c2_bound(spec.d))
        labels.append(f"{spec.label()}:c2")
    return _finish("fourier_split", slacks, labels, tol, seed)


def check_proof_ordering(specs, n_knots=DEFAULT_KNOTS, seed=None):
    """Per sample: ``C_2`` slack >= ``C_1`` slack >= Nash slack."""
    slacks, labels = [], []
    for spec, u in _profiles(specs, n_knots):
        q = nash_quotient(u)
        s_n = 1.0 - q / nash_constant(spec.d)
        s_1 = 1.0 - q / c1_bound(spec.d)
        s_2 = 1.0 - q / c2_bound(spec.d)
        slacks.append(min(s_2 - s_1, s_1 - s_n))
        labels.append(spec.label())
    return _finish("proof_ordering", slacks, labels, 0.0, seed)


# -- driver --------------------------------------------------------------------------

def run_all(d, seed=0, n=120, p_list=(1.2, 1.5), n_knots=DEFAULT_KNOTS):
    """Every check on the seeded corpus of dimension ``d``."""
    specs = corpus(d, seed, n)
    reports = [check_nash(specs, seed=seed, n_knots=n_knots)]
    reports += [check_gn(specs, p, seed=seed, n_knots=n_knots) for p in p_list]
    reports.append(check_carlen_loss_corpus(specs, seed=seed, n_knots=n_knots))
    ref = optimal_profile(d, 4097)
    opt = check_carlen_loss(ref, optimal_radius(ref), label="optimizer", seed=seed)
    opt.name = "carlen_loss_equality"
    opt.passed = opt.passed and abs(opt.details["assembled"]) <= 1e-5
    reports.append(opt)
    reports.append(check_poincare_ball(d, 1.0, seed=seed))
    reports.append(check_entropy_chain(specs, seed=seed, n_knots=n_knots))
    reports.append(check_fourier_bound(specs, seed=seed, n_knots=n_knots))
    if d == 1:
        reports.append(check_proof_ordering(specs, seed=seed, n_knots=n_knots))
    return reports


def _plain(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def reports_json(reports):
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True, default=_plain) + "\n"
