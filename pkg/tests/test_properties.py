"""Property-based checks of scale invariances and identities."""

import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from nashlab import heat
from nashlab.constants import c1_bound, c2_bound, exponents, kgn
from nashlab.radial import RadialProfile, gn_quotient, nash_quotient
from nashlab.shooting import norms_from_mu, pohozaev_residuals
from nashlab.specfun import bessel_j, nash_constant

dims = st.integers(1, 3)
positive = st.floats(0.1, 10.0)
p_open = st.floats(1.01, 1.95)

SETTINGS = settings(max_examples=40, deadline=None)


def _bump_mixture(d, weights, radii, n=4097):
    """Non-negative, non-increasing sum of ``w (1 - (r/R)^2)^2`` bumps."""
    S = max(radii)
    r = np.linspace(0.0, S, n)
    u = np.zeros_like(r)
    du = np.zeros_like(r)
    for w, R in zip(weights, radii):
        x = r / R
        inside = x < 1.0
        q = np.where(inside, 1.0 - x * x, 0.0)
        u += w * q * q
        du += np.where(inside, -4.0 * w * x * q / R, 0.0)
    return RadialProfile(d, r, u, du)


mixtures = st.integers(1, 4).flatmap(lambda k: st.tuples(
    st.lists(st.floats(0.1, 5.0), min_size=k, max_size=k),
    st.lists(st.floats(0.2, 5.0), min_size=k, max_size=k)))


@SETTINGS
@given(d=dims, sigma=positive, c=positive)
def test_nash_quotient_scale_invariant(d, sigma, c):
    u = _bump_mixture(d, [1.0, 0.5], [1.0, 2.0])
    assert math.isclose(nash_quotient(u.scaled(sigma, c)), nash_quotient(u), rel_tol=1e-10)


@SETTINGS
@given(d=dims, p=p_open, sigma=positive, c=positive)
def test_gn_quotient_scale_invariant(d, p, sigma, c):
    u = _bump_mixture(d, [1.0, 0.3], [1.5, 0.7])
    assert math.isclose(gn_quotient(u.scaled(sigma, c), p), gn_quotient(u, p), rel_tol=1e-10)


@SETTINGS
@given(d=dims, wr=mixtures)
def test_nash_inequality_on_mixtures(d, wr):
    q = nash_quotient(_bump_mixture(d, *wr))
    assert 0.0 < q <= nash_constant(d)


@SETTINGS
@given(d=st.floats(1.0, 10.0))
def test_constant_ordering_real_d(d):
    c = nash_constant(d)
    assert 1.0 / (2.0 * math.pi * d) < c <= min(c1_bound(d), c2_bound(d))


@SETTINGS
@given(d=dims, p=st.floats(1.0, 1.95), mu=st.floats(1e-3, 1e3))
def test_norms_from_mu_identities(d, p, mu):
    t = norms_from_mu(p, d, mu)
    r1, r2 = pohozaev_residuals(p, d, t)
    assert abs(r1) < 1e-13 and abs(r2) < 1e-13
    e = exponents(p, d)
    assert math.isclose(t.G / t.P, e.a / e.b, rel_tol=1e-13)


@SETTINGS
@given(d=dims, p=p_open, lam=st.floats(1e-3, 1e3), s=st.floats(0.1, 10.0))
def test_kgn_homogeneous(d, p, lam, s):
    e = exponents(p, d)
    ratio = kgn(p, s * lam, d, 1.0) / kgn(p, lam, d, 1.0)
    assert math.isclose(ratio, s ** (e.b / e.total), rel_tol=1e-12)


@SETTINGS
@given(alpha=st.floats(-0.5, 5.0), z=st.floats(0.01, 30.0))
def test_bessel_recurrence(alpha, z):
    j = bessel_j(alpha, z)
    dj = bessel_j(alpha, z, deriv=1)
    jp = bessel_j(alpha + 1.0, z)
    assert abs(z * dj - alpha * j + z * jp) <= 1e-9 * max(1.0, z)


@SETTINGS
@given(d=dims, l1=positive, l2=positive, t1=st.floats(0.0, 1e3), t2=st.floats(0.0, 1e3))
def test_nash_envelope_monotone(d, l1, l2, t1, t2):
    a, b = sorted((t1, t2))
    assert heat.nash_envelope(b, l2, l1, d) <= heat.nash_envelope(a, l2, l1, d)


@SETTINGS
@given(d=dims, eps=st.floats(1e-3, 10.0), t=st.floats(0.0, 1e4))
def test_gaussian_below_envelopes(d, eps, t):
    s = heat.evolve_gaussian(eps, t, d)
    assert s.within(1e-12)


@SETTINGS
@given(d=dims, c=positive, sigma=st.floats(0.5, 2.0))
def test_crossover_invariant_under_amplitude(d, c, sigma):
    l1 = sigma ** d * 2.0
    l2 = sigma ** (d / 2.0) * 1.5
    a = heat.crossover(d, l1, l2)
    b = heat.crossover(d, c * l1, c * l2)
    assert (a.t_star is None) == (b.t_star is None)
    if a.t_star is not None:
        assert math.isclose(a.t_star, b.t_star, rel_tol=1e-9)
