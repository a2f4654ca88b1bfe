import math

import numpy as np
import pytest

import oracles
from nashlab import kernels
from nashlab import shooting as S
from nashlab.constants import kgn
from nashlab.radial import gn_quotient, l2_distance, norm_triple
from nashlab.specfun import eigenfunction_phi1, optimal_profile, spectral_data

GRID = [(d, p) for d in (1, 2, 3) for p in (1.2, 1.5, 1.8)]


# -- integrate_el ----------------------------------------------------------------

def test_linear_flow_d1_touches_down_at_pi():
    tr = S.integrate_el(1.0, 1, 2.0, r_max=5.0)
    assert tr.event == S.HIT_ZERO
    assert tr.r_event == pytest.approx(math.pi, abs=1e-6)
    assert abs(tr.V_event) <= 1e-6


@pytest.mark.parametrize("d", [2, 3])
def test_linear_flow_touches_down_at_r1(d):
    h = 1.0 - eigenfunction_phi1(d, 0.0)
    tr = S.integrate_el(1.0, d, h, r_max=3 * spectral_data(d).R1)
    assert tr.event == S.HIT_ZERO
    assert tr.r_event == pytest.approx(spectral_data(d).R1, abs=1e-4)
    assert abs(tr.V_event) <= 1e-4


def test_near_equilibrium_undershoots():
    tr = S.integrate_el(1.5, 2, 1.0 + 1e-6, r_max=20.0)
    assert tr.event == S.SLOPE_ZERO
    assert tr.U_event == pytest.approx(1.0, abs=1e-5)


def test_trajectory_basic_invariants():
    tr = S.integrate_el(1.3, 3, 4.0, r_max=20.0)
    assert np.all(np.diff(tr.r) > 0)
    assert tr.r[0] == 0.0 and tr.V[0] == 0.0 and tr.U[0] == 4.0


def test_integrate_el_domain():
    with pytest.raises(ValueError):
        S.integrate_el(1.5, 1, 1.0, r_max=5.0)
    with pytest.raises(ValueError):
        S.integrate_el(2.0, 1, 2.0, r_max=5.0)


# -- closed forms ---------------------------------------------------------------

def test_norms_from_mu_limit_d1():
    t = S.norms_from_mu(1.0, 1, 1 / (2 * math.pi))
    assert (t.G, t.P, t.M) == pytest.approx((math.pi, 2 * math.pi, 3 * math.pi), rel=1e-14)


@pytest.mark.parametrize("d, p", GRID)
def test_norms_from_mu_satisfy_identities(d, p):
    t = S.norms_from_mu(p, d, 0.37)
    assert t.M == pytest.approx(t.G + t.P, rel=1e-14)
    r1, r2 = S.pohozaev_residuals(p, d, t)
    assert abs(r1) <= 1e-14 and abs(r2) <= 1e-14


def test_residual_is_linear_in_perturbation():
    t = S.norms_from_mu(1.5, 2, 0.5)
    bumped = type(t)(t.G * 1.01, t.P, t.M)
    r1, _ = S.pohozaev_residuals(1.5, 2, bumped)
    assert r1 == pytest.approx(0.01 * t.G / t.M, rel=1e-12)


def test_touchdown_coefficient_d1_p1():
    m, A, c1, c2 = S.touchdown_coefficients(1.0, 1, 3.0)
    assert (m, A, c1) == (2.0, 0.5, 0.0)
    assert c2 == pytest.approx(-1 / 12, rel=1e-14)  # 1 + cos(pi - s) = s^2/2 - s^4/24 + ...


# -- shoot ----------------------------------------------------------------------

@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
def test_d1_center_value(p):
    assert S.shoot(p, 1).h == pytest.approx((2 / p) ** (1 / (2 - p)), abs=1e-6)


@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
def test_d1_support_radius_quadrature_oracle(p):
    R = S.shoot(p, 1).R_p
    assert R == pytest.approx(oracles.d1_support_radius(p), abs=1e-5)
    # the same first integral integrates in closed form to pi / (2 - p)
    assert R == pytest.approx(math.pi / (2 - p), abs=1e-8)


@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
def test_d1_profile_closed_form(p):
    res = S.shoot(p, 1)
    r = res.profile.knots
    exact = res.h * np.cos(np.clip((2 - p) * r / 2, 0, math.pi / 2)) ** (2 / (2 - p))
    assert np.max(np.abs(res.profile.values - exact)) <= 1e-7


@pytest.mark.parametrize("d, p", GRID)
def test_pohozaev_certificate(d, p):
    res = S.shoot(p, d)
    assert abs(res.res1) <= 1e-6 and abs(res.res2) <= 1e-6
    t = S.norms_from_mu(p, d, res.mu_p)
    for a, b in ((res.norms.G, t.G), (res.norms.P, t.P), (res.norms.M, t.M)):
        assert a == pytest.approx(b, rel=1e-5)


@pytest.mark.parametrize("d, p", GRID)
def test_mu_consistency(d, p):
    res = S.shoot(p, d)
    P = norm_triple(res.profile, p).P
    assert abs(res.mu_p - P ** ((p - 2) / p)) / res.mu_p <= 1e-8


@pytest.mark.parametrize("d, p", GRID)
def test_event_consistency(d, p):
    tol = 1e-10
    res = S.shoot(p, d, tol)
    _, U, V, _ = res.terminal
    assert abs(U) <= tol and abs(V) <= math.sqrt(tol)


@pytest.mark.parametrize("d, p", GRID)
def test_monotone_dichotomy(d, p):
    # re-run both bracket ends on the grid the bisection used
    res = S.shoot(p, d)
    lo, hi = res.bracket
    dr, r_max = res.diagnostics["dr"], res.diagnostics["r_max"]
    assert lo < hi and hi - lo <= 1e-12 * hi
    under = S.integrate_fixed(p, d, lo, dr, r_max)
    over = S.integrate_fixed(p, d, hi, dr, r_max)
    # the undershoot turns around (V = 0 up to rounding) instead of crossing with V < 0
    assert under.V_event >= -1e-15
    assert over.event == S.HIT_ZERO and over.V_event < 0.0


@pytest.mark.parametrize("d, p", GRID)
def test_profile_shape(d, p):
    res = S.shoot(p, d)
    u = res.profile
    assert res.h > 1
    assert u.values[0] == pytest.approx(res.h, rel=1e-12)
    assert u.values[-1] == 0.0 and u.support_radius == pytest.approx(res.R_p, rel=1e-14)
    assert np.all(np.diff(u.values) <= 1e-12)


def test_shoot_domain():
    with pytest.raises(ValueError):
        S.shoot(2.0, 1)
    with pytest.raises(ValueError):
        S.shoot(1.5, 11)


@pytest.mark.skipif(not kernels.HAS_NUMBA, reason="numba not installed")
@pytest.mark.parametrize("d, p", [(1, 1.5), (3, 1.2)])
def test_backends_agree(d, p):
    a = S.shoot(p, d, backend="numba")
    b = S.shoot(p, d, backend="numpy")
    assert a.h == pytest.approx(b.h, abs=1e-12)
    assert a.R_p == pytest.approx(b.R_p, abs=1e-10)
    assert a.mu_p == pytest.approx(b.mu_p, rel=1e-9)


# -- p -> 1 ----------------------------------------------------------------------

P_LIST = [1.5, 1.25, 1.1, 1.05]


def test_sweep_support_radius_converges_to_pi():
    rows = S.sweep_p(1, P_LIST)
    gaps = [r.r_gap for r in rows]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    for r in rows:
        assert r.h == pytest.approx((2 / r.p) ** (1 / (2 - r.p)), abs=1e-6)
        assert r.R == pytest.approx(oracles.d1_support_radius(r.p), abs=1e-5)
        # |R_p - pi| = pi (p - 1) / (2 - p) exactly in d = 1
        assert r.r_gap == pytest.approx(math.pi * (r.p - 1) / (2 - r.p), abs=1e-8)


@pytest.mark.xfail(strict=True, reason="|R_p - pi| = pi(p-1)/(2-p) = 0.165 at p = 1.05 in d = 1")
def test_sweep_gap_below_tenth_at_p105():
    assert S.shoot(1.05, 1).R_p - math.pi < 0.1


def test_sweep_profiles_converge_to_cosine():
    u1 = optimal_profile(1, 4097).scaled(sigma=math.pi)
    dist = [l2_distance(S.shoot(p, 1).profile, u1) for p in P_LIST]
    assert all(a > b for a, b in zip(dist, dist[1:]))


def test_scaling_relation_near_p1_d2():
    res = S.shoot(1.05, 2)
    assert kgn(1.05, res.mu_p, 2, gn_quotient(res.profile, 1.05)) == pytest.approx(1.0, abs=1e-4)


def test_mu_tends_to_inverse_mass_d1():
    # mu_p -> |u_1|_1^(-1) = 1/(2 pi): the multiplier does not tend to the eigenvalue
    mus = [S.shoot(p, 1).mu_p for p in P_LIST]
    errs = [abs(m - 1 / (2 * math.pi)) for m in mus]
    assert all(a > b for a, b in zip(errs, errs[1:]))
    # first-order convergence: err / (p - 1) stays near 1/2
    assert all(0.4 < e / (p - 1) < 0.7 for e, p in zip(errs, P_LIST))
