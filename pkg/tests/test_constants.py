import math

import numpy as np
import pytest

import oracles
from nashlab import constants as C
from nashlab.shooting import shoot
from nashlab.specfun import nash_constant


def test_exponents():
    assert C.exponents(1.0, 1) == C.ExponentPair(1.0, 2.0)
    assert C.exponents(1.0, 4) == C.ExponentPair(4.0, 2.0)
    assert C.exponents(2.0 - 1e-12, 3).a == pytest.approx(0.0, abs=1e-11)
    with pytest.raises(ValueError):
        C.exponents(2.5, 1)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 7.5])
def test_bound_formulas_against_mpmath(d):
    assert C.c1_bound(d) == pytest.approx(oracles.c1_mp(d), rel=1e-13)
    assert C.c2_bound(d) == pytest.approx(oracles.c2_mp(d), rel=1e-12)
    if d > 2:
        assert C.sobolev_constant(d) == pytest.approx(oracles.sobolev_mp(d), rel=1e-12)


def test_spot_values():
    assert C.c1_bound(1) == pytest.approx(2 / (math.pi * math.e), rel=1e-15)
    assert C.c1_bound(3) == pytest.approx(0.078066, abs=1e-6)
    assert C.c2_bound(1) == pytest.approx(27 / (4 * math.pi ** 2), rel=1e-14)
    assert C.c2_bound(2) == pytest.approx(1 / math.pi, rel=1e-14)
    assert C.c2_bound(3) == pytest.approx(0.2021, abs=1e-4)
    # S_4 = sqrt(6) / (8 pi)
    assert C.sobolev_constant(4) == pytest.approx(math.sqrt(6) / (8 * math.pi), rel=1e-14)


def test_sobolev_domain_and_pole():
    with pytest.raises(ValueError):
        C.sobolev_constant(2.0)
    assert C.sobolev_constant(2.0 + 1e-6) > 1e4


def test_c1_ratio_tends_to_one():
    r5 = C.c1_bound(5) / nash_constant(5)
    r50 = C.c1_bound(50) / nash_constant(50)
    assert abs(r50 - 1) < abs(r5 - 1)


def test_row_d1():
    row = C.constants_row(1)
    assert row.lambda1 == pytest.approx(math.pi ** 2, rel=1e-14)
    assert row.c_nash == pytest.approx(0.170979, abs=1e-6)
    assert row.sobolev is None
    assert row.gaussian_lower == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    assert row.ordering_ok()


@pytest.mark.parametrize("d", range(1, 11))
def test_integer_rows_ordering(d):
    row = C.constants_row(d)
    assert row.gaussian_lower < row.c_nash
    if d >= 3:
        assert row.c_nash <= min(row.sobolev, row.c1, row.c2)


def test_figure_grid():
    rows = C.figure_data(1, 10, 200)
    assert len(rows) == 200 and all(r.ordering_ok() for r in rows)
    assert rows[0] == C.constants_row(1.0) and rows[-1] == C.constants_row(10.0)
    cn = np.array([r.c_nash for r in rows])
    assert np.all(np.diff(cn) < 0)
    text = C.figure_csv(rows[:3])
    assert text.splitlines()[0] == "d,lambda1,c_nash,c1,c2,sobolev,lower"
    assert text.splitlines()[1].split(",")[5] == ""


def test_figure_data_validation():
    with pytest.raises(ValueError):
        C.figure_data(3, 1, 10)
    with pytest.raises(ValueError):
        C.figure_data(1, 2, 1)


def test_kgn_homogeneity():
    c = 1.7
    for p, d in ((1.3, 1), (1.6, 3)):
        e = C.exponents(p, d)
        k1 = C.kgn(p, 0.4, d, c)
        k2 = C.kgn(p, 0.4 * 3.0, d, c)
        assert k2 == pytest.approx(3.0 ** (e.b / e.total) * k1, rel=1e-14)
    with pytest.raises(ValueError):
        C.kgn(1.5, 0.0, 1, c)


def test_kgn_limit_d1():
    c_lim = 2 ** (4 / 3) * math.pi ** (2 / 3) / 3
    assert C.kgn(1.0, 1 / (2 * math.pi), 1, c_lim) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("p", [1.2, 1.5, 1.8])
def test_scaling_relation_closure(d, p):
    assert abs(C.kgn(p, shoot(p, d).mu_p, d) - 1.0) <= 1e-4


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("p", [1.1, 1.3, 1.5, 1.7])
def test_holder_sandwich(d, p):
    assert C.cgn(p, d) <= C.holder_bound(p, d) * (1 + 1e-6)


def test_cgn_near_one_d1():
    lim = 2 ** (4 / 3) * math.pi ** (2 / 3) / 3
    assert nash_constant(1) ** (-1 / 3) == pytest.approx(lim, rel=1e-14)
    # first-order approach: the error shrinks roughly like p - 1
    e105 = abs(C.cgn(1.05, 1) / lim - 1)
    e101 = abs(C.cgn(1.01, 1) / lim - 1)
    assert e101 < e105 < 0.06
    assert 3.0 < e105 / e101 < 7.0


def test_cgn_d1_matches_closed_form_profile():
    # d = 1 ground state: h cos(r/m)^m with m = 2/(2-p), on its own grid
    from nashlab.radial import RadialProfile, gn_quotient
    p = 1.5
    m = 2 / (2 - p)
    h = (2 / p) ** (1 / (2 - p))
    r = np.linspace(0, m * math.pi / 2, 8193)
    c = np.cos(r / m)
    u = RadialProfile(1, r, h * np.clip(c, 0, None) ** m, -h * c ** (m - 1) * np.sin(r / m))
    assert C.cgn(p, 1) == pytest.approx(gn_quotient(u, p), rel=1e-5)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_limit_identification(d):
    target = nash_constant(d) ** (-d / (d + 2))
    assert abs(C.cgn(1.01, d) - target) / target <= 0.02
