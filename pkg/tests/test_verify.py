import json
import math

import numpy as np
import pytest

from nashlab import verify as V
from nashlab.radial import RadialProfile, lp_norm, nash_quotient
from nashlab.specfun import nash_constant, optimal_profile


@pytest.fixture(scope="module", params=[1, 2, 3])
def d(request):
    return request.param


@pytest.fixture(scope="module")
def specs(d):
    return V.corpus(d, seed=0, n=120)


def test_corpus_deterministic_and_varied():
    a = V.corpus(2, seed=5, n=40)
    assert a == V.corpus(2, seed=5, n=40)
    assert a != V.corpus(2, seed=6, n=40)
    assert {s.family for s in a} == set(V.FAMILIES)
    assert a != V.corpus(3, seed=5, n=40)


def test_spec_validation():
    with pytest.raises(ValueError):
        V.TestFunctionSpec("square", 1)
    with pytest.raises(ValueError):
        V.TestFunctionSpec("tent", 0)
    with pytest.raises(ValueError):
        V.TestFunctionSpec("tent", 1, scale=-1.0)
    with pytest.raises(ValueError):
        V.TestFunctionSpec("poly_bump", 1, k=0)


@pytest.mark.parametrize("fam", V.FAMILIES)
def test_generated_profiles_non_increasing(fam):
    u = V.generate(V.TestFunctionSpec(fam, 2, 1.7, k=3, amplitude=2.0))
    assert np.all(np.diff(u.values) <= 1e-12)
    assert u.values[0] == pytest.approx(2.0 if fam != "scaled_optimizer" else u.values[0])


def test_generated_slopes_match_differences():
    u = V.generate(V.TestFunctionSpec("poly_bump", 1, 2.0, k=3), n_knots=20001)
    fd = np.gradient(u.values, u.knots)
    assert np.max(np.abs(fd[1:-1] - u.slopes[1:-1])) < 1e-6


def test_nash(d, specs):
    rep = V.check_nash(specs)
    assert rep.passed and rep.n_samples == 120
    assert rep.worst_slack < 1e-5  # scaled optimizers reach equality


@pytest.mark.parametrize("p", [1.2, 1.5])
def test_gn(d, specs, p):
    rep = V.check_gn(specs, p)
    assert rep.passed
    assert abs(rep.details[f"ground_state_slack_d{d}"]) <= 1e-6


def test_carlen_loss(d, specs):
    assert V.check_carlen_loss_corpus(specs).passed


def test_carlen_loss_equality_at_optimizer(d):
    ref = optimal_profile(d, 4097)
    assert V.optimal_radius(ref) == pytest.approx(1.0, rel=1e-6)
    s = V.carlen_loss_slacks(ref, 1.0)
    assert abs(s["assembled"]) <= 1e-6 and abs(s["poincare"]) <= 1e-6


def test_carlen_loss_rejects_increasing():
    r = np.linspace(0, 1, 33)
    with pytest.raises(ValueError):
        V.carlen_loss_slacks(RadialProfile(1, r, r * (1 - r)), 0.5)


def test_poincare(d):
    rep = V.check_poincare_ball(d)
    assert rep.passed and rep.details["eigen_ratio"] == pytest.approx(1.0, abs=1e-6)
    assert V.check_poincare_ball(d, R=2.5, seed=3).passed


def test_entropy(d, specs):
    assert V.check_entropy_chain(specs).passed


def test_fourier(d, specs):
    assert V.check_fourier_bound(specs).passed


def test_proof_ordering_d1():
    assert V.check_proof_ordering(V.corpus(1, 0, 60)).passed


@pytest.mark.parametrize("s", [0.4, 1.0, 2.5])
def test_gaussian_saturates_log_sobolev(d, s):
    u = V.generate(V.TestFunctionSpec("gaussian", d, s, amplitude=1.3), n_knots=8193)
    _, E, rhs = V.entropy_terms(u)
    assert abs(rhs - E) <= 1e-6


def test_gaussian_nash_quotient(d):
    u = V.generate(V.TestFunctionSpec("gaussian", d, 1.1, amplitude=0.7), n_knots=8193)
    assert nash_quotient(u) == pytest.approx(1 / (2 * math.pi * d), abs=1e-8)


def test_normalize_like_matches_norms(d):
    ref = optimal_profile(d)
    u = V.generate(V.TestFunctionSpec("poly_bump", d, 3.0, k=2, amplitude=4.0))
    v = V.normalize_like(u, ref)
    assert lp_norm(v, 1) == pytest.approx(lp_norm(ref, 1), rel=1e-10)
    assert lp_norm(v, 2) == pytest.approx(lp_norm(ref, 2), rel=1e-10)
    assert V.optimizer_distance(ref.scaled(sigma=2.0, amplitude=3.0)) < 1e-6


def test_checker_detects_violation(monkeypatch):
    # a constant below the true supremum must be caught by the optimizer samples
    specs = V.corpus(1, 0, 20)
    monkeypatch.setattr(V, "nash_constant", lambda dd: 0.99 * nash_constant(dd))
    rep = V.check_nash(specs)
    assert not rep.passed and rep.worst_slack < -1e-3
    assert "scaled_optimizer" in rep.worst_sample


def test_run_all_json():
    reports = V.run_all(1, seed=1, n=20)
    assert all(r.passed for r in reports)
    data = json.loads(V.reports_json(reports))
    assert {r["name"] for r in data} >= {"nash", "gn_p1.2", "gn_p1.5", "carlen_loss",
                                         "poincare_ball", "entropy_chain", "fourier_split"}
    assert V.reports_json(reports) == V.reports_json(V.run_all(1, seed=1, n=20))
