import math

import numpy as np
import pytest

from geomean import blockenc as be
from geomean import geomean_pipeline as gp
from geomean.errors import ConditionBoundViolated, NormTooLarge, PreconditionViolated
from geomean.linalg_core import geodesic_point, inverse
from geomean.riccati import solve_riccati_general, solve_yayc
from helpers import commuting_family, rand_pd


def enc(M, label):
    return be.from_dilation(np.atleast_2d(M), label)


def test_weighted_identity_tuple():
    I = np.eye(2)
    rep = gp.be_weighted_geomean(enc(I, "A"), enc(I, "C"), 2, 1e-2, 1.0, 1.0)
    assert rep.output.tuple()[:2] == (2.0, 5 * 1 + 12)
    assert np.allclose(rep.output.decoded(), I, atol=1e-2)


def test_inverse_identity_tuple():
    I = np.eye(2)
    rep = gp.be_inverse_geomean(enc(I, "A"), enc(I, "C"), 1e-2, 2.0, 2.0)
    assert rep.output.tuple()[:2] == (4.0, 5 * 1 + 11)
    assert rep.measured_error_vs_oracle <= 1e-2


def test_gamma_cases():
    assert gp.gamma_p(3, 4, 5) == 1.0
    assert gp.gamma_p(-1, 4, 5) == pytest.approx(20.0)
    assert gp.gamma_p(-2, 4, 9) == pytest.approx(6.0)


def test_weighted_negative_p_scale(rng):
    A, C = rand_pd(2, 3, rng), rand_pd(2, 3, rng)
    rep = gp.be_weighted_inverse(enc(A, "A"), enc(C, "C"), -2, 1e-2, 3.0, 3.0)
    assert rep.output.alpha == pytest.approx(2 * 3.0 * math.sqrt(9.0))
    assert rep.measured_error_vs_oracle <= 1e-2
    rep = gp.be_weighted_geomean(enc(A, "A"), enc(C, "C"), -1, 1e-2, 3.0, 3.0)
    assert rep.output.alpha == pytest.approx(2 * 3.0 ** -1 * 9.0)
    assert rep.measured_error_vs_oracle <= 1e-2


def test_inverse_random_oracle(rng):
    A, C = rand_pd(4, 6, rng), rand_pd(4, 6, rng)
    rep = gp.be_inverse_geomean(enc(A, "A"), enc(C, "C"), 1e-3, 6.0, 6.0)
    Y = solve_yayc(A, C)
    assert np.linalg.norm(Y - rep.output.decoded(), 2) <= 1e-3
    assert rep.output.tuple()[:2] == rep.expected_tuple


def test_weighted_commuting_oracle(rng):
    a, c = rng.uniform(0.25, 1, 4), rng.uniform(0.25, 1, 4)
    rep = gp.be_weighted_geomean(enc(np.diag(a), "A"), enc(np.diag(c), "C"), 2, 1e-3, 4.0, 4.0)
    assert np.abs(rep.output.decoded() - np.diag(np.sqrt(a * c))).max() <= 1e-3


def test_weighted_inverse_cross_checks(rng):
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    r2 = gp.be_weighted_inverse(enc(A, "A"), enc(C, "C"), 2, 1e-3, 4.0, 4.0)
    r0 = gp.be_inverse_geomean(enc(A, "A"), enc(C, "C"), 1e-3, 4.0, 4.0)
    assert np.linalg.norm(r2.oracle - r0.oracle) <= 1e-12
    # scalar a = 1, c = 1/32, p = 5: y^5 = 1/32
    rep = gp.be_weighted_inverse(enc(1.0, "A"), enc(1 / 32, "C"), 5, 1e-3, 1.0, 32.0)
    assert rep.output.decoded()[0, 0].real == pytest.approx(0.5, abs=1e-3)


def test_riccati_scalar_and_reduction(rng):
    # a = 1, b = 1/2, c = 3/4: y^2 - y - 3/4 = 0 has the root 3/2
    rep = gp.be_riccati_general(enc(1.0, "A"), enc(0.5, "B"), enc(0.75, "C"), 1e-2, 1.0, 4 / 3)
    assert rep.output.decoded()[0, 0].real == pytest.approx(1.5, abs=1e-2)
    A, C = rand_pd(2, 2, rng), rand_pd(2, 2, rng)
    rep = gp.be_riccati_general(enc(A, "A"), be.from_dilation(np.zeros((2, 2)), "B", hermitian=False),
                                enc(C, "C"), 1e-2, 2.0, 2.0)
    assert np.linalg.norm(rep.output.decoded() - solve_yayc(A, C), 2) <= 1e-2


def test_riccati_commuting_family(rng):
    A, B, C = commuting_family(4, rng, 4.0, 4.0)
    rep = gp.be_riccati_general(enc(A, "A"), be.from_dilation(B, "B", hermitian=False),
                                enc(C, "C"), 1e-2, 4.0, 4.0)
    y = solve_riccati_general(A, B, C).y_plus
    assert np.linalg.norm(rep.output.decoded() - y, 2) <= 1e-2
    assert rep.output.alpha == 2 * 4.0 ** 1.5
    assert rep.output.a == rep.params["b"]


def test_riccati_rejects(rng):
    A = rand_pd(2, 2, rng)
    B = np.array([[0.0, 0.5], [0.0, 0.0]])
    with pytest.raises(PreconditionViolated):
        gp.be_riccati_general(enc(A, "A"), be.from_dilation(B, "B", hermitian=False),
                              enc(np.eye(2), "C"), 1e-2, 2.0, 1.0)
    # a = b = c = 1: y = 1 + sqrt(2) exceeds the scale 2 kA^{3/2} = 2
    with pytest.raises(NormTooLarge):
        gp.be_riccati_general(enc(1.0, "A"), enc(1.0, "B"), enc(1.0, "C"), 1e-2, 1.0, 1.0)


def test_strict_promise(rng):
    A = rand_pd(2, 8, rng)
    with pytest.raises(ConditionBoundViolated):
        gp.be_inverse_geomean(enc(A, "A"), enc(np.eye(2), "C"), 1e-2, 2.0, 1.0)
    rep = gp.be_inverse_geomean(enc(A, "A"), enc(np.eye(2), "C"), 1e-2, 8.0, 1.0)
    assert rep.measured_error_vs_oracle <= 1e-2


def test_step_intermediates(rng):
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    rep = gp.be_inverse_geomean(enc(A, "A"), enc(C, "C"), 1e-2, 4.0, 4.0)
    assert rep.steps
    checked = [s for s in rep.steps if s.measured is not None]
    assert checked
    for s in checked:
        assert s.measured <= s.eps_claimed + 1e-12, s.to_dict()


def test_riccati_closure(rng):
    # decoded Y satisfies Y A Y ~ C to within eps times a polynomial in kappa
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    eps = 1e-3
    rep = gp.be_inverse_geomean(enc(A, "A"), enc(C, "C"), eps, 4.0, 4.0)
    Y = rep.output.decoded()
    Y = (Y + Y.conj().T) / 2
    y_norm = np.linalg.norm(rep.oracle, 2)
    assert np.linalg.norm(Y @ A @ Y - C, 2) <= 3 * eps * y_norm


def test_ledger_equals_structure_and_theory(rng):
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    for p in (2, 3):
        rep = gp.be_weighted_inverse(enc(A, "A"), enc(C, "C"), p, 1e-2, 4.0, 4.0)
        q = rep.output.ledger.queries
        theory = gp.theory_query_formula(gp.WEIGHTED_INVERSE, 4.0, 4.0, 1e-2, p)
        assert set(q) == {"A", "C"}
        assert all(q[o] <= theory[o] for o in q)


def test_theory_polylog_in_eps():
    t1 = gp.theory_query_formula(gp.INVERSE, 4.0, 4.0, 1e-2)
    t2 = gp.theory_query_formula(gp.INVERSE, 4.0, 4.0, 1e-3)
    # a tenfold accuracy gain costs at most a polylog factor, far below 10x per log power
    assert 1 < t2["A"] / t1["A"] < (math.log(1e3) / math.log(1e2)) ** 4 * 4


def test_report_dict(rng):
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    rep = gp.be_inverse_geomean(enc(A, "A"), enc(C, "C"), 1e-2, 4.0, 4.0)
    d = rep.to_dict()
    assert d["tuple"]["alpha"] == d["expected_tuple"]["alpha"] == 8.0
    assert d["ledger"]["queries"] == rep.output.ledger.queries


def test_conjugated_power(rng):
    A, C = rand_pd(2, 4, rng), rand_pd(2, 4, rng)
    for p in (0.5, 2.0, -1.0):
        rep = gp.be_conjugated_power(enc(A, "A"), enc(C, "C"), p, 1e-2, 4.0, 4.0)
        isq = geodesic_point(np.eye(2), inverse(A), 0.5)
        W = isq @ C @ isq
        target = 4.0 ** (-1 / p) / gp.gamma_p(p, 4.0, 4.0) * geodesic_point(np.eye(2), W, 1 / p)
        assert np.linalg.norm(rep.output.decoded() - target, 2) <= 1e-2
        assert rep.output.alpha == 2.0
