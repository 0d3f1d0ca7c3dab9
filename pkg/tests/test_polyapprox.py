import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import chebyshev as npcheb

from geomean import polyapprox as pa
from geomean.errors import InvalidParams, OutOfDomain


def independent_sup_error(poly, n=10_000):
    # numpy's chebval is an evaluator independent of the package's Clenshaw/NUFFT paths
    x = np.linspace(poly.delta, 1, n)
    return np.max(np.abs(npcheb.chebval(x, poly.coeffs) - poly.target(x)))


def test_evaluate_trivial():
    const = pa.from_coefficients([0.5])
    assert pa.evaluate(const, 0.77) == 0.5
    assert pa.evaluate(pa.from_coefficients([0.0, 1.0]), 0.3) == pytest.approx(0.3)
    with pytest.raises(OutOfDomain):
        pa.evaluate(const, 1.5)


def test_evaluate_many_matches_chebval(rng):
    coeffs = rng.normal(size=3000) / np.arange(1, 3001) ** 2
    x = np.linspace(-1, 1, 5000)
    assert np.abs(pa.evaluate_many(coeffs, x) - npcheb.chebval(x, coeffs)).max() <= 1e-12


def test_negative_power_endpoint():
    q = pa.approx_negative_power(1.0, 0.4, 1e-3)
    assert q(0.4) == pytest.approx(0.5, abs=1e-3)
    assert q.measured_sup_error <= 1e-3


def test_negative_power_half():
    q = pa.approx_negative_power(0.5, 0.25, 1e-4)
    assert independent_sup_error(q) <= 1e-4


def test_positive_power_fixtures():
    q = pa.approx_positive_power(0.5, 0.25, 1e-4)
    assert q(1.0) == pytest.approx(0.5, abs=1e-4)
    q = pa.approx_positive_power(1 / 3, 0.1, 1e-3)
    res = pa.audit(q)
    assert res.sup_error <= 1e-3 and res.max_abs <= 1 + 1e-9
    assert independent_sup_error(q) <= 1e-3


def test_positive_power_above_one():
    q = pa.approx_positive_power(1.5, 0.1, 1e-4)
    assert independent_sup_error(q) <= 1e-4


def test_validation():
    with pytest.raises(InvalidParams):
        pa.approx_negative_power(-1, 0.1, 1e-3)
    with pytest.raises(InvalidParams):
        pa.approx_positive_power(3.0, 0.1, 1e-3)
    with pytest.raises(InvalidParams):
        pa.approx_negative_power(1, 0.0, 1e-3)
    with pytest.raises(InvalidParams):
        pa.approx_negative_power(1, 0.1, 0.7)


def test_to_dict_roundtrip_fields():
    q = pa.approx_negative_power(0.5, 0.2, 1e-3)
    d = q.to_dict()
    assert d["basis"] == "chebyshev-T"
    assert d["meta"]["degree"] == len(d["coeffs"]) - 1
    assert d["meta"]["degree"] <= d["meta"]["degree_bound"]


def test_target_reduction():
    # |2 sqrt(x/delta) (q - f)| <= 2 delta^{-1/2} eps, which is 4 eps at delta = 1/4
    delta, eps = 0.25, 1e-4
    q = pa.approx_negative_power(0.5, delta, eps)
    x = np.linspace(delta, 1, 2000)
    assert np.abs(q(x) * 2 * np.sqrt(x / delta) - 1).max() <= 4 * eps


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([pa.NEG_POWER, pa.POS_POWER]), st.floats(0.1, 1.0),
       st.floats(0.05, 0.5), st.floats(1e-6, 1e-2))
def test_bounded_and_accurate(kind, c, delta, eps):
    fn = pa.approx_negative_power if kind == pa.NEG_POWER else pa.approx_positive_power
    q = fn(c, delta, eps)
    res = pa.audit(q)
    assert res.sup_error <= eps
    assert res.max_abs <= 1 + 1e-9
    assert q.degree <= q.degree_bound()


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(0.05, 0.5), st.floats(1e-6, 1e-3))
def test_monotone_accuracy(c, delta, eps):
    coarse = pa.approx_negative_power(c, delta, eps)
    fine = pa.approx_negative_power(c, delta, eps / 10)
    assert fine.degree >= coarse.degree - pa.config.DEGREE_HYSTERESIS
