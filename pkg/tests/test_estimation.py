import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from geomean import blockenc as be
from geomean import estimation as est
from geomean.errors import InvalidAlpha, InvalidEps, InvalidM, InvalidState, PromiseViolated
from geomean.linalg_core import inverse, matrix_power
from helpers import rand_pd, rand_state

RHO_C, SIGMA_C = np.diag([0.6, 0.4]), np.diag([0.7, 0.3])
# sqrt(0.42) + sqrt(0.12) and -2 ln of it
QUASI_HALF_C = 0.9944842313545614
RENYI_HALF_C = 0.01106207333288709

seeds = st.integers(0, 2 ** 32 - 1)


def uhlmann_scipy(rho, sigma):
    s = sla.sqrtm(sigma)
    return float(np.real(np.trace(sla.sqrtm(s @ rho @ s))))


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        est.DensityMatrix.from_array(np.diag([0.5, 0.6]))
    with pytest.raises(InvalidState):
        est.DensityMatrix.from_array(np.diag([1.2, -0.2]))
    d = est.DensityMatrix.from_array(np.diag([0.75, 0.25]))
    assert d.kappa == pytest.approx(4.0)


def test_purifier_roundtrip(rng):
    rho = rand_state(4, rng)
    P = est.Purifier.of(rho)
    assert np.linalg.norm(P.state.data - rho) <= 1e-12
    assert be.verify(P.encoding("rho"), rho) <= 1e-12


def test_hadamard_fixtures(rng):
    rho = rand_state(2, rng)
    assert est.hadamard_test(be.from_dilation(np.eye(2)), rho) == pytest.approx(1.0)
    assert est.hadamard_test(be.from_dilation(np.zeros((2, 2))), rho) == pytest.approx(0.5)
    # block 0.5 I gives p = 0.75; 1e5 shots stay within 0.01 (about 7 standard deviations)
    half = be.from_dilation(0.5 * np.eye(2))
    draws = [est.hadamard_test(half, rho, "sample", 100_000, rng) for _ in range(200)]
    assert max(abs(d - 0.75) for d in draws) <= 0.01


def test_ae_endpoints(rng):
    for M in (2, 16, 256):
        assert est.amplitude_estimate(0.0, M, rng) == 0.0
        assert est.amplitude_estimate(1.0, M, rng) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidM):
        est.ae_distribution(0.5, 1)


def test_ae_distribution_normalized():
    for p in (0.0, 0.3, 0.99):
        d = est.ae_distribution(p, 64)
        assert d.min() >= 0 and d.sum() == pytest.approx(1.0)


def test_ae_success_rate(rng):
    p, M = 0.3, 256
    draws = np.array([est.amplitude_estimate(p, M, rng) for _ in range(10_000)])
    rate = np.mean(np.abs(draws - p) <= est.ae_error_bound(p, M))
    assert rate >= 8 / math.pi ** 2 - 0.02


def test_median_failure_and_grid():
    # at per-trial success 8/pi^2 the median of 15 fails with probability ~3e-3;
    # 21 trials are the first odd count below 1e-3
    q = 1 - 8 / math.pi ** 2
    direct = sum(math.comb(15, j) * q ** j * (1 - q) ** (15 - j) for j in range(8, 16))
    assert est.median_failure(15) == pytest.approx(direct, rel=1e-12)
    assert est.median_failure(19) > 1e-3 > est.median_failure(21)
    M = est.ae_grid_size(4.0, 0.02)
    assert 8 * (math.pi / M + math.pi ** 2 / M ** 2) <= 0.75 * 0.02
    assert 8 * (2 * math.pi / M + 4 * math.pi ** 2 / M ** 2) > 0.75 * 0.02


def test_fuchs_caves_fixtures():
    rho = est.DensityMatrix.from_array(np.diag([0.3, 0.7]))
    M = est.fuchs_caves_observable(rho, rho)
    assert np.trace(M.data @ rho.data).real == pytest.approx(1.0)
    M = est.fuchs_caves_observable(RHO_C, SIGMA_C)
    assert np.allclose(M.data, np.diag(np.sqrt([0.6 / 0.7, 0.4 / 0.3])))


def test_exact_fidelity_fixtures(rng):
    rho = rand_state(3, rng)
    assert est.exact_fidelity(rho, rho) == pytest.approx(1.0)
    assert est.exact_fidelity(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(0.0, abs=1e-12)
    sigma = rand_state(3, rng)
    assert est.exact_fidelity(rho, sigma) == pytest.approx(uhlmann_scipy(rho, sigma), abs=1e-10)


def test_quasi_entropy_fixtures():
    rho = est.DensityMatrix.from_array(np.diag([0.2, 0.8]))
    for a in (0.3, 0.5, 1.5, 2.0):
        assert est.exact_geo_quasi_entropy(rho, rho, a) == pytest.approx(1.0)
    assert est.exact_geo_quasi_entropy(RHO_C, SIGMA_C, 0.5) == pytest.approx(QUASI_HALF_C, abs=1e-14)
    assert est.exact_geo_renyi(RHO_C, SIGMA_C, 0.5) == pytest.approx(RENYI_HALF_C, abs=1e-14)
    assert est.exact_geo_renyi(RHO_C, SIGMA_C, 0.5, "2") == pytest.approx(RENYI_HALF_C / math.log(2))
    with pytest.raises(InvalidAlpha):
        est.exact_geo_quasi_entropy(RHO_C, SIGMA_C, 1.0)
    with pytest.raises(InvalidAlpha):
        est.exact_geo_quasi_entropy(RHO_C, SIGMA_C, 2.5)


def test_hard_instance_paper_values():
    h = est.hard_instance(0.2)
    assert np.allclose(h.rho.data, np.diag([0.6, 0.4]))
    assert np.allclose(h.sigma.data, np.diag([0.7, 0.3]))
    assert np.allclose(h.eta.data, np.diag([0.25, 0.75]))
    assert h.rho.kappa <= 4 and h.sigma.kappa <= 4
    e = 0.2
    dh = math.sqrt(1 - (math.sqrt((1 + e) * (1 + 2 * e)) + math.sqrt((1 - e) * (1 - 2 * e))) / 2)
    assert h.hellinger_pq == pytest.approx(dh, abs=1e-14)
    assert h.hellinger_pq <= e
    with pytest.raises(InvalidEps):
        est.hard_instance(0.3)


def test_gap_slope_matches_finite_difference():
    for a in (0.25, 0.5, 0.75):
        e = 1e-6
        h = est.hard_instance(e)
        diff = (est.exact_geo_quasi_entropy(h.rho, h.eta, a)
                - est.exact_geo_quasi_entropy(h.sigma, h.eta, a)) / e
        assert diff == pytest.approx(est.quasi_entropy_gap_slope(a), rel=1e-4)
        assert est.quasi_entropy_gap_slope(a) > 0


def test_estimate_fidelity_maximally_mixed(rng):
    I2 = np.eye(2) / 2
    e = est.estimate_fidelity(I2, I2, 2.0, 2.0, 0.05, rng=rng)
    assert abs(e.value - 1.0) <= 0.05
    assert e.method == est.AMPLITUDE
    assert e.resources.total_queries() > 0
    d = e.to_dict()
    assert {"value", "target_eps", "method", "resources", "confidence_note", "route"} <= set(d)


def test_estimate_fidelity_modes(rng):
    h = est.hard_instance(0.2)
    exact = est.exact_fidelity(h.rho, h.sigma)
    e = est.estimate_fidelity(h.rho, h.sigma, 4.0, 4.0, 0.05, mode=est.EXACT)
    assert e.value == pytest.approx(exact, abs=1e-12)
    e = est.estimate_fidelity(h.rho, h.sigma, 4.0, 4.0, 0.05, mode=est.SAMPLED, rng=rng)
    assert abs(e.value - exact) <= 0.05
    assert e.route["shots"] > 0


def test_estimate_fidelity_symmetric_choice(rng):
    h = est.hard_instance(0.2)
    a = est.estimate_fidelity(h.rho, h.sigma, 2.5, 4.0, 0.05, rng=1)
    b = est.estimate_fidelity(h.sigma, h.rho, 4.0, 2.5, 0.05, rng=1)
    # the better-conditioned state always plays sigma, so both calls run the same pipeline
    assert a.route["flipped"] != b.route["flipped"]
    assert a.resources.total_queries() == b.resources.total_queries()


def test_estimate_promise_checked():
    h = est.hard_instance(0.2)
    with pytest.raises(PromiseViolated):
        est.estimate_fidelity(h.rho, h.sigma, 2.0, 2.0, 0.05)


def test_quasi_entropy_estimates(rng):
    rho = np.eye(2) / 2
    e = est.estimate_geo_quasi_entropy(rho, rho, 0.5, 2.0, 2.0, 0.05, rng=rng)
    assert abs(e.value - 1) <= 0.05
    r = est.estimate_geo_renyi(rho, rho, 0.5, 2.0, 2.0, 0.05, rng=rng)
    assert abs(r.value) <= 0.05
    r = est.estimate_geo_renyi(RHO_C, SIGMA_C, 0.5, 4.0, 4.0, 0.05, rng=rng)
    assert abs(r.value - RENYI_HALF_C) <= 0.05


def test_route_choice():
    assert est.choose_route(0.5, 2.0, 2.0) == est.ROUTE_FIRST
    c = est.route_costs(0.5, 10.0, 2.0)
    assert c[est.ROUTE_FIRST] > c[est.ROUTE_SECOND]
    assert est.choose_route(0.5, 10.0, 2.0) == est.ROUTE_SECOND
    assert est.renyi_relative_eps(0.5, 0.1) == pytest.approx(0.05 / 1.05)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_fidelity_formula_equivalence(seed, n):
    rng = np.random.default_rng(seed)
    rho, sigma = rand_state(1 << n, rng), rand_state(1 << n, rng)
    M = est.fuchs_caves_observable(rho, sigma).data
    assert np.trace(M @ sigma).real == pytest.approx(uhlmann_scipy(rho, sigma), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3), st.sampled_from([0.3, 0.5, 0.8, 1.5, 2.0]))
def test_routes_and_bounds(seed, n, alpha):
    rng = np.random.default_rng(seed)
    N = 1 << n
    rho, sigma = rand_state(N, rng, kappa=4 * N), rand_state(N, rng, kappa=4 * N)
    a = est.exact_geo_quasi_entropy(rho, sigma, alpha, est.ROUTE_FIRST)
    b = est.exact_geo_quasi_entropy(rho, sigma, alpha, est.ROUTE_SECOND)
    assert a == pytest.approx(b, abs=1e-10)
    kr = est.DensityMatrix.from_array(rho).kappa
    ks = est.DensityMatrix.from_array(sigma).kappa
    if alpha < 1:
        assert ks ** (alpha - 1) - 1e-12 <= a <= kr ** (1 - alpha) + 1e-12
        assert a <= 1 + 1e-12
    else:
        assert a >= 1 - 1e-12
    lo, hi = est.quasi_entropy_bounds(alpha, kr, ks)
    assert lo - 1e-12 <= a <= hi + 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_jensen_inequality(seed, n):
    rng = np.random.default_rng(seed)
    N = 1 << n
    Y, rho = rand_pd(N, 20, rng), rand_state(N, rng)
    assert np.trace(inverse(Y) @ rho).real >= 1 / np.trace(Y @ rho).real - 1e-12
    assert np.allclose(matrix_power(Y, -1) @ Y, np.eye(N), atol=1e-10)
