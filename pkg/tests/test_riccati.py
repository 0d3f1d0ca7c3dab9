import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomean import riccati as ric
from geomean.errors import DimensionMismatch, InvalidOrder, PreconditionViolated
from geomean.linalg_core import matrix_power
from helpers import commuting_family, rand_pd

A_REF = np.array([[2.0, 1.0], [1.0, 3.0]])
C_REF = np.array([[1.0, -0.5], [-0.5, 2.0]])
# A^{-1/2} (A^{1/2} C A^{1/2})^{1/2} A^{-1/2} through scipy.linalg.sqrtm
YAYC_REF = np.array([[0.7720938131912551, -0.30373954753443916],
                     [-0.30373954753443916, 0.8857287538930032]])

seeds = st.integers(0, 2 ** 32 - 1)


def test_yayc_fixtures(rng):
    assert ric.solve_yayc([[4.0]], [[9.0]])[0, 0] == pytest.approx(1.5)
    C = rand_pd(3, 5, rng)
    assert np.allclose(ric.solve_yayc(np.eye(3), C), matrix_power(C, 0.5), atol=1e-12)
    assert np.abs(ric.solve_yayc(A_REF, C_REF) - YAYC_REF).max() <= 1e-12


def test_yayc_random_residual(rng):
    A, C = rand_pd(8, 10, rng), rand_pd(8, 10, rng)
    Y = ric.solve_yayc(A, C)
    assert ric.residual_norm(A, None, C, Y) <= 1e-10


def test_general_scalar_quadratic():
    sol = ric.solve_riccati_general([[1.0]], [[1.0]], [[3.0]])
    assert sol.y_plus[0, 0] == pytest.approx(3.0)
    assert sol.y_minus[0, 0] == pytest.approx(-1.0)
    assert sol.residual_plus <= 1e-12 and sol.residual_minus <= 1e-12


def test_general_zero_linear_term(rng):
    A, C = rand_pd(3, 5, rng), rand_pd(3, 5, rng)
    sol = ric.solve_riccati_general(A, np.zeros((3, 3)), C)
    Y = ric.solve_yayc(A, C)
    assert np.allclose(sol.y_plus, Y, atol=1e-12)
    assert np.allclose(sol.y_minus, -Y, atol=1e-12)


def test_general_commuting_family(rng):
    A, B, C = commuting_family(5, rng)
    sol = ric.solve_riccati_general(A, B, C)
    assert sol.residual_plus <= 1e-10 and sol.residual_minus <= 1e-10
    assert sol.hermitian_dev_plus <= 1e-12
    d = sol.to_dict()
    assert {"y_plus", "y_minus", "residual_minus", "branch_note"} <= set(d)


def test_general_precondition(rng):
    A = rand_pd(3, 5, rng)
    B = rng.normal(size=(3, 3))
    with pytest.raises(PreconditionViolated):
        ric.solve_riccati_general(A, B, np.eye(3))


def test_pth_order_fixtures(rng):
    assert ric.solve_pth_order([[1.0]], [[32.0]], 5)[0, 0] == pytest.approx(2.0)
    A, C = rand_pd(4, 8, rng), rand_pd(4, 8, rng)
    assert np.abs(ric.solve_pth_order(A, C, 2) - ric.solve_yayc(A, C)).max() <= 1e-12
    assert np.allclose(ric.solve_pth_order(np.eye(4), C, 3), matrix_power(C, 1 / 3), atol=1e-12)
    with pytest.raises(InvalidOrder):
        ric.solve_pth_order(A, C, 1)
    with pytest.raises(DimensionMismatch):
        ric.solve_yayc(np.eye(2), np.eye(3))


def test_residual_norm_fixtures(rng):
    C = rand_pd(3, 5, rng)
    assert ric.residual_norm(np.eye(3), None, C, np.zeros((3, 3))) == pytest.approx(np.linalg.norm(C, 2))
    A = rand_pd(3, 5, rng)
    Y = ric.solve_yayc(A, C)
    res = [ric.residual_norm(A, None, C, Y + e * np.eye(3)) for e in (0, 1e-4, 1e-3, 1e-2, 1e-1)]
    assert res[0] <= 1e-10
    assert all(x < y for x, y in zip(res, res[1:]))


def test_uniqueness_by_grid_sweep():
    # among 2x2 real PD candidates on a grid, the residual is smallest at the solution
    A, C = A_REF, C_REF
    Y = ric.solve_yayc(A, C)
    h = 0.01
    x, y, z = np.meshgrid(np.arange(0.5, 1.2, h), np.arange(0.5, 1.2, h),
                          np.arange(-0.6, 0.2, h), indexing="ij")
    Yh = np.stack([np.stack([x, z], -1), np.stack([z, y], -1)], -2).reshape(-1, 2, 2)
    Yh = Yh[x.ravel() * y.ravel() > z.ravel() ** 2]
    R = Yh @ A @ Yh - C
    r = np.linalg.norm(R, 2, axis=(1, 2))
    assert np.abs(Yh[np.argmin(r)] - Y).max() <= h


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(0.1, 10))
def test_scaling_covariance(seed, N, s):
    rng = np.random.default_rng(seed)
    A, C = rand_pd(N, 10, rng), rand_pd(N, 10, rng)
    lhs = ric.solve_yayc(s * A, C)
    rhs = ric.solve_yayc(A, C) / np.sqrt(s)
    assert np.linalg.norm(lhs - rhs) <= 1e-9 * np.linalg.norm(rhs)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 6))
def test_branch_consistency(seed, N):
    rng = np.random.default_rng(seed)
    A, B, C = commuting_family(N, rng)
    sol = ric.solve_riccati_general(A, B, C)
    shift = np.linalg.solve(A, B)
    assert np.linalg.norm((sol.y_plus - shift) + (sol.y_minus - shift)) <= 1e-12
    assert sol.residual_plus <= sol.residual_tol
