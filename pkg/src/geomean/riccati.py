"""Closed-form solvers for algebraic Riccati equations.

``Y A Y = C`` has the unique positive definite solution ``Y = A^{-1} # C``.
With a linear term, ``Y A Y - B^dag Y - Y^dag B - C = 0`` is solved by
completing the square, which gives two branches
``Y = A^{-1}B +/- A^{-1} # (B^dag A^{-1} B + C)`` whenever ``A^{-1}B`` is
Hermitian. ``Y (A Y)^{p-1} = C`` is solved by ``A^{-1} #_{1/p} C``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidOrder, PreconditionViolated
from .linalg_core import (
    ArrayLike,
    as_hermitian,
    geodesic_point,
    inverse,
    pd_spectrum,
)

PRECONDITION_RTOL = 1e-8
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class RiccatiSolution:
    y_plus: np.ndarray
    y_minus: np.ndarray | None
    residual_plus: float
    residual_minus: float | None
    branch_note: str
    hermitian_dev_plus: float = 0.0
    hermitian_dev_minus: float | None = None
    residual_tol: float = 0.0

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        out = {
            "y_plus": matrix_to_json(self.y_plus),
            "residual_plus": self.residual_plus,
            "hermitian_dev_plus": self.hermitian_dev_plus,
            "residual_tol": self.residual_tol,
            "branch_note": self.branch_note,
        }
        if self.y_minus is not None:
            out["y_minus"] = matrix_to_json(self.y_minus)
            out["residual_minus"] = self.residual_minus
            out["hermitian_dev_minus"] = self.hermitian_dev_minus
        return out


def _mat(X: ArrayLike) -> np.ndarray:
    if hasattr(X, "data") and not isinstance(X, np.ndarray):
        return np.asarray(X.data)
    arr = np.asarray(X)
    return arr.reshape(1, 1) if arr.ndim == 0 else arr


def residual_norm(A: ArrayLike, B: ArrayLike | None, C: ArrayLike, Y: ArrayLike) -> float:
    """Operator norm of ``Y^dag A Y - B^dag Y - Y^dag B - C``."""
    a, c, y = _mat(A), _mat(C), _mat(Y)
    b = np.zeros_like(a) if B is None else _mat(B)
    shapes = {a.shape, b.shape, c.shape, y.shape}
    if len(shapes) != 1:
        raise DimensionMismatch(f"non-conformable shapes {sorted(shapes)}")
    yh = y.conj().T
    R = yh @ a @ y - b.conj().T @ y - yh @ b - c
    return float(np.linalg.norm(R, 2))


def residual_tolerance(A, B, C, Y) -> float:
    """Relative acceptance ``1e-8 (||A|| ||Y||^2 + ||B|| ||Y|| + ||C||)``."""
    a, c, y = _mat(A), _mat(C), _mat(Y)
    nb = 0.0 if B is None else np.linalg.norm(_mat(B), 2)
    ny = np.linalg.norm(y, 2)
    return RESIDUAL_RTOL * (np.linalg.norm(a, 2) * ny ** 2 + nb * ny + np.linalg.norm(c, 2))


def solve_yayc(A: ArrayLike, C: ArrayLike) -> np.ndarray:
    """Unique positive definite solution of ``Y A Y = C``, i.e. ``A^{-1} # C``."""
    a, c = as_hermitian(A), as_hermitian(C)
    if a.shape != c.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {c.shape} differ")
    return geodesic_point(inverse(a), c, 0.5)


def solve_pth_order(A: ArrayLike, C: ArrayLike, p: int) -> np.ndarray:
    """Unique positive definite solution of ``Y (A Y)^{p-1} = C``."""
    if int(p) != p or p < 2:
        raise InvalidOrder(f"order must be an integer >= 2, got {p}")
    a, c = as_hermitian(A), as_hermitian(C)
    if a.shape != c.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {c.shape} differ")
    return geodesic_point(inverse(a), c, 1.0 / p)


def pth_order_residual(A: ArrayLike, C: ArrayLike, Y: ArrayLike, p: int) -> float:
    a, c, y = _mat(A), _mat(C), _mat(Y)
    return float(np.linalg.norm(y @ np.linalg.matrix_power(a @ y, int(p) - 1) - c, 2))


def solve_riccati_general(A: ArrayLike, B: ArrayLike, C: ArrayLike,
                          precondition_tol: float | None = None) -> RiccatiSolution:
    """Both completing-the-square branches of the Riccati equation with linear term."""
    a, c = as_hermitian(A), as_hermitian(C)
    b = _mat(B)
    if not (a.shape == b.shape == c.shape):
        raise DimensionMismatch(f"shapes {a.shape}, {b.shape}, {c.shape} differ")
    pd_spectrum(a)
    pd_spectrum(c)
    a_inv = inverse(a)
    shift = a_inv @ b
    scale = np.linalg.norm(shift, 2)
    if precondition_tol is None:
        precondition_tol = PRECONDITION_RTOL * scale
    dev = np.linalg.norm(shift - shift.conj().T, 2)
    if dev > precondition_tol:
        raise PreconditionViolated(f"A^-1 B is not Hermitian: deviation {dev:.3e}")
    D = as_hermitian(b.conj().T @ a_inv @ b + c, tol=max(1e-10, 1e-10 * scale) * a.shape[0])
    pd_spectrum(D)
    root = geodesic_point(a_inv, D, 0.5)

    y_plus = root + shift
    r_plus = residual_norm(a, b, c, y_plus)
    tol = residual_tolerance(a, b, c, y_plus)
    if not b.any():
        return RiccatiSolution(y_plus, -y_plus, r_plus, residual_norm(a, b, c, -y_plus),
                               "B = 0: minus branch is the negative of the PD solution",
                               0.0, 0.0, tol)
    y_minus = shift - root
    herm = lambda y: float(np.linalg.norm(y - y.conj().T, 2))
    return RiccatiSolution(
        y_plus, y_minus, r_plus, residual_norm(a, b, c, y_minus),
        "both branches share the shift A^-1 B; y_plus - shift = -(y_minus - shift)",
        herm(y_plus), herm(y_minus), tol,
    )
