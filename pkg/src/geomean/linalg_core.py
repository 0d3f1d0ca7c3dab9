"""Dense Hermitian linear algebra used as ground truth by every other module.

All matrix functions go through a single eigendecomposition path
(:func:`spectral_decompose`), so the error of every oracle value is that of one
``eigh`` call plus a reconstruction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

from . import config
from .errors import (
    DimensionMismatch,
    InvalidWeight,
    NonHermitian,
    NotPositiveDefinite,
    NumericalFailure,
)

ArrayLike = Union[np.ndarray, "HermitianMatrix", "PDMatrix", list, float]


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Return ``V diag(fn(w)) V^dag``."""
        V = self.eigenvectors
        return _hermitize((V * fn(self.eigenvalues)) @ V.conj().T)

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda w: w)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Validated Hermitian matrix with a cached spectrum."""

    data: np.ndarray
    hermitian_tol: float | None = None

    def __post_init__(self):
        arr = as_hermitian(self.data, self.hermitian_tol)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return spectral_decompose(self.data)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True, eq=False)
class PDMatrix:
    """Positive definite matrix together with its extreme eigenvalues."""

    base: HermitianMatrix
    lambda_min: float = field(init=False)
    lambda_max: float = field(init=False)

    def __post_init__(self):
        w = _pd_eigenvalues(self.base.spectrum.eigenvalues)
        object.__setattr__(self, "lambda_min", float(w[0]))
        object.__setattr__(self, "lambda_max", float(w[-1]))

    @classmethod
    def from_array(cls, A: ArrayLike) -> "PDMatrix":
        if isinstance(A, PDMatrix):
            return A
        if isinstance(A, HermitianMatrix):
            return cls(A)
        return cls(HermitianMatrix(np.asarray(A)))

    @property
    def kappa(self) -> float:
        return self.lambda_max / self.lambda_min

    @property
    def data(self) -> np.ndarray:
        return self.base.data

    @property
    def dim(self) -> int:
        return self.base.dim

    def normalized(self) -> "PDMatrix":
        """Rescale so that lambda_max = 1, giving I >= A >= I/kappa."""
        return PDMatrix.from_array(self.data / self.lambda_max)

    def __array__(self, dtype=None, copy=None):
        return self.base.__array__(dtype)


def _hermitize(H: np.ndarray) -> np.ndarray:
    return (H + H.conj().T) / 2


def _raw(H: ArrayLike) -> np.ndarray:
    if isinstance(H, (HermitianMatrix, PDMatrix)):
        return H.data
    arr = np.asarray(H)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if not np.issubdtype(arr.dtype, np.inexact):
        arr = arr.astype(float)
    return arr


def as_hermitian(H: ArrayLike, tol: float | None = None) -> np.ndarray:
    """Validate ``H`` as Hermitian and return its symmetrized copy.

    Deviations up to ``tol`` (default ``1e-10 * dim``, operator norm) are
    absorbed by symmetrizing; larger ones raise :class:`NonHermitian`.
    """
    if isinstance(H, (HermitianMatrix, PDMatrix)):
        return H.data
    arr = _raw(H)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NumericalFailure("matrix has non-finite entries")
    if tol is None:
        tol = config.HERMITIAN_TOL_PER_DIM * arr.shape[0]
    skew = arr - arr.conj().T
    if skew.any():
        dev = np.linalg.norm(skew, 2)
        if dev > tol:
            raise NonHermitian(f"||H - H^dag|| = {dev:.3e} exceeds tolerance {tol:.3e}")
    return _hermitize(arr)


def spectral_decompose(H: ArrayLike) -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues."""
    if isinstance(H, (HermitianMatrix, PDMatrix)):
        H = H.data
    arr = as_hermitian(H)
    try:
        w, V = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailure(str(exc)) from exc
    return SpectralDecomposition(w, V)


def _spectrum(H: ArrayLike) -> SpectralDecomposition:
    if isinstance(H, PDMatrix):
        return H.base.spectrum
    if isinstance(H, HermitianMatrix):
        return H.spectrum
    return spectral_decompose(H)


def _pd_eigenvalues(w: np.ndarray) -> np.ndarray:
    top = w[-1]
    if top <= 0 or w[0] <= config.LAMBDA_FLOOR_REL * top:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e} (largest {top:.3e})")
    return w


def pd_spectrum(A: ArrayLike) -> SpectralDecomposition:
    """Spectrum of ``A`` after checking positive definiteness."""
    s = _spectrum(A)
    _pd_eigenvalues(s.eigenvalues)
    return s


def matrix_function(H: ArrayLike, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to the spectrum of a Hermitian matrix."""
    return _spectrum(H).apply(fn)


def matrix_power(A: ArrayLike, t: float) -> np.ndarray:
    """``A**t`` for positive definite ``A`` and real ``t``."""
    s = pd_spectrum(A)
    if t == 0:
        return np.eye(len(s.eigenvalues), dtype=s.eigenvectors.dtype)
    return s.apply(lambda w: w ** t)


def matrix_log(A: ArrayLike) -> np.ndarray:
    return pd_spectrum(A).apply(np.log)


def operator_norm(H: ArrayLike) -> float:
    return float(np.max(np.abs(_spectrum(H).eigenvalues)))


def condition_number(A: ArrayLike) -> float:
    w = pd_spectrum(A).eigenvalues
    return float(w[-1] / w[0])


def _check_pair(A: ArrayLike, C: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    a, c = as_hermitian(A), as_hermitian(C)
    if a.shape != c.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {c.shape} differ")
    return a, c


def geodesic_point(A: ArrayLike, C: ArrayLike, t: float) -> np.ndarray:
    """``A^{1/2} (A^{-1/2} C A^{-1/2})^t A^{1/2}`` for any real ``t``.

    For ``t`` in (0, 1) this is the weighted geometric mean; other values of
    ``t`` extend the geodesic through ``A`` and ``C``.
    """
    _check_pair(A, C)
    sA = pd_spectrum(A)
    pd_spectrum(C)
    half = sA.apply(np.sqrt)
    ihalf = sA.apply(lambda w: 1 / np.sqrt(w))
    inner = _hermitize(ihalf @ as_hermitian(C) @ ihalf)
    return _hermitize(half @ matrix_power(inner, t) @ half)


def weighted_geometric_mean(A: ArrayLike, C: ArrayLike, t: float) -> np.ndarray:
    """``A #_t C``, the point at fraction ``t`` along the geodesic from A to C."""
    if not 0 < t < 1:
        raise InvalidWeight(f"weight must lie in (0, 1), got {t}")
    return geodesic_point(A, C, t)


def geometric_mean(A: ArrayLike, C: ArrayLike) -> np.ndarray:
    """``A # C = A^{1/2} (A^{-1/2} C A^{-1/2})^{1/2} A^{1/2}``."""
    return geodesic_point(A, C, 0.5)


def geodesic_distance(X: ArrayLike, Y: ArrayLike) -> float:
    """Riemannian distance ``||log(X^{-1/2} Y X^{-1/2})||_F``.

    Called as ``geodesic_distance(inv(A), C)`` it equals the Schatten-2 norm of
    ``log(A^{1/2} C A^{1/2})``.
    """
    _check_pair(X, Y)
    ihalf = pd_spectrum(X).apply(lambda w: 1 / np.sqrt(w))
    pd_spectrum(Y)
    inner = ihalf @ as_hermitian(Y) @ ihalf
    w = _pd_eigenvalues(spectral_decompose(_hermitize(inner)).eigenvalues)
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def inverse(A: ArrayLike) -> np.ndarray:
    return matrix_power(A, -1.0)


def min_eigenvalue(H: ArrayLike) -> float:
    return float(_spectrum(H).eigenvalues[0])


def max_characterization_holds(A: ArrayLike, C: ArrayLike, n_directions: int = 64,
                               steps: tuple[float, ...] = (1e-3, 1e-2, 1e-1),
                               tol: float = 1e-9, seed: int = 0) -> bool:
    """Grid check that ``A # C`` is the largest X with [[A, X], [X, C]] >= 0.

    The geometric mean must make the block matrix PSD, and pushing it along any
    sampled PSD direction by any grid step must break PSD-ness. Meant for
    dim <= 4 only.
    """
    a, c = _check_pair(A, C)
    n = a.shape[0]
    if n > 4:
        raise DimensionMismatch("max-characterization check is limited to dim <= 4")
    G = geometric_mean(a, c)

    def block_min(X):
        return np.linalg.eigvalsh(np.block([[a, X], [X.conj().T, c]]))[0]

    scale = max(operator_norm(a), operator_norm(c))
    if block_min(G) < -tol * scale:
        return False
    rng = np.random.default_rng(seed)
    for _ in range(n_directions):
        v = rng.standard_normal((n, 1))
        P = v @ v.T
        P /= np.linalg.norm(P, 2)
        for s in steps:
            if block_min(G + s * scale * P) >= 0:
                return False
    return True
