"""Bounded Chebyshev approximations of power functions.

Two target families are supported on ``[delta, 1]``:

* negative powers ``f(x) = (x/delta)^{-c} / 2``,
* positive powers ``f(x) = x^c / 2`` with ``0 < c < 1``.

Each approximant ``q`` must satisfy ``|q - f| <= eps`` on ``[delta, 1]`` and
``|q| <= 1`` on ``[-1, 1]``. We build ``q`` by Chebyshev interpolation of a
smoothed extension of ``f``: the target is multiplied by an erf-shaped step
that climbs from ~0 to ~1 inside ``[lo*delta, delta]`` and is cut to exactly
zero further left, so nothing singular at ``x <= 0`` leaks into the series.
The interpolant is truncated at the first degree whose coefficient tail is
below ``eps/4`` and then audited on a dense grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy.fft import dct
from scipy.special import erf

from . import config
from .errors import DegreeOverflow, InvalidParams, OutOfDomain

POS_POWER = "pos_power"
NEG_POWER = "neg_power"
# exponents in (1, 2] are smooth enough for the same construction
MAX_POSITIVE_EXPONENT = 2.0


@dataclass(frozen=True, eq=False)
class ChebyshevPoly:
    coeffs: np.ndarray
    kind: str
    c: float
    delta: float
    eps: float
    measured_sup_error: float = math.nan
    measured_max_abs: float = math.nan
    scale_factor: float = 1.0          # < 1 when the rescale-to-fit step fired
    meta: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def target(self, x):
        return target_function(self.kind, self.c, self.delta)(np.asarray(x, dtype=float))

    def __call__(self, x):
        return evaluate_many(self.coeffs, x)

    def degree_bound(self, K: float = config.DEGREE_CONSTANT) -> float:
        return degree_bound(self.kind, self.c, self.delta, self.eps, K)

    def to_dict(self) -> dict:
        return {
            "basis": "chebyshev-T",
            "coeffs": [float(v) for v in self.coeffs],
            "meta": {
                "kind": self.kind,
                "c": self.c,
                "delta": self.delta,
                "eps": self.eps,
                "degree": self.degree,
                "degree_bound": self.degree_bound(),
                "measured_sup_error": self.measured_sup_error,
                "measured_max_abs": self.measured_max_abs,
                "scale_factor": self.scale_factor,
                **self.meta,
            },
        }


@dataclass(frozen=True)
class AuditResult:
    sup_error: float
    max_abs: float
    n_points: int


def target_function(kind: str, c: float, delta: float):
    if kind == NEG_POWER:
        return lambda x: 0.5 * (x / delta) ** (-c)
    if kind == POS_POWER:
        return lambda x: 0.5 * x ** c
    raise InvalidParams(f"unknown target kind {kind!r}")


def degree_bound(kind: str, c: float, delta: float, eps: float,
                 K: float = config.DEGREE_CONSTANT) -> float:
    factor = (c + 1) if kind == NEG_POWER else 1.0
    return K * factor / delta * math.log(1 / eps)


# ---------------------------------------------------------------- evaluation

def evaluate(poly, x):
    """Clenshaw evaluation of a Chebyshev series at ``x`` in [-1, 1]."""
    coeffs = poly.coeffs if isinstance(poly, ChebyshevPoly) else np.asarray(poly, dtype=float)
    xs = np.asarray(x, dtype=float)
    if np.any(np.abs(xs) > 1 + 1e-12):
        raise OutOfDomain("Chebyshev series are only evaluated on [-1, 1]")
    xs = np.clip(xs, -1.0, 1.0)
    b1 = np.zeros_like(xs)
    b2 = np.zeros_like(xs)
    for ck in coeffs[:0:-1]:
        b1, b2 = 2 * xs * b1 - b2 + ck, b1
    out = xs * b1 - b2 + coeffs[0]
    return float(out) if np.ndim(x) == 0 else out


def evaluate_many(coeffs: np.ndarray, x) -> np.ndarray:
    """Evaluate a (possibly very long) series at many points.

    Uses ``T_k(cos t) = cos(k t)`` and a type-2 non-uniform FFT, which is exact
    to rounding and costs O(d log d + n) instead of O(d n).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(xs) > 1 + 1e-12):
        raise OutOfDomain("Chebyshev series are only evaluated on [-1, 1]")
    if len(coeffs) <= 64 or xs.size * len(coeffs) <= 1 << 16:
        out = evaluate(coeffs, np.clip(xs, -1, 1))
    else:
        import finufft

        theta = np.arccos(np.clip(xs, -1, 1))
        d = len(coeffs)
        modes = np.zeros(2 * d, dtype=complex)
        modes[d:] = coeffs                      # mode k sits at index d + k
        out = finufft.nufft1d2(theta, modes, eps=1e-15, isign=1, modeord=0).real
    return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


def chebyshev_nodes(m: int) -> np.ndarray:
    """First-kind Chebyshev nodes ``cos(pi (j + 1/2) / m)``."""
    return np.cos(np.pi * (np.arange(m) + 0.5) / m)


def _values_at_nodes(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Exact values at the ``m >= len(coeffs)`` first-kind nodes via a DCT-III."""
    padded = np.zeros(m)
    padded[: len(coeffs)] = coeffs
    return (dct(padded, type=3) + padded[0]) / 2


def interpolate(g, n_points: int) -> np.ndarray:
    """Chebyshev coefficients of the interpolant of ``g`` at first-kind nodes."""
    vals = g(chebyshev_nodes(n_points))
    coeffs = dct(vals, type=2) / n_points
    coeffs[0] /= 2
    return coeffs


# -------------------------------------------------------------- construction

def _window_start(kind: str, c: float) -> float:
    # Keep w(x) f(x) below ~0.8 inside the transition window. Large negative
    # exponents force a narrower window, which is where the (c + 1) factor of
    # the degree bound comes from.
    if kind == NEG_POWER:
        return max(0.5, 1.6 ** (-1.0 / c))
    return 0.5


def smoothed_target(kind: str, c: float, delta: float, eps: float):
    """Extension of the target to [-1, 1] used for interpolation."""
    f = target_function(kind, c, delta)
    lo = _window_start(kind, c)
    half_width = (1 - lo) * delta / 2
    centre = delta - half_width
    steep = math.sqrt(math.log(2 / eps)) / half_width
    cut = centre / 4

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        m = x > cut
        xm = x[m]
        out[m] = 0.5 * (1 + erf(steep * (xm - centre))) * f(xm)
        return out

    return g


def _audit_points(delta: float, grid_size: int, degree: int):
    half = grid_size // 2
    m = max(half, 2 * (degree + 1))
    full_uniform = np.linspace(-1, 1, half)
    sub_nodes = (1 + delta) / 2 + (1 - delta) / 2 * chebyshev_nodes(half)
    sub_uniform = np.linspace(delta, 1, half)
    return m, full_uniform, np.concatenate([sub_nodes, sub_uniform])


def audit(poly: ChebyshevPoly, grid_size: int = config.AUDIT_GRID_SIZE) -> AuditResult:
    """Sup error on [delta, 1] and max |q| on [-1, 1] over a fixed grid.

    The grid is the union of first-kind Chebyshev nodes (at least twice the
    degree, evaluated exactly by DCT) and a uniform grid, on [-1, 1], plus
    Chebyshev and uniform grids mapped onto [delta, 1].
    """
    if grid_size < 1000:
        raise InvalidParams("audit grid must have at least 1000 points")
    coeffs = poly.coeffs
    m, full_uniform, sub = _audit_points(poly.delta, grid_size, poly.degree)
    nodes = chebyshev_nodes(m)
    v_nodes = _values_at_nodes(coeffs, m)
    v_uni = evaluate_many(coeffs, full_uniform)
    v_sub = evaluate_many(coeffs, sub)
    f = target_function(poly.kind, poly.c, poly.delta)
    in_range = nodes >= poly.delta
    err_nodes = np.abs(v_nodes[in_range] - f(nodes[in_range]))
    sup_error = max(float(np.max(np.abs(v_sub - f(sub)))),
                    float(err_nodes.max()) if err_nodes.size else 0.0)
    max_abs = float(max(np.max(np.abs(v_nodes)), np.max(np.abs(v_uni)), np.max(np.abs(v_sub))))
    return AuditResult(sup_error, max_abs, m + full_uniform.size + sub.size)


def _tail_degree(coeffs: np.ndarray, budget: float) -> int:
    tail = np.cumsum(np.abs(coeffs[::-1]))[::-1]     # tail[j] = sum_{k >= j} |c_k|
    ok = np.nonzero(tail <= budget)[0]
    return int(ok[0]) - 1 if ok.size else len(coeffs) - 1


def _validate(c: float, delta: float, eps: float, kind: str):
    if not (0 < delta <= 1):
        raise InvalidParams(f"delta must lie in (0, 1], got {delta}")
    if not (0 < eps < 0.5):
        raise InvalidParams(f"eps must lie in (0, 1/2), got {eps}")
    if kind == POS_POWER and not (0 < c <= MAX_POSITIVE_EXPONENT):
        raise InvalidParams(f"positive power needs 0 < c <= {MAX_POSITIVE_EXPONENT}, got {c}")
    if kind == NEG_POWER and not c > 0:
        raise InvalidParams(f"negative power needs c > 0, got {c}")


@lru_cache(maxsize=256)
def _construct(kind: str, c: float, delta: float, eps: float, grid_size: int) -> ChebyshevPoly:
    _validate(c, delta, eps, kind)
    bound = degree_bound(kind, c, delta, eps)
    limit = min(8 * bound, config.MAX_DEGREE)
    g = smoothed_target(kind, c, delta, eps)

    n = 1024
    while True:
        coeffs = interpolate(g, n)
        settled = np.max(np.abs(coeffs[-n // 8:])) <= max(1e-5 * eps, 1e-17)
        if settled or n >= 2 * limit:
            break
        n *= 2

    # rounding noise sits near 1e-19 per coefficient but would dominate a tail
    # sum over millions of terms, so coefficients under the floor are ignored
    floor = 50 * float(np.median(np.abs(coeffs[-n // 8:])))
    degree = _tail_degree(np.where(np.abs(coeffs) > floor, coeffs, 0.0), eps / 4)
    while True:
        if degree > limit:
            raise DegreeOverflow(f"degree {degree} exceeds 8x the bound {bound:.0f}")
        trial = coeffs[: degree + 1].copy()
        poly = ChebyshevPoly(trial, kind, c, delta, eps)
        res = audit(poly, grid_size)
        scale = 1.0
        if res.max_abs > 1:
            scale = 1 / res.max_abs
            poly = ChebyshevPoly(trial * scale, kind, c, delta, eps)
            res = audit(poly, grid_size)
        if res.sup_error <= eps and res.max_abs <= 1 + config.BOUND_SLACK:
            break
        degree = int(degree * 1.25) + 1
        if degree >= len(coeffs):
            raise DegreeOverflow("interpolant exhausted before the audit passed")
    poly.coeffs.setflags(write=False)
    return ChebyshevPoly(poly.coeffs, kind, c, delta, eps, res.sup_error, res.max_abs, scale,
                         {"interpolation_points": n, "audit_points": res.n_points})


def approx_negative_power(c: float, delta: float, eps: float,
                          grid_size: int = config.AUDIT_GRID_SIZE) -> ChebyshevPoly:
    """Bounded approximant of ``(x/delta)^{-c}/2`` on ``[delta, 1]``."""
    return _construct(NEG_POWER, float(c), float(delta), float(eps), int(grid_size))


def approx_positive_power(c: float, delta: float, eps: float,
                          grid_size: int = config.AUDIT_GRID_SIZE) -> ChebyshevPoly:
    """Bounded approximant of ``x^c/2`` on ``[delta, 1]``."""
    return _construct(POS_POWER, float(c), float(delta), float(eps), int(grid_size))


def from_coefficients(coeffs, kind: str = "custom", c: float = 0.0, delta: float = 1.0,
                      eps: float = 0.0) -> ChebyshevPoly:
    """Wrap raw coefficients (e.g. ``[0, 1]`` for ``q(x) = x``)."""
    arr = np.asarray(coeffs, dtype=float).copy()
    arr.setflags(write=False)
    grid = np.linspace(-1, 1, 4001)
    max_abs = float(np.max(np.abs(evaluate_many(arr, grid))))
    return ChebyshevPoly(arr, kind, c, delta, eps, 0.0, max_abs)
