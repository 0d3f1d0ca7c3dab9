"""Expectation values of block-encoded observables and the estimators built on them.

Fidelity is read off the Fuchs-Caves observable ``M = sigma^{-1} # rho``
through ``F(rho, sigma) = Tr(M sigma)``; the geometric quasi-entropy
``Tr(rho #_{1-alpha} sigma)`` is read off a conjugated power of one state
sandwiching the other. In both cases the observable comes out of a
block-encoding pipeline, a Hadamard test turns ``Re Tr(block * state)`` into
an outcome probability, and amplitude estimation recovers that probability.
Amplitude estimation is simulated by sampling its exact outcome distribution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from scipy.stats import binom

from . import blockenc as be_mod
from . import config
from .blockenc import BlockEncoding, ResourceLedger
from .errors import (
    DimensionMismatch,
    InvalidAlpha,
    InvalidEps,
    InvalidM,
    InvalidParams,
    InvalidState,
    PromiseViolated,
)
from .geomean_pipeline import be_conjugated_power, be_inverse_geomean
from .linalg_core import (
    HermitianMatrix,
    geodesic_point,
    geometric_mean,
    inverse,
    matrix_power,
    spectral_decompose,
)

EXACT = "exact"
SAMPLED = "hadamard_sampled"
AMPLITUDE = "amplitude_estimated"
MODES = (EXACT, SAMPLED, AMPLITUDE)

ROUTE_FIRST = "first"       # Tr(rho (rho^{-1/2} sigma rho^{-1/2})^{1-alpha}), Hadamard test with rho
ROUTE_SECOND = "second"     # Tr(sigma (sigma^{-1/2} rho sigma^{-1/2})^alpha), Hadamard test with sigma

SAMPLED_FAILURE = 1e-3      # Hoeffding failure probability for sampled mode
PROMISE_TOL = 1e-9


# -------------------------------------------------------------------- types

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    base: HermitianMatrix
    trace_tol: float = 1e-9

    def __post_init__(self):
        w = self.base.spectrum.eigenvalues
        if w[0] < -self.trace_tol:
            raise InvalidState(f"not positive semidefinite: smallest eigenvalue {w[0]:.3e}")
        tr = float(np.sum(w))
        if abs(tr - 1) > self.trace_tol:
            raise InvalidState(f"trace is {tr:.12g}, expected 1")

    @classmethod
    def from_array(cls, rho, trace_tol: float = 1e-9) -> "DensityMatrix":
        if isinstance(rho, DensityMatrix):
            return rho
        if isinstance(rho, Purifier):
            return rho.state
        base = rho if isinstance(rho, HermitianMatrix) else HermitianMatrix(np.asarray(rho))
        return cls(base, trace_tol)

    @property
    def data(self) -> np.ndarray:
        return self.base.data

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def lambda_min(self) -> float:
        return float(self.base.spectrum.eigenvalues[0])

    @property
    def kappa(self) -> float:
        """Smallest ``kappa`` with ``rho >= I / kappa`` (infinite if singular)."""
        lo = self.lambda_min
        return math.inf if lo <= 0 else 1.0 / lo

    def __array__(self, dtype=None, copy=None):
        return self.base.__array__(dtype)


@dataclass(frozen=True, eq=False)
class Purifier:
    """Unitary preparing a purification on [purification, system] qubits."""

    unitary: np.ndarray
    n: int

    @classmethod
    def of(cls, rho) -> "Purifier":
        V, n = be_mod.purifier_for(_mat(rho))
        return cls(V, n)

    @cached_property
    def state(self) -> DensityMatrix:
        a = int(round(math.log2(self.unitary.shape[0]))) - self.n
        psi = self.unitary[:, 0].reshape(1 << a, 1 << self.n)
        return DensityMatrix.from_array(psi.T @ psi.conj())

    def encoding(self, label: str) -> BlockEncoding:
        return be_mod.from_density(self.unitary, self.n, label=label)


@dataclass(frozen=True)
class Estimate:
    value: float
    additive_error_target: float
    method: str
    resources: ResourceLedger
    confidence_note: str = ""
    route: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "target_eps": self.additive_error_target,
                "method": self.method, "resources": self.resources.to_dict(),
                "confidence_note": self.confidence_note, "route": self.route}


@dataclass(frozen=True, eq=False)
class HardInstance:
    eps: float
    rho: DensityMatrix
    sigma: DensityMatrix
    eta: DensityMatrix
    p: np.ndarray
    q: np.ndarray
    hellinger_pq: float

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {"eps": self.eps, "rho": matrix_to_json(self.rho.data),
                "sigma": matrix_to_json(self.sigma.data), "eta": matrix_to_json(self.eta.data),
                "p": self.p, "q": self.q, "hellinger_pq": self.hellinger_pq}


def _mat(x) -> np.ndarray:
    if isinstance(x, Purifier):
        return x.state.data
    if isinstance(x, (DensityMatrix, HermitianMatrix)):
        return x.data
    return np.asarray(x)


def _state(x) -> DensityMatrix:
    return DensityMatrix.from_array(x)


def _purifier(x) -> Purifier:
    return x if isinstance(x, Purifier) else Purifier.of(x)


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


# ------------------------------------------------------- primitive routines

def hadamard_test(be: BlockEncoding, rho, mode: str = EXACT, shots: int | None = None,
                  rng=None) -> float:
    """Probability of outcome 0, ``(1 + Re Tr(<0|U|0> rho)) / 2``.

    In sample mode the empirical frequency of ``shots`` draws is returned.
    """
    r = _mat(rho)
    if r.shape != (be.dim, be.dim):
        raise DimensionMismatch(f"state has shape {r.shape}, encoding acts on dimension {be.dim}")
    p = float(np.clip((1 + np.real(np.trace(be.block @ r))) / 2, 0.0, 1.0))
    if mode == EXACT:
        return p
    if mode not in ("sample", SAMPLED):
        raise InvalidParams(f"unknown Hadamard test mode {mode!r}")
    if shots is None or shots < 1:
        raise InvalidParams("sample mode needs a positive number of shots")
    return float(_rng(rng).binomial(int(shots), p) / shots)


def hadamard_resources(be: BlockEncoding, draws: int, state_label: str = "state") -> ResourceLedger:
    """One controlled use of the encoding and one state preparation per draw."""
    per = be.ledger + ResourceLedger({state_label: 1}, 2, be.phys_a + 1)
    return per.scaled(int(draws))


def ae_distribution(p: float, M: int) -> np.ndarray:
    """Outcome distribution over ``y = 0..M-1`` of amplitude estimation with ``M`` grid points.

    The eigenphases ``+-theta/pi`` with ``theta = arcsin(sqrt(p))`` each carry
    half the weight and spread over the grid through the Fejer kernel.
    """
    if int(M) != M or M < 2:
        raise InvalidM(f"M must be an integer >= 2, got {M}")
    if not 0 <= p <= 1:
        raise InvalidParams(f"probability must lie in [0, 1], got {p}")
    M = int(M)
    omega = math.asin(math.sqrt(p)) / math.pi
    y = np.arange(M) / M

    def fejer(x):
        s = np.sin(np.pi * x)
        out = np.ones_like(x)
        nz = np.abs(s) > 1e-15
        out[nz] = np.sin(M * np.pi * x[nz]) ** 2 / (M ** 2 * s[nz] ** 2)
        return out

    dist = 0.5 * (fejer(y - omega) + fejer(y + omega))
    return dist / dist.sum()


def amplitude_estimate(p_true: float, M: int, rng=None) -> float:
    """One amplitude-estimation outcome ``sin^2(pi y / M)`` for success probability ``p_true``."""
    dist = ae_distribution(p_true, M)
    y = _rng(rng).choice(len(dist), p=dist)
    return float(math.sin(math.pi * y / int(M)) ** 2)


def ae_error_bound(p: float, M: int) -> float:
    return 2 * math.pi * math.sqrt(p * (1 - p)) / M + math.pi ** 2 / M ** 2


def ae_grid_size(scale: float, eps: float) -> int:
    """Smallest power of two with ``2 scale (pi/M + pi^2/M^2) <= 3 eps / 4``.

    A value read as ``scale (2 p - 1)`` then stays within ``3 eps / 4`` whenever
    the estimated probability meets the generic error bound.
    """
    M = 2
    while 2 * scale * (math.pi / M + math.pi ** 2 / M ** 2) > 0.75 * eps:
        M *= 2
    return M


def median_failure(k: int, p_success: float = config.AE_TRIALS_CONFIDENCE) -> float:
    """Probability that at least half of ``k`` independent trials fail."""
    return float(binom.sf((k - 1) // 2, k, 1 - p_success))


def _sampled_shots(scale: float, eps: float) -> int:
    t = 3 * eps / (8 * scale)
    return math.ceil(math.log(2 / SAMPLED_FAILURE) / (2 * t * t))


# ------------------------------------------------------------------ oracles

def exact_fidelity(rho, sigma) -> float:
    """``Tr((sigma^{1/2} rho sigma^{1/2})^{1/2})``."""
    r, s = _state(rho), _state(sigma)
    if r.dim != s.dim:
        raise DimensionMismatch(f"dimensions {r.dim} and {s.dim} differ")
    sq = s.base.spectrum.apply(lambda w: np.sqrt(np.clip(w, 0, None)))
    w = spectral_decompose(sq @ r.data @ sq).eigenvalues
    return float(min(1.0, np.sum(np.sqrt(np.clip(w, 0, None)))))


def fuchs_caves_observable(rho, sigma, kappas: tuple[float, float] | None = None) -> HermitianMatrix:
    """``sigma^{-1} # rho``; its expectation in ``sigma`` is the fidelity."""
    r, s = _state(rho), _state(sigma)
    if kappas is not None:
        _check_promises(r, s, *kappas)
    return HermitianMatrix(geometric_mean(inverse(s.data), r.data))


def _check_alpha(alpha: float):
    if not (0 < alpha < 1 or 1 < alpha <= 2):
        raise InvalidAlpha(f"alpha must lie in (0, 1) or (1, 2], got {alpha}")


def exact_geo_quasi_entropy(rho, sigma, alpha: float, route: str | None = None) -> float:
    """``Tr(rho #_{1-alpha} sigma)``, optionally along one of the two trace formulas."""
    _check_alpha(alpha)
    r, s = _state(rho).data, _state(sigma).data
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes {r.shape} and {s.shape} differ")
    if route is None:
        return float(np.real(np.trace(geodesic_point(r, s, 1 - alpha))))
    if route == ROUTE_FIRST:
        A, C, t = r, s, 1 - alpha
    elif route == ROUTE_SECOND:
        A, C, t = s, r, alpha
    else:
        raise InvalidParams(f"unknown route {route!r}")
    isq = matrix_power(A, -0.5)
    W = isq @ C @ isq
    return float(np.real(np.trace(A @ matrix_power((W + W.conj().T) / 2, t))))


def exact_geo_renyi(rho, sigma, alpha: float, base: str = "e") -> float:
    """``log(Tr(rho #_{1-alpha} sigma)) / (alpha - 1)`` in nats or bits."""
    val = math.log(exact_geo_quasi_entropy(rho, sigma, alpha)) / (alpha - 1)
    return val / math.log(2) if base == "2" else val


def quasi_entropy_bounds(alpha: float, kappa_rho: float, kappa_sigma: float) -> tuple[float, float]:
    """Interval that contains ``Tr(rho #_{1-alpha} sigma)`` under the promises."""
    _check_alpha(alpha)
    if alpha < 1:
        return kappa_sigma ** (alpha - 1), 1.0
    return 1.0, kappa_sigma ** (alpha - 1)


# --------------------------------------------------------------- estimators

def _check_promises(r: DensityMatrix, s: DensityMatrix, kappa_rho: float, kappa_sigma: float):
    for st, k, nm in ((r, kappa_rho, "rho"), (s, kappa_sigma, "sigma")):
        if st.lambda_min < (1 - PROMISE_TOL) / k:
            raise PromiseViolated(f"{nm} has smallest eigenvalue {st.lambda_min:.6g} < 1/{k:g}")


def _check_eps(eps: float):
    if not 0 < eps < 1:
        raise InvalidEps(f"eps must lie in (0, 1), got {eps}")


_PIPELINES: dict = {}


def _cached(key, build):
    """Pipelines are deterministic, so repeated estimates on one pair reuse them."""
    if key not in _PIPELINES:
        if len(_PIPELINES) >= 32:
            _PIPELINES.pop(next(iter(_PIPELINES)))
        _PIPELINES[key] = build()
    return _PIPELINES[key]


def _key(*parts):
    return tuple(p.unitary.tobytes() if isinstance(p, Purifier) else p for p in parts)


def _read_out(be: BlockEncoding, state: DensityMatrix, state_label: str, scale: float,
              eps: float, oracle_value: float, mode: str, rng, k: int,
              route: dict) -> Estimate:
    """Estimate ``scale * Re Tr(block * state)`` to within ``eps``.

    The encoding is already accurate to ``eps / 4``; the readout gets the
    remaining ``3 eps / 4``.
    """
    if mode == EXACT:
        return Estimate(oracle_value, eps, EXACT, ResourceLedger(), "dense linear algebra", route)
    p = hadamard_test(be, state)
    if mode == SAMPLED:
        shots = _sampled_shots(scale, eps)
        p_hat = hadamard_test(be, state, "sample", shots, rng)
        res = hadamard_resources(be, shots, state_label)
        note = f"Hoeffding with {shots} shots, failure probability <= {SAMPLED_FAILURE:g}"
        return Estimate(scale * (2 * p_hat - 1), eps, SAMPLED, res, note, {**route, "shots": shots})
    if mode != AMPLITUDE:
        raise InvalidParams(f"unknown estimation mode {mode!r}")
    M = ae_grid_size(scale, eps)
    g = _rng(rng)
    vals = [scale * (2 * amplitude_estimate(p, M, g) - 1) for _ in range(k)]
    res = hadamard_resources(be, M * k, state_label)
    note = (f"median of {k} amplitude estimates with M={M}; "
            f"failure probability <= {median_failure(k):.2e}")
    return Estimate(float(np.median(vals)), eps, AMPLITUDE, res, note,
                    {**route, "M": M, "k": k, "hadamard_probability": p})


def estimate_fidelity(O_rho, O_sigma, kappa_rho: float, kappa_sigma: float, eps: float,
                      mode: str = AMPLITUDE, rng=None, k: int = config.MEDIAN_K,
                      strict: bool = True) -> Estimate:
    """Fidelity to within ``eps`` from purifiers of both states.

    The state with the smaller condition bound plays ``sigma`` in
    ``F = Tr((sigma^{-1} # rho) sigma)``, since the cost grows with the cube
    of that bound and only linearly with the other.
    """
    _check_eps(eps)
    Pr, Ps = _purifier(O_rho), _purifier(O_sigma)
    r, s = Pr.state, Ps.state
    if r.dim != s.dim:
        raise DimensionMismatch(f"dimensions {r.dim} and {s.dim} differ")
    if strict:
        _check_promises(r, s, kappa_rho, kappa_sigma)
    flipped = kappa_rho < kappa_sigma
    if flipped:
        Pr, Ps, kappa_rho, kappa_sigma = Ps, Pr, kappa_sigma, kappa_rho
    route = {"observable": "sigma^-1 # rho", "flipped": flipped,
             "hadamard_state": "rho" if flipped else "sigma"}
    s_label = "O_rho" if flipped else "O_sigma"
    r_label = "O_sigma" if flipped else "O_rho"
    exact = float(np.real(np.trace(fuchs_caves_observable(Pr.state, Ps.state).data @ Ps.state.data)))
    if mode == EXACT:
        return _read_out(None, Ps.state, s_label, 0.0, eps, exact, mode, rng, k, route)

    def build():
        return be_inverse_geomean(Ps.encoding(s_label), Pr.encoding(r_label), eps / 4,
                                  kappa_sigma, kappa_rho, strict=strict)

    rep = _cached(("fidelity", eps) + _key(Ps, Pr, kappa_sigma, kappa_rho), build)
    scale = rep.output.alpha
    route["pipeline_error"] = rep.measured_error_vs_oracle
    return _read_out(rep.output, Ps.state, s_label, scale, eps, exact, mode, rng, k, route)


def route_costs(alpha: float, kappa_rho: float, kappa_sigma: float) -> dict:
    """Query cost (up to the common ``1/eps``) of each trace formula."""
    _check_alpha(alpha)
    first = (kappa_rho ** (3 - alpha) * kappa_sigma if alpha < 1
             else kappa_rho ** 2 * kappa_sigma ** alpha)
    return {ROUTE_FIRST: first, ROUTE_SECOND: kappa_sigma ** (2 + alpha) * kappa_rho}


def choose_route(alpha: float, kappa_rho: float, kappa_sigma: float) -> str:
    c = route_costs(alpha, kappa_rho, kappa_sigma)
    return ROUTE_FIRST if c[ROUTE_FIRST] <= c[ROUTE_SECOND] else ROUTE_SECOND


def _route_plan(route: str, alpha: float, kappa_rho: float, kappa_sigma: float):
    """(A is rho, p, readout scale) for a trace formula."""
    if route == ROUTE_FIRST:
        p = 1 / (1 - alpha)
        g = 1.0 if p > 0 else (kappa_rho * kappa_sigma) ** (-1 / p)
        return True, p, 2 * kappa_rho ** (1 / p) * g
    if route == ROUTE_SECOND:
        return False, 1 / alpha, 2 * kappa_sigma ** alpha
    raise InvalidParams(f"unknown route {route!r}")


def estimate_geo_quasi_entropy(O_rho, O_sigma, alpha: float, kappa_rho: float, kappa_sigma: float,
                               eps: float, mode: str = AMPLITUDE, rng=None,
                               k: int = config.MEDIAN_K, strict: bool = True,
                               route: str | None = None) -> Estimate:
    """``Tr(rho #_{1-alpha} sigma)`` to within ``eps``, along the cheaper trace formula."""
    _check_alpha(alpha)
    _check_eps(eps)
    Pr, Ps = _purifier(O_rho), _purifier(O_sigma)
    r, s = Pr.state, Ps.state
    if r.dim != s.dim:
        raise DimensionMismatch(f"dimensions {r.dim} and {s.dim} differ")
    if strict:
        _check_promises(r, s, kappa_rho, kappa_sigma)
    route = route or choose_route(alpha, kappa_rho, kappa_sigma)
    a_is_rho, p, scale = _route_plan(route, alpha, kappa_rho, kappa_sigma)
    PA, PC = (Pr, Ps) if a_is_rho else (Ps, Pr)
    kA, kC = (kappa_rho, kappa_sigma) if a_is_rho else (kappa_sigma, kappa_rho)
    lA, lC = ("O_rho", "O_sigma") if a_is_rho else ("O_sigma", "O_rho")
    info = {"route": route, "costs": route_costs(alpha, kappa_rho, kappa_sigma),
            "hadamard_state": "rho" if a_is_rho else "sigma", "p": p}
    exact = exact_geo_quasi_entropy(r, s, alpha)
    if mode == EXACT:
        return _read_out(None, PA.state, lA, scale, eps, exact, mode, rng, k, info)

    # the decoded block is Z = (scale/2)^{-1} X with X the observable, so
    # an error of eps/4 on X allows eps/(2 scale) on Z
    def build():
        return be_conjugated_power(PA.encoding(lA), PC.encoding(lC), p, eps / (2 * scale),
                                   kA, kC, strict=strict)

    rep = _cached(("quasi", route, alpha, eps) + _key(PA, PC, kA, kC), build)
    info["pipeline_error"] = rep.measured_error_vs_oracle
    return _read_out(rep.output, PA.state, lA, scale, eps, exact, mode, rng, k, info)


def renyi_relative_eps(alpha: float, eps: float) -> float:
    """Relative accuracy on the quasi-entropy that keeps the divergence within ``eps``."""
    x = eps * abs(alpha - 1)
    return x / (1 + x)


def estimate_geo_renyi(O_rho, O_sigma, alpha: float, kappa_rho: float, kappa_sigma: float,
                       eps: float, mode: str = AMPLITUDE, rng=None, k: int = config.MEDIAN_K,
                       strict: bool = True, base: str = "e") -> Estimate:
    """``log(Tr(rho #_{1-alpha} sigma)) / (alpha - 1)`` to within ``eps``.

    The quasi-entropy is estimated to relative accuracy through its lower
    bound, then clipped into its promised interval before the logarithm.
    """
    _check_alpha(alpha)
    _check_eps(eps)
    if base not in ("e", "2"):
        raise InvalidParams(f"log base must be 'e' or '2', got {base!r}")
    eps_nat = eps * math.log(2) if base == "2" else eps
    lo, hi = quasi_entropy_bounds(alpha, kappa_rho, kappa_sigma)
    eps_f = renyi_relative_eps(alpha, eps_nat) * lo
    est = estimate_geo_quasi_entropy(O_rho, O_sigma, alpha, kappa_rho, kappa_sigma, eps_f,
                                     mode, rng, k, strict)
    f = min(max(est.value, lo), hi)
    val = math.log(f) / (alpha - 1)
    if base == "2":
        val /= math.log(2)
    route = {**est.route, "quasi_entropy": est.value, "quasi_entropy_eps": eps_f, "log_base": base}
    return Estimate(val, eps, est.method, est.resources, est.confidence_note, route)


# ------------------------------------------------------------ hard instance

def hellinger(p, q) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    return float(math.sqrt(0.5 * np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)))


def hard_instance(eps_state: float) -> HardInstance:
    """Two close qubit states with diagonal spectra and a fixed reference ``eta``."""
    if not 0 < eps_state < 0.25:
        raise InvalidEps(f"eps_state must lie in (0, 1/4), got {eps_state}")
    e = float(eps_state)
    p = np.array([(1 + e) / 2, (1 - e) / 2])
    q = np.array([(1 + 2 * e) / 2, (1 - 2 * e) / 2])
    st = lambda d: DensityMatrix.from_array(np.diag(d))
    return HardInstance(e, st(p), st(q), st([0.25, 0.75]), p, q, hellinger(p, q))


def quasi_entropy_gap_slope(alpha: float) -> float:
    """Limit of ``(F_alpha(rho, eta) - F_alpha(sigma, eta)) / eps`` as ``eps -> 0``."""
    return 0.5 ** alpha * (0.75 ** (1 - alpha) - 0.25 ** (1 - alpha)) * alpha
