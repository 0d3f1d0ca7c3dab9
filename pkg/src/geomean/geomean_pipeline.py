"""Block encodings of geometric means and Riccati solutions, built step by step.

Each pipeline chains power-function QSVT steps, products, linear combinations
and a final up-scaling. Every intermediate encoding keeps a labelled target so
it can be checked against the exact linear algebra, and the final output is
checked against the oracle before it is returned.

Error budgets follow the textbook assignments with hidden constants set to 1,
written in terms of ``e = eps / (scale/2)``, the error allowed on the scale-2
normalized output. The literal budgets (``e^4 / kappa^4`` and below) fall under
float64 resolution, so the accuracy handed to each polynomial is clamped to
``[POLY_EPS_FLOOR, POLY_EPS_CEIL]``. The claimed error composed through the
lemma chain is reported as ``chain_bound``; the returned encoding claims the
requested ``eps`` after the measured error has been confirmed to be below it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from . import blockenc as be_mod
from . import config
from .blockenc import BlockEncoding, adjoint, linear_combine, product, qsvt, retarget, upscale
from .errors import (
    BudgetInfeasible,
    ConditionBoundViolated,
    InvalidParams,
    NormTooLarge,
    PreconditionViolated,
)
from .linalg_core import geodesic_point, inverse, matrix_power
from .polyapprox import MAX_POSITIVE_EXPONENT, NEG_POWER, POS_POWER, approx_negative_power, approx_positive_power, degree_bound

INVERSE = "inverse_geomean"
WEIGHTED = "weighted_geomean"
WEIGHTED_INVERSE = "weighted_inverse"
RICCATI = "riccati_general"
CONJUGATED = "conjugated_power"


@dataclass(frozen=True)
class Step:
    name: str
    lemma: str
    alpha: float
    a: int
    eps_claimed: float
    measured: float | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class PipelineReport:
    kind: str
    output: BlockEncoding
    steps: list[Step]
    epsilon_budget: dict
    degrees: dict
    upscale_counts: dict
    theory_queries: dict
    measured_error_vs_oracle: float
    chain_bound: float
    oracle: np.ndarray
    expected_tuple: tuple[float, int]
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {
            "kind": self.kind,
            "params": self.params,
            "tuple": {"alpha": self.output.alpha, "a": self.output.a,
                      "eps_claimed": self.output.eps_claimed},
            "expected_tuple": {"alpha": self.expected_tuple[0], "a": self.expected_tuple[1]},
            "steps": [s.to_dict() for s in self.steps],
            "epsilon_budget": self.epsilon_budget,
            "degrees": self.degrees,
            "upscale_counts": self.upscale_counts,
            "ledger": self.output.ledger.to_dict(),
            "theory_queries": self.theory_queries,
            "measured_error_vs_oracle": self.measured_error_vs_oracle,
            "chain_bound": self.chain_bound,
            "decoded": matrix_to_json(self.output.decoded()),
        }


# ------------------------------------------------------------------ helpers

def gamma_p(p: float, kappa_A: float, kappa_C: float) -> float:
    return 1.0 if p > 0 else (kappa_A * kappa_C) ** (-1.0 / p)


def _check_p(p: float):
    if p == 0 or 0 < p <= 1:
        raise InvalidParams(f"exponent 1/p needs p > 1 or p < 0, got p={p}")


def _clamp(e: float) -> float:
    return min(max(e, config.POLY_EPS_FLOOR), config.POLY_EPS_CEIL)


def _rescale(be: BlockEncoding, factor: float, label: str | None = None) -> BlockEncoding:
    """Read the same unitary as an encoding of ``factor * target``."""
    tgt = None if be.target is None else be.target * factor
    return replace(be, alpha=be.alpha * factor, eps_claimed=be.eps_claimed * factor,
                   target=tgt, label=label or be.label)


def _check_promise(be: BlockEncoding, kappa: float, name: str):
    if be.target is None:
        raise InvalidParams(f"strict mode needs a target on U_{name}")
    w = np.linalg.eigvalsh((be.target + be.target.conj().T) / 2)
    tol = 1e-9
    if w[-1] > 1 + tol or w[0] < (1 - tol) / kappa:
        raise ConditionBoundViolated(
            f"spectrum of {name} is [{w[0]:.6g}, {w[-1]:.6g}], outside [1/{kappa:g}, 1]")


def _check_input(be: BlockEncoding, name: str):
    if abs(be.alpha - 1) > 1e-12:
        raise InvalidParams(f"U_{name} must be a scale-1 encoding")


def _power_poly(kind: str, c: float, delta: float, eps: float):
    if kind == POS_POWER:
        return approx_positive_power(c, delta, eps)
    return approx_negative_power(c, delta, eps)


def _ideal_power(X: np.ndarray, kind: str, c: float, delta: float) -> np.ndarray:
    """``f(X)/2`` for the target function of a power polynomial."""
    if kind == POS_POWER:
        return matrix_power(X, c) / 4
    return matrix_power(X / delta, -c) / 4


class _Chain:
    """Collects steps, degrees and the composed claimed error."""

    def __init__(self, fused: bool):
        self.fused = fused
        self.steps: list[Step] = []
        self.degrees: dict = {}
        self.ups: dict = {}

    def record(self, name: str, lemma: str, be: BlockEncoding) -> BlockEncoding:
        measured = None if self.fused or be.target is None else be.measured_error()
        self.steps.append(Step(name, lemma, be.alpha, be.a, be.eps_claimed, measured))
        return be

    def power(self, U: BlockEncoding, kind: str, c: float, delta: float, eps: float,
              key: str, name: str) -> BlockEncoding:
        poly = _power_poly(kind, c, delta, eps)
        self.degrees[key] = poly.degree
        out = qsvt(U, poly, delta=eps)
        ideal = None if U.target is None else _ideal_power(U.target, kind, c, delta)
        out = retarget(out, ideal, eps, label=name) if ideal is not None else replace(out, label=name)
        return self.record(name, "svt+" + ("poly-positive" if kind == POS_POWER else "poly-negative"), out)

    def up(self, U: BlockEncoding, eps: float, key: str, name: str) -> BlockEncoding:
        out = upscale(U, eps, label=name)
        self.ups[key] = math.ceil(config.UPSCALE_QUERY_CONSTANT * U.alpha * math.log(1 / eps))
        return self.record(name, "upscaling", out)


def _finish(kind: str, chain: _Chain, out: BlockEncoding, oracle: np.ndarray, eps: float,
            budget: dict, expected: tuple[float, int], theory: dict, params: dict,
            check: bool) -> PipelineReport:
    measured = be_mod.verify(out, oracle)
    chain_bound = out.eps_claimed
    if check and measured > eps:
        raise BudgetInfeasible(f"measured error {measured:.3e} exceeds requested {eps:.3e}")
    final = replace(out, eps_claimed=float(eps), target=oracle)
    return PipelineReport(kind, final, chain.steps, budget, dict(chain.degrees), dict(chain.ups),
                          theory, measured, chain_bound, oracle, expected, params)


# ----------------------------------------------------------- query structure

def query_structure(kind: str, d: dict, k: dict) -> dict:
    """Per-oracle query counts implied by the step chain.

    With the degrees and up-scaling multipliers of an actual run this equals
    the run's ledger exactly; with degree bounds it gives the theory formula.
    """
    if kind in (INVERSE, WEIGHTED_INVERSE):
        qa = 2 * d["d1"] * d["d2"] + 2 * d["d3"]
        return {"A": k["final"] * qa, "C": k["final"] * d["d2"]}
    if kind == WEIGHTED:
        qa_sub = k["sub"] * 2 * d["d1"] * d["d2"]
        qa = 2 * d["d0"] + qa_sub
        return {"A": k["final"] * qa, "C": k["final"] * k["sub"] * d["d2"]}
    if kind == CONJUGATED:
        return {"A": k["sub"] * 2 * d["d1"] * d["d2"], "C": k["sub"] * d["d2"]}
    if kind == RICCATI:
        qa = d["d3"] * (d["d1"] + 2 * d["d2"]) + 2 * d["d4"] + d["d1"]
        return {"A": k["final"] * qa, "B": k["final"] * (2 * d["d3"] + 1),
                "C": k["final"] * d["d3"]}
    raise InvalidParams(f"unknown pipeline kind {kind!r}")


def _budget(kind: str, eps: float, scale: float, kappa_A: float, kappa_C: float,
            amplify: float = 1.0) -> dict:
    e = eps / (scale / 2)
    k4 = kappa_A ** -2 * kappa_C ** -2 * e ** 4
    if kind in (INVERSE, WEIGHTED_INVERSE):
        raw = {"eps1": k4, "eps2": e ** 2, "eps3": e ** 2}
    elif kind == WEIGHTED:
        # the inner lemma is run at accuracy eps2 and splits it again
        raw = {"eps1": e ** 2, "eps2": e ** 2,
               "sub_eps1": kappa_A ** -2 * kappa_C ** -2 * e ** 8, "sub_eps2": e ** 4}
    elif kind == CONJUGATED:
        # the inner up-scaling multiplies the power step's error by ``amplify``
        raw = {"sub_eps1": k4, "sub_eps2": e ** 2 / amplify}
    else:
        raw = {"eps1": k4, "eps2": k4, "eps3": e ** 2, "eps4": e ** 2, "eps5": e ** 2}
    return {"normalized_eps": e, "formula": raw, "effective": {k: _clamp(v) for k, v in raw.items()}}


def _inverse_plan(p: float, kappa_A: float, kappa_C: float):
    """(kind, c, delta) of the power step and the block factor of the output."""
    delta = 2.0 ** -4 / (kappa_A * kappa_C)
    if p > 0:
        return POS_POWER, 1.0 / p, delta, 2.0 ** (-6 - 4 / p) / kappa_A
    return NEG_POWER, -1.0 / p, delta, 2.0 ** -6 / kappa_A * (kappa_A * kappa_C) ** (1 / p)


def theory_query_formula(kind: str, kappa_A: float, kappa_C: float, eps: float, p: float = 2.0,
                         K: float = config.DEGREE_CONSTANT) -> dict:
    """Query counts with every degree replaced by its pinned bound.

    The budgets, thresholds and up-scaling factors are those of the pipeline
    run, so a run's ledger never exceeds these numbers.
    """
    if kind == INVERSE:
        p = 2.0
    amplify = 1.0
    if kind == RICCATI:
        scale = 2 * kappa_A ** 1.5
    elif kind == WEIGHTED:
        scale = 2 * kappa_A ** (1 / p) * gamma_p(p, kappa_A, kappa_C)
    elif kind == CONJUGATED:
        scale = 2.0
        amplify = _weighted_plan(p, kappa_A, kappa_C)[3]
    else:
        scale = 2 * kappa_A * gamma_p(p, kappa_A, kappa_C)
    b = _budget(kind, eps, scale, kappa_A, kappa_C, amplify)["effective"]
    bound = lambda kd, c, delta, e: math.ceil(degree_bound(kd, c, delta, e, K))
    ups = lambda alpha, e: math.ceil(config.UPSCALE_QUERY_CONSTANT * alpha * math.log(1 / e))
    if kind in (INVERSE, WEIGHTED_INVERSE):
        pk, c, delta, factor = _inverse_plan(p, kappa_A, kappa_C)
        d = {"d1": bound(POS_POWER, 0.5, 1 / kappa_A, b["eps1"]),
             "d2": bound(pk, c, delta, b["eps2"]),
             "d3": bound(NEG_POWER, 0.5, 1 / kappa_A, b["eps3"])}
        k = {"final": ups(1 / (factor * kappa_A * gamma_p(p, kappa_A, kappa_C)), b["eps2"])}
    elif kind == WEIGHTED:
        pk, c, delta, alpha_sub = _weighted_plan(p, kappa_A, kappa_C)
        d = {"d0": bound(POS_POWER, 0.5, 1 / kappa_A, b["eps1"]),
             "d1": bound(NEG_POWER, 0.5, 1 / kappa_A, b["sub_eps1"]),
             "d2": bound(pk, c, delta, b["sub_eps2"])}
        k = {"sub": ups(alpha_sub, b["sub_eps2"]), "final": ups(2.0 ** 5, b["eps2"])}
    elif kind == CONJUGATED:
        pk, c, delta, alpha_sub = _weighted_plan(p, kappa_A, kappa_C)
        d = {"d1": bound(NEG_POWER, 0.5, 1 / kappa_A, b["sub_eps1"]),
             "d2": bound(pk, c, delta, b["sub_eps2"])}
        k = {"sub": ups(alpha_sub, b["sub_eps2"])}
    elif kind == RICCATI:
        d = {"d1": bound(NEG_POWER, 1.0, 1 / kappa_A, b["eps1"]),
             "d2": bound(POS_POWER, 0.5, 1 / kappa_A, b["eps2"]),
             "d3": bound(POS_POWER, 0.5, 2.0 ** -7 / (kappa_A ** 2 * kappa_C), b["eps3"]),
             "d4": bound(NEG_POWER, 0.5, 1 / kappa_A, b["eps4"])}
        k = {"final": ups(2.0 ** 10.5, b["eps5"])}
    else:
        raise InvalidParams(f"unknown pipeline kind {kind!r}")
    return query_structure(kind, d, k)


# ----------------------------------------------------------------- pipelines

def be_weighted_inverse(U_A: BlockEncoding, U_C: BlockEncoding, p: float, eps: float,
                        kappa_A: float, kappa_C: float, strict: bool = True,
                        fused: bool = False, check: bool = True,
                        _kind: str = WEIGHTED_INVERSE) -> PipelineReport:
    """(2 kappa_A gamma_p, 5a+11, eps)-encoding of ``Y = A^{-1} #_{1/p} C``."""
    _check_p(p)
    _check_input(U_A, "A")
    _check_input(U_C, "C")
    if strict:
        _check_promise(U_A, kappa_A, "A")
        _check_promise(U_C, kappa_C, "C")
    a = max(U_A.a, U_C.a)
    g = gamma_p(p, kappa_A, kappa_C)
    scale = 2 * kappa_A * g
    budget = _budget(_kind, eps, scale, kappa_A, kappa_C)
    b = budget["effective"]
    ch = _Chain(fused)
    pk, c, delta, factor = _inverse_plan(p, kappa_A, kappa_C)

    sqA = ch.power(U_A, POS_POWER, 0.5, 1 / kappa_A, b["eps1"], "d1", "A^{1/2}/4")
    V = ch.record("2^-4 A^{1/2} C A^{1/2}", "product",
                  product(product(sqA, U_C), sqA, label="2^-4 V"))
    Vp = ch.power(V, pk, c, delta, b["eps2"], "d2", "power(2^-4 V)/4")
    isqA = ch.power(U_A, NEG_POWER, 0.5, 1 / kappa_A, b["eps3"], "d3", "(kA A)^{-1/2}/4")
    Yb = ch.record("block of kA^-1 gamma^-1 Y", "product",
                   product(product(isqA, Vp), isqA, label="scaled Y"))
    # block = factor * Y, read as an encoding of kappa_A^-1 gamma_p^-1 Y
    Yn = _rescale(Yb, 1 / (factor * kappa_A * g))
    out = ch.up(Yn, b["eps2"], "final", "kA^-1 gamma^-1 Y")
    out = _rescale(out, kappa_A * g, label=f"Y[{_kind}]")

    A = U_A.target
    C = U_C.target
    oracle = geodesic_point(inverse(A), C, 1 / p)
    theory = theory_query_formula(_kind, kappa_A, kappa_C, eps, p)
    return _finish(_kind, ch, out, oracle, eps, budget, (scale, 5 * a + 11), theory,
                   {"p": p, "eps": eps, "kappa_A": kappa_A, "kappa_C": kappa_C, "a": a,
                    "gamma_p": g}, check)


def be_inverse_geomean(U_A: BlockEncoding, U_C: BlockEncoding, eps: float, kappa_A: float,
                       kappa_C: float, **kw) -> PipelineReport:
    """(2 kappa_A, 5a+11, eps)-encoding of the solution ``A^{-1} # C`` of ``YAY = C``."""
    return be_weighted_inverse(U_A, U_C, 2.0, eps, kappa_A, kappa_C, _kind=INVERSE, **kw)


def _weighted_plan(p: float, kappa_A: float, kappa_C: float):
    """(kind, c, delta) of the inner power step and its up-scaling factor."""
    delta = 2.0 ** -4 / (kappa_A * kappa_C)
    if p > 0:
        return POS_POWER, 1.0 / p, delta, 2.0 ** (2 + 4 / p)
    return NEG_POWER, -1.0 / p, delta, 4.0


def _conjugated_steps(ch: _Chain, U_A: BlockEncoding, U_C: BlockEncoding, p: float,
                      kappa_A: float, kappa_C: float, eps1: float, eps2: float) -> BlockEncoding:
    """Scale-2 encoding of ``kappa_A^{-1/p} gamma_p^{-1} (A^{-1/2} C A^{-1/2})^{1/p}``."""
    pk, c, delta, alpha_sub = _weighted_plan(p, kappa_A, kappa_C)
    isqA = ch.power(U_A, NEG_POWER, 0.5, 1 / kappa_A, eps1, "d1", "(kA A)^{-1/2}/4")
    W = ch.record("2^-4 kA^-1 A^{-1/2} C A^{-1/2}", "product",
                  product(product(isqA, U_C), isqA, label="2^-4 kA^-1 W"))
    Wp = ch.power(W, pk, c, delta, eps2, "d2", "power(2^-4 kA^-1 W)/4")
    return ch.up(_rescale(Wp, alpha_sub), eps2, "sub", "kA^{-1/p} gamma^-1 W^{1/p}")


def be_conjugated_power(U_A: BlockEncoding, U_C: BlockEncoding, p: float, eps: float,
                        kappa_A: float, kappa_C: float, strict: bool = True,
                        fused: bool = False, check: bool = True) -> PipelineReport:
    """(2, 3a+7, eps)-encoding of ``kappa_A^{-1/p} gamma_p^{-1} (A^{-1/2} C A^{-1/2})^{1/p}``.

    Unlike the full pipelines this also accepts ``1/2 <= p < 1``, i.e. exponents
    in (1, 2], which the quasi-entropy estimator needs for alpha > 1.
    """
    if p == 0 or 0 < p < 1 / MAX_POSITIVE_EXPONENT:
        raise InvalidParams(f"exponent 1/p needs p >= 1/2 or p < 0, got p={p}")
    _check_input(U_A, "A")
    _check_input(U_C, "C")
    if strict:
        _check_promise(U_A, kappa_A, "A")
        _check_promise(U_C, kappa_C, "C")
    a = max(U_A.a, U_C.a)
    g = gamma_p(p, kappa_A, kappa_C)
    budget = _budget(CONJUGATED, eps, 2.0, kappa_A, kappa_C, _weighted_plan(p, kappa_A, kappa_C)[3])
    b = budget["effective"]
    ch = _Chain(fused)
    out = _conjugated_steps(ch, U_A, U_C, p, kappa_A, kappa_C, b["sub_eps1"], b["sub_eps2"])

    A, C = U_A.target, U_C.target
    isq = matrix_power(A, -0.5)
    W = isq @ C @ isq
    oracle = kappa_A ** (-1 / p) / g * matrix_power((W + W.conj().T) / 2, 1 / p)
    theory = theory_query_formula(CONJUGATED, kappa_A, kappa_C, eps, p)
    return _finish(CONJUGATED, ch, replace(out, label="Z[conjugated_power]"), oracle, eps,
                   budget, (2.0, 3 * a + 7), theory,
                   {"p": p, "eps": eps, "kappa_A": kappa_A, "kappa_C": kappa_C, "a": a,
                    "gamma_p": g}, check)


def be_weighted_geomean(U_A: BlockEncoding, U_C: BlockEncoding, p: float, eps: float,
                        kappa_A: float, kappa_C: float, strict: bool = True,
                        fused: bool = False, check: bool = True) -> PipelineReport:
    """(2 kappa_A^{1/p} gamma_p, 5a+12, eps)-encoding of ``Y = A #_{1/p} C``."""
    _check_p(p)
    _check_input(U_A, "A")
    _check_input(U_C, "C")
    if strict:
        _check_promise(U_A, kappa_A, "A")
        _check_promise(U_C, kappa_C, "C")
    a = max(U_A.a, U_C.a)
    g = gamma_p(p, kappa_A, kappa_C)
    scale = 2 * kappa_A ** (1 / p) * g
    budget = _budget(WEIGHTED, eps, scale, kappa_A, kappa_C)
    b = budget["effective"]
    ch = _Chain(fused)
    pk, c, delta, alpha_sub = _weighted_plan(p, kappa_A, kappa_C)

    sub = _conjugated_steps(ch, U_A, U_C, p, kappa_A, kappa_C, b["sub_eps1"], b["sub_eps2"])

    sqA = ch.power(U_A, POS_POWER, 0.5, 1 / kappa_A, b["eps1"], "d0", "A^{1/2}/4")
    Yb = ch.record("2^-4 kA^{-1/p} gamma^-1 Y", "product",
                   product(product(sqA, sub), sqA, label="2^-4 scaled Y"))
    out = ch.up(_rescale(Yb, 2.0 ** 4), b["eps2"], "final", "kA^{-1/p} gamma^-1 Y")
    out = _rescale(out, kappa_A ** (1 / p) * g, label="Y[weighted_geomean]")

    oracle = geodesic_point(U_A.target, U_C.target, 1 / p)
    theory = theory_query_formula(WEIGHTED, kappa_A, kappa_C, eps, p)
    return _finish(WEIGHTED, ch, out, oracle, eps, budget, (scale, 5 * a + 12), theory,
                   {"p": p, "eps": eps, "kappa_A": kappa_A, "kappa_C": kappa_C, "a": a,
                    "gamma_p": g}, check)


def riccati_realizable(A: np.ndarray, B: np.ndarray, C: np.ndarray, kappa_A: float) -> float:
    """``||kappa_A^{-3/2} Y|| / 2``; the scale-2 output needs this to be <= 1."""
    from .riccati import solve_riccati_general

    y = solve_riccati_general(A, B, C).y_plus
    return float(np.linalg.norm(y, 2) / (2 * kappa_A ** 1.5))


def be_riccati_general(U_A: BlockEncoding, U_B: BlockEncoding, U_C: BlockEncoding, eps: float,
                       kappa_A: float, kappa_C: float, strict: bool = True,
                       fused: bool = False, check: bool = True) -> PipelineReport:
    """(2 kappa_A^{3/2}, b, eps)-encoding of ``A^{-1} # (B^dag A^{-1} B + C) + A^{-1} B``.

    ``b`` is the recorded logical ancilla count: ``7a + 13`` plus the two
    prepare registers of the linear combinations.
    """
    from .riccati import PRECONDITION_RTOL

    for U, nm in ((U_A, "A"), (U_B, "B"), (U_C, "C")):
        _check_input(U, nm)
        if U.target is None:
            raise InvalidParams(f"U_{nm} needs an attached target")
    if strict:
        _check_promise(U_A, kappa_A, "A")
        _check_promise(U_C, kappa_C, "C")
    A, B, C = U_A.target, U_B.target, U_C.target
    if np.linalg.norm(B, 2) > 1 + 1e-9:
        raise NormTooLarge("||B|| must be at most 1")
    shift = inverse(A) @ B
    if np.linalg.norm(shift - shift.conj().T, 2) > PRECONDITION_RTOL * max(1.0, np.linalg.norm(shift, 2)):
        raise PreconditionViolated("A^{-1} B is not Hermitian")
    ratio = riccati_realizable(A, B, C, kappa_A)
    if ratio > 1 + 1e-9:
        raise NormTooLarge(f"||kappa_A^(-3/2) Y||/2 = {ratio:.4g} > 1: no scale-2 encoding exists")

    a = max(U_A.a, U_B.a, U_C.a)
    scale = 2 * kappa_A ** 1.5
    budget = _budget(RICCATI, eps, scale, kappa_A, kappa_C)
    b = budget["effective"]
    ch = _Chain(fused)

    inv = ch.power(U_A, NEG_POWER, 1.0, 1 / kappa_A, b["eps1"], "d1", "(kA A)^{-1}/4")
    BAB = ch.record("2^-2 kA^-1 B^dag A^-1 B", "product",
                    product(product(adjoint(U_B), inv), U_B, label="2^-2 kA^-1 B^dag A^-1 B"))
    D = ch.record("2^-3 kA^-1 D", "LCU",
                  linear_combine([1.0, 2.0 ** -2 / kappa_A], [BAB, U_C], b["eps1"], beta=2.0,
                                 label="2^-3 kA^-1 D"))
    sqA = ch.power(U_A, POS_POWER, 0.5, 1 / kappa_A, b["eps2"], "d2", "A^{1/2}/4")
    E = ch.record("2^-7 kA^-1 E", "product",
                  product(product(sqA, D), sqA, label="2^-7 kA^-1 E"))
    delta6 = 2.0 ** -7 / (kappa_A ** 2 * kappa_C)
    Eh = ch.power(E, POS_POWER, 0.5, delta6, b["eps3"], "d3", "2^-5.5 kA^-1/2 E^{1/2}")
    isqA = ch.power(U_A, NEG_POWER, 0.5, 1 / kappa_A, b["eps4"], "d4", "(kA A)^{-1/2}/4")
    G = ch.record("2^-9.5 kA^-3/2 A^-1 # D", "product",
                  product(product(isqA, Eh), isqA, label="2^-9.5 kA^-3/2 A^-1#D"))
    AB = ch.record("2^-2 kA^-1 A^-1 B", "product", product(inv, U_B, label="2^-2 kA^-1 A^-1 B"))
    S = ch.record("2^-10.5 kA^-3/2 Y", "LCU",
                  linear_combine([1.0, 2.0 ** -7.5 / math.sqrt(kappa_A)], [G, AB], b["eps5"],
                                 beta=2.0, label="2^-10.5 kA^-3/2 Y"))
    out = ch.up(_rescale(S, 2.0 ** 10.5), b["eps5"], "final", "kA^-3/2 Y")
    out = _rescale(out, kappa_A ** 1.5, label="Y[riccati_general]")

    Dm = B.conj().T @ inverse(A) @ B + C
    oracle = geodesic_point(inverse(A), (Dm + Dm.conj().T) / 2, 0.5) + shift
    theory = theory_query_formula(RICCATI, kappa_A, kappa_C, eps)
    return _finish(RICCATI, ch, out, oracle, eps, budget, (scale, out.a), theory,
                   {"eps": eps, "kappa_A": kappa_A, "kappa_C": kappa_C, "a": a,
                    "b": out.a, "b_formula": "7a+13+ceil(log2 3)+ceil(log2(1/eps1))+ceil(log2 3)+ceil(log2(1/eps5))"},
                   check)


def riccati_ancillas(a: int, eps1: float, eps5: float) -> int:
    """Logical ancillas of the Riccati pipeline for the given LCU accuracies."""
    lcu = lambda e: 2 + math.ceil(math.log2(1 / e))    # 3 terms with padding -> 2 qubits
    return 7 * a + 13 + lcu(eps1) + lcu(eps5)
