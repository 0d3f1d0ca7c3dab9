"""Promised instances of the geometric-mean decision problem and their solvers.

An instance is a pair of sparse matrices ``I/kappa <= A, C <= I``. With
``Y = A^{-1} # C`` and ``psi = Y^2 |0> / ||Y^2 |0>||`` the question is whether
the first qubit of ``psi`` reads 0 with probability at least 2/3 (yes) or at
most 1/3 (no). Taking ``C = I`` turns any linear-system instance into one of
these, because then ``Y^2 = A^{-1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math
from typing import Callable

import numpy as np

from . import config
from .blockenc import from_sparse, product
from .errors import GenerationFailed, InvalidParams, PostSelectionStarved, PromiseViolated, SchemaError
from .geomean_pipeline import be_inverse_geomean
from .riccati import solve_yayc

YES, NO, UNKNOWN = "yes", "no", "unknown"
SPECTRUM_TOL = 1e-9
SHOTS_PER_REPEAT = 116          # Hoeffding: precision 0.1 with failure <= 0.2 per repeat
FAMILIES = ("diagonal", "paired", "crossed", "banded")


@dataclass(frozen=True, eq=False)
class MgmInstance:
    n: int
    A: np.ndarray
    C: np.ndarray
    kappa_A: float
    kappa_C: float
    seed: int | None = None
    promise_label: str = UNKNOWN
    family: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return 1 << self.n

    def sparsity(self) -> tuple[int, int]:
        s = lambda M: int(max(1, (np.abs(M) > 0).sum(axis=1).max()))
        return s(self.A), s(self.C)

    def row_query(self, which: str) -> Callable[[int], list[tuple[int, complex]]]:
        """Positions and values of the nonzeros in row ``j`` of ``A`` or ``C``."""
        M = {"A": self.A, "C": self.C}[which]

        def query(j: int):
            cols = np.nonzero(M[j])[0]
            return [(int(k), complex(M[j, k])) for k in cols]

        return query

    def to_dict(self) -> dict:
        def rows(M):
            return [[{"col": int(k), "re": float(M[j, k].real), "im": float(np.imag(M[j, k]))}
                     for k in np.nonzero(M[j])[0]] for j in range(M.shape[0])]

        return {"schema_version": config.SCHEMA_VERSION, "n": self.n,
                "A": {"rows": rows(self.A)}, "C": {"rows": rows(self.C)},
                "kappa_A": self.kappa_A, "kappa_C": self.kappa_C, "seed": self.seed,
                "promise_label": self.promise_label, "family": self.family}

    @classmethod
    def from_dict(cls, obj: dict) -> "MgmInstance":
        try:
            n = int(obj["n"])
            N = 1 << n

            def dense(packed):
                M = np.zeros((N, N), dtype=complex)
                for j, row in enumerate(packed["rows"]):
                    for e in row:
                        M[j, int(e["col"])] = e["re"] + 1j * e.get("im", 0.0)
                return M.real if not np.any(M.imag) else M

            return cls(n, dense(obj["A"]), dense(obj["C"]), float(obj["kappa_A"]),
                       float(obj["kappa_C"]), obj.get("seed"), obj.get("promise_label", UNKNOWN),
                       obj.get("family", ""))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise SchemaError(f"bad instance object: {exc}") from exc


def _label(value: float) -> str:
    if value >= 2 / 3:
        return YES
    if value <= 1 / 3:
        return NO
    return UNKNOWN


def check_promises(inst: MgmInstance):
    for M, k, nm in ((inst.A, inst.kappa_A, "A"), (inst.C, inst.kappa_C, "C")):
        if M.shape != (inst.N, inst.N):
            raise PromiseViolated(f"{nm} has shape {M.shape}, expected {(inst.N, inst.N)}")
        if np.linalg.norm(M - M.conj().T, 2) > SPECTRUM_TOL:
            raise PromiseViolated(f"{nm} is not Hermitian")
        w = np.linalg.eigvalsh(M)
        if w[0] < (1 - SPECTRUM_TOL) / k or w[-1] > 1 + SPECTRUM_TOL:
            raise PromiseViolated(f"spectrum of {nm} is [{w[0]:.6g}, {w[-1]:.6g}], outside [1/{k:g}, 1]")


def first_qubit_zero(vec: np.ndarray) -> float:
    """Probability that the most significant qubit of a unit vector reads 0."""
    half = len(vec) // 2
    return float(np.sum(np.abs(vec[:half]) ** 2) / np.sum(np.abs(vec) ** 2))


def solve_exact(inst: MgmInstance) -> float:
    """``<psi|M|psi>`` with ``psi`` proportional to ``Y^2 |0>``."""
    check_promises(inst)
    Y = solve_yayc(inst.A, inst.C)
    return first_qubit_zero(Y @ Y[:, 0])


# --------------------------------------------------------------- generation

def _spectrum_draw(rng, k: float, m: int) -> np.ndarray:
    # half the eigenvalues sit at the ends of the window to reach the full condition number
    w = rng.uniform(1 / k, 1, m)
    ends = rng.random(m) < 0.5
    w[ends] = rng.choice([1 / k, 1.0], ends.sum())
    return w


def _family_matrix(family: str, N: int, k: float, rng) -> np.ndarray:
    if family == "diagonal":
        return np.diag(_spectrum_draw(rng, k, N))
    if family in ("paired", "crossed"):
        # 2x2 rotations on a perfect matching: two nonzeros per row. The crossed
        # matching pairs i with i + N/2, which moves weight across the first qubit.
        if family == "crossed":
            pairs = np.stack([np.arange(N // 2), np.arange(N // 2) + N // 2], axis=1)
        else:
            pairs = rng.permutation(N).reshape(-1, 2)
        M = np.zeros((N, N))
        for i, j in pairs:
            w = _spectrum_draw(rng, k, 2)
            th = rng.uniform(0, np.pi)
            R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
            B = R @ np.diag(w) @ R.T
            idx = np.array([i, j])
            M[np.ix_(idx, idx)] = B
        return M
    if family == "banded":
        # permuted tridiagonal, spectrum mapped affinely onto [1/k, 1]
        H = np.diag(rng.normal(size=N)) + np.diag(rng.normal(size=N - 1), 1)
        H = H + np.triu(H, 1).T
        w = np.linalg.eigvalsh(H)
        lo, hi = w[0], w[-1]
        M = 1 / k * np.eye(N) + (1 - 1 / k) * (H - lo * np.eye(N)) / (hi - lo)
        p = rng.permutation(N)
        return M[np.ix_(p, p)]
    raise InvalidParams(f"unknown family {family!r}")


def gen_instance(n: int, kappa_A: float, kappa_C: float, seed: int = 0,
                 target_label: str = YES, max_attempts: int = 5000) -> MgmInstance:
    """Rejection-sample structured sparse instances until the value meets the label.

    A no-instance needs ``kappa_A * kappa_C`` of roughly 10 or more, since a
    matrix with condition number ``k`` cannot rotate ``|0>`` further than
    ``cos^2 = 4k/(1+k)^2`` away from itself.
    """
    if n < 1:
        raise InvalidParams("n must be at least 1")
    if target_label not in (YES, NO, UNKNOWN):
        raise InvalidParams(f"label must be yes, no or unknown, got {target_label!r}")
    if min(kappa_A, kappa_C) < 1:
        raise InvalidParams("condition bounds must be >= 1")
    rng = np.random.default_rng(seed)
    N = 1 << n
    for attempt in range(max_attempts):
        fa, fc = rng.choice(FAMILIES, 2)
        A = _family_matrix(fa, N, kappa_A, rng)
        C = _family_matrix(fc, N, kappa_C, rng)
        A[np.abs(A) < 1e-15] = 0.0
        C[np.abs(C) < 1e-15] = 0.0
        inst = MgmInstance(n, A, C, float(kappa_A), float(kappa_C), seed, UNKNOWN, f"{fa}/{fc}")
        value = solve_exact(inst)
        label = _label(value)
        if target_label == UNKNOWN or label == target_label:
            return replace(inst, promise_label=label,
                           meta={"value": value, "attempts": attempt + 1})
    raise GenerationFailed(f"no {target_label} instance after {max_attempts} attempts "
                           f"(n={n}, kappas={kappa_A:g},{kappa_C:g})")


def reduce_qlsp(A_qlsp, kappa: float | None = None, seed: int | None = None) -> MgmInstance:
    """Instance with ``C = I`` whose state equals the normalized ``A^{-1}|0>``."""
    A = np.asarray(A_qlsp)
    N = A.shape[0]
    n = int(round(math.log2(N)))
    if 1 << n != N or A.shape != (N, N):
        raise PromiseViolated(f"matrix of shape {A.shape} is not 2^n x 2^n")
    if kappa is None:
        w = np.linalg.eigvalsh((A + A.conj().T) / 2)
        kappa = float(1 / w[0]) if w[0] > 0 else math.inf
    inst = MgmInstance(n, A, np.eye(N), float(kappa), 1.0, seed, UNKNOWN, "qlsp")
    check_promises(inst)
    return replace(inst, promise_label=_label(solve_exact(inst)))


def qlsp_value(A) -> float:
    """First-qubit statistic of ``A^{-1}|0>`` computed by a direct solve."""
    A = np.asarray(A)
    e0 = np.zeros(A.shape[0])
    e0[0] = 1
    return first_qubit_zero(np.linalg.solve(A, e0))


# ----------------------------------------------------------- pipeline solver

def postselect_floor(kappa_A: float, kappa_C: float) -> float:
    """Smallest ancilla-0 probability a correct run can produce.

    ``c kappa_A^-6 kappa_C^-2`` with ``c`` pinned, times 1/16 because the
    squared block comes from a scale-2 encoding. The provable lower bound
    ``kappa_A^-4 kappa_C^-2 / 16`` stays above it whenever ``c <= kappa_A^2``.
    """
    return config.POSTSELECT_FLOOR_CONSTANT * kappa_A ** -6 * kappa_C ** -2 / 16


def default_delta(kappa_A: float, kappa_C: float, target_gap: float = 0.05) -> float:
    """Encoding accuracy that keeps ``|p_Z - p_Y| <= target_gap`` by :func:`gap_bound`."""
    return target_gap / (16 * kappa_A * kappa_C)


def gap_bound(delta: float, kappa_A: float, kappa_C: float) -> float:
    """Bound on ``|p_Z - p_Y|`` from an encoding of ``Y`` accurate to ``delta``.

    ``||Z - Y^2/(4 kA^2)|| <= delta/kA`` and ``||Y^2|0>|| / (4 kA^2) >= 1/(4 kA^2 kC)``
    bound the distance of the normalized states by ``8 delta kA kC``, and the
    probabilities differ by at most twice that.
    """
    return 16 * delta * kappa_A * kappa_C


def solve_pipeline(inst: MgmInstance, delta: float | None = None, rng=None,
                   repeats: int = config.BQP_REPEATS, shots: int = SHOTS_PER_REPEAT,
                   sparse_eps: float = 1e-12) -> dict:
    """Decide the instance with the block-encoding pipeline and simulated measurements.

    Sparse access gives scale-``s`` encodings of ``A`` and ``C``; read at
    scale 1 they encode ``A/s`` and ``C/s``, whose geometric mean is still
    ``Y`` but whose condition bounds grow by ``s``.
    """
    check_promises(inst)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    sA, sC = inst.sparsity()
    UA = from_sparse(inst.A, sA, sparse_eps, label="O_A")
    UC = from_sparse(inst.C, sC, sparse_eps, label="O_C")
    UA = replace(UA, alpha=1.0, eps_claimed=UA.eps_claimed / sA, target=inst.A / sA)
    UC = replace(UC, alpha=1.0, eps_claimed=UC.eps_claimed / sC, target=inst.C / sC)
    kA, kC = sA * inst.kappa_A, sC * inst.kappa_C
    delta = default_delta(kA, kC) if delta is None else float(delta)
    rep = be_inverse_geomean(UA, UC, delta, kA, kC)
    sq = product(rep.output, rep.output, label="Y^2")

    N = inst.N
    z0 = sq.block[:, 0]                      # ancillas 0, system |0>
    p_post = float(np.sum(np.abs(z0) ** 2))
    floor = postselect_floor(kA, kC)
    if p_post < floor:
        raise PostSelectionStarved(f"ancilla-0 probability {p_post:.3e} below floor {floor:.3e}")
    p_Z = first_qubit_zero(z0)
    p_Y = solve_exact(inst)

    ests = rng.binomial(shots, p_Z, size=repeats) / shots
    votes = int(np.sum(ests >= 0.5))
    decision = YES if votes > repeats // 2 else NO
    attempts = int(np.sum(rng.geometric(p_post, size=repeats * shots)))
    ledger = sq.ledger.scaled(attempts)
    return {
        "decision": decision,
        "p_estimate": float(np.mean(ests)),
        "repeats": repeats,
        "shots_per_repeat": shots,
        "votes_yes": votes,
        "p_Z": p_Z,
        "p_Y": p_Y,
        "gap": abs(p_Z - p_Y),
        "gap_bound": gap_bound(delta, kA, kC),
        "postselect_probability": p_post,
        "postselect_floor": floor,
        "postselect_attempts": attempts,
        "delta": delta,
        "kappas_encoded": [kA, kC],
        "sparsity": [sA, sC],
        "pipeline_error": rep.measured_error_vs_oracle,
        "resources": ledger.to_dict(),
        "dimension": N,
    }
