"""Dense simulator for block encodings.

A unitary ``U`` on ``a + n`` qubits block-encodes ``A`` with scale ``alpha``
when ``alpha * <0|_a U |0>_a`` approximates ``A``. Ancilla qubits are the most
significant ones, so the encoded block is simply ``U[:N, :N]``.

Every :class:`BlockEncoding` carries two ancilla counts. ``a`` is the logical
count implied by the lemma tuples (what a real circuit would use); the stored
``unitary`` is a physical realization that is usually much narrower. Base
constructors build the true circuits. Combinators first compact their operands
to one-ancilla dilations, compose them physically, and compact the result
again, so the dense simulation stays small while the logical bookkeeping
follows the lemmas exactly.

Polynomial transformations and up-scaling are simulated semantically: the
transform is applied exactly to the encoded block and re-dilated, while the
lemma's query, gate and error costs are charged.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np
from scipy.linalg import null_space

from . import config
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    EntryTooLarge,
    InvalidParams,
    NonHermitian,
    NormTooLarge,
    NotUnitary,
    PolyUnbounded,
    ScaleNotOne,
    SparsityViolated,
    WeightNormExceeded,
)
from .polyapprox import ChebyshevPoly, evaluate_many


@dataclass(frozen=True)
class ResourceLedger:
    """Query counts per base oracle plus coarse gate/ancilla/time tallies.

    A query counts any use of U, U^dag or their controlled versions.
    """

    queries: dict = field(default_factory=dict)
    gate_estimate: int = 0
    ancillas_peak: int = 0
    classical_time_proxy: int = 0

    def scaled(self, k: int) -> "ResourceLedger":
        return ResourceLedger({o: q * k for o, q in self.queries.items()},
                              self.gate_estimate * k, self.ancillas_peak,
                              self.classical_time_proxy)

    def __add__(self, other: "ResourceLedger") -> "ResourceLedger":
        q = dict(self.queries)
        for o, v in other.queries.items():
            q[o] = q.get(o, 0) + v
        return ResourceLedger(q, self.gate_estimate + other.gate_estimate,
                              max(self.ancillas_peak, other.ancillas_peak),
                              self.classical_time_proxy + other.classical_time_proxy)

    def with_extra(self, gates: int = 0, ancillas: int = 0, classical: int = 0) -> "ResourceLedger":
        return ResourceLedger(dict(self.queries), self.gate_estimate + int(gates),
                              max(self.ancillas_peak, int(ancillas)),
                              self.classical_time_proxy + int(classical))

    def total_queries(self) -> int:
        return sum(self.queries.values())

    def to_dict(self) -> dict:
        return {"queries": dict(sorted(self.queries.items())),
                "gate_estimate": self.gate_estimate,
                "ancillas_peak": self.ancillas_peak,
                "classical_time_proxy": self.classical_time_proxy}


@dataclass(frozen=True, eq=False)
class BlockEncoding:
    unitary: np.ndarray
    n: int
    a: int
    alpha: float
    eps_claimed: float
    ledger: ResourceLedger
    label: str = ""
    target: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def phys_a(self) -> int:
        return int(round(math.log2(self.unitary.shape[0]))) - self.n

    @property
    def block(self) -> np.ndarray:
        N = self.dim
        return self.unitary[:N, :N]

    def decoded(self) -> np.ndarray:
        """``alpha * <0|U|0>``, the operator this encoding stands for."""
        return self.alpha * self.block

    def measured_error(self, target=None) -> float:
        target = self.target if target is None else target
        if target is None:
            raise InvalidParams("no target attached")
        return verify(self, target)

    def tuple(self) -> tuple[float, int, float]:
        return (self.alpha, self.a, self.eps_claimed)

    def to_dict(self, include_unitary: bool = True) -> dict:
        from .io import matrix_to_json

        out = {"label": self.label, "n": self.n, "a": self.a, "physical_ancillas": self.phys_a,
               "alpha": self.alpha, "eps_claimed": self.eps_claimed,
               "ledger": self.ledger.to_dict()}
        if include_unitary:
            out["unitary"] = matrix_to_json(self.unitary)
        if self.target is not None:
            out["measured_error"] = self.measured_error()
        return out


# ------------------------------------------------------------------ helpers

def _nqubits(dim: int) -> int:
    k = int(round(math.log2(dim)))
    if 1 << k != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two")
    return k


def _check_size(nq: int):
    if nq > config.MAX_QUBITS:
        raise DimensionTooLarge(f"{nq} qubits exceeds the dense simulation cap {config.MAX_QUBITS}")


def check_unitary(U: np.ndarray, tol: float = config.UNITARY_TOL):
    dev = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2)
    if dev > tol:
        raise NotUnitary(f"||U^dag U - I|| = {dev:.3e}")


def on_qubits(U: np.ndarray, targets: list[int], nq: int) -> np.ndarray:
    """Embed ``U`` acting on ``targets`` (in its own qubit order) into ``nq`` qubits."""
    k = len(targets)
    rest = [q for q in range(nq) if q not in targets]
    order = list(targets) + rest
    full = np.kron(U, np.eye(1 << (nq - k))).reshape([2] * (2 * nq))
    axes = list(np.argsort(order))
    return full.transpose(axes + [nq + x for x in axes]).reshape(1 << nq, 1 << nq)


def dilation(M: np.ndarray) -> np.ndarray:
    """One-ancilla unitary with top-left block ``M`` for any contraction ``M``."""
    W, s, Vh = np.linalg.svd(M)
    if s[0] > 1 + config.NORM_SLACK:
        raise NormTooLarge(f"||M|| = {s[0]:.6g} > 1 cannot be a unitary block")
    s = np.minimum(s, 1.0)
    c = np.sqrt(1 - s ** 2)
    left = (W * c) @ W.conj().T          # sqrt(I - M M^dag)
    right = (Vh.conj().T * c) @ Vh       # sqrt(I - M^dag M)
    return np.block([[M, left], [right, -M.conj().T]])


def _merge_label(*parts: str) -> str:
    return "(" + " * ".join(p or "?" for p in parts) + ")"


# -------------------------------------------------------------- constructors

def verify(be: BlockEncoding, target) -> float:
    """Operator-norm error ``||target - alpha <0|U|0>||``."""
    T = np.asarray(getattr(target, "data", target))
    if T.ndim == 0:
        T = T.reshape(1, 1)
    if T.shape != (be.dim, be.dim):
        raise DimensionMismatch(f"target shape {T.shape} vs block dim {be.dim}")
    return float(np.linalg.norm(T - be.decoded(), 2))


def from_unitary(U: np.ndarray, n: int, alpha: float = 1.0, label: str = "U",
                 target=None, eps_claimed: float = 0.0, a: int | None = None) -> BlockEncoding:
    U = np.asarray(U, dtype=complex)
    nq = _nqubits(U.shape[0])
    _check_size(nq)
    check_unitary(U)
    phys = nq - n
    if phys < 0:
        raise DimensionMismatch("unitary smaller than the system register")
    ledger = ResourceLedger({label: 1}, 0, phys)
    return BlockEncoding(U, n, phys if a is None else a, float(alpha), float(eps_claimed),
                         ledger, label, None if target is None else np.asarray(target))


def from_dilation(A, label: str = "A", hermitian: bool = True) -> BlockEncoding:
    """Exact (1, 1, 0)-encoding ``[[A, sqrt(I-AA^dag)], [sqrt(I-A^dag A), -A^dag]]``.

    For Hermitian ``A`` this is ``[[A, sqrt(I-A^2)], [sqrt(I-A^2), -A]]``.
    ``hermitian=False`` accepts any contraction, e.g. the linear term of a
    Riccati equation.
    """
    from .linalg_core import as_hermitian

    M = as_hermitian(A) if hermitian else np.asarray(getattr(A, "data", A))
    if M.ndim == 0:
        M = M.reshape(1, 1)
    n = _nqubits(M.shape[0])
    _check_size(n + 1)
    if np.linalg.norm(M, 2) > 1 + config.NORM_SLACK:
        raise NormTooLarge(f"||A|| = {np.linalg.norm(M, 2):.6g} exceeds 1")
    U = dilation(M.astype(complex))
    return BlockEncoding(U, n, 1, 1.0, 0.0, ResourceLedger({label: 1}, 0, 1), label, M.copy())


def _round_entry(z: complex, bits: int | None) -> complex:
    if bits is None:
        return z
    r, phi = abs(z), np.angle(z)
    step = 2.0 ** -bits
    r = min(round(r / step) * step, 1.0)
    phi = round(phi / (2 * np.pi * step)) * 2 * np.pi * step
    return r * np.exp(1j * phi)


def from_sparse(A, s: int, eps: float = 0.0, label: str = "A") -> BlockEncoding:
    """(s, n+3, eps)-encoding from row and column sparse access.

    Two state preparations are built explicitly,

    ``|0>|i> -> s^{-1/2} sum_k |k>_anc |i>_sys (sqrt|A_ik| |00> + sqrt(1-|A_ik|) |01>)``
    ``|0>|j> -> s^{-1/2} sum_l |j>_anc |l>_sys (sqrt|A_lj| e^{i phi_lj} |00> + sqrt(1-|A_lj|) |10>)``

    and ``U = U_L^dag U_R`` on [idle, flag(2), anc(n), sys(n)]. Rows and
    columns with fewer than ``s`` nonzeros are padded with zero entries, and
    entries are rounded to ``ceil(log2(4s/eps))`` bits so that the block is
    within ``eps`` of ``A/s``.
    """
    M = np.asarray(getattr(A, "data", A), dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch("sparse input must be square")
    N = M.shape[0]
    n = _nqubits(N)
    _check_size(2 * n + 3)
    s = int(s)
    nz = M != 0
    if s < 1 or nz.sum(axis=1).max() > s or nz.sum(axis=0).max() > s:
        raise SparsityViolated(f"matrix has a row or column with more than {s} nonzeros")
    if s > N:
        raise SparsityViolated(f"sparsity {s} exceeds dimension {N}")
    if np.abs(M).max() > 1 + 1e-12:
        raise EntryTooLarge("entries must satisfy |A_jk| <= 1")
    bits = None if eps <= 0 else math.ceil(math.log2(4 * s / eps))
    Mr = np.vectorize(lambda z: _round_entry(z, bits), otypes=[complex])(M)

    inner = 4 * N * N                    # flag(2) x anc(n) x sys(n)

    def idx(flag, anc, sys_):
        return (flag * N + anc) * N + sys_

    def support(i, along_row):
        line = nz[i] if along_row else nz[:, i]
        picked = list(np.nonzero(line)[0])
        for k in range(N):
            if len(picked) == s:
                break
            if k not in picked:
                picked.append(k)
        return picked

    L = np.zeros((inner, N), dtype=complex)
    R = np.zeros((inner, N), dtype=complex)
    for i in range(N):
        for k in support(i, True):
            r = abs(Mr[i, k])
            L[idx(0, k, i), i] = math.sqrt(r)
            L[idx(1, k, i), i] = math.sqrt(max(1 - r, 0.0))
        for l in support(i, False):
            z = Mr[l, i]
            r = abs(z)
            R[idx(0, i, l), i] = math.sqrt(r) * np.exp(1j * np.angle(z))
            R[idx(2, i, l), i] = math.sqrt(max(1 - r, 0.0))
    L /= math.sqrt(s)
    R /= math.sqrt(s)

    def complete(iso):
        # columns for |flag=0, anc=0, sys=i> are the isometry, the rest any orthonormal complement
        U = np.zeros((inner, inner), dtype=complex)
        U[:, :N] = iso
        U[:, N:] = null_space(iso.conj().T)
        return U

    inner_U = complete(L).conj().T @ complete(R)
    U = np.kron(np.eye(2), inner_U)     # idle ancilla qubit
    check_unitary(U, 1e-9)
    ledger = ResourceLedger({label: 1}, math.ceil(n + math.log2(s / eps) ** 2.5) if eps > 0 else n, n + 3)
    return BlockEncoding(U, n, n + 3, float(s), float(eps), ledger, label, M.copy())


def from_density(purifier: np.ndarray, n: int, label: str = "rho") -> BlockEncoding:
    """(1, n+a, 0)-encoding of the reduced state prepared by a purifier.

    ``purifier`` acts on [a purification qubits, n system qubits]; the result
    is ``(V^dag x I) SWAP_{sys, out} (V x I)`` on [a, n, n] with the last ``n``
    qubits as the output register.
    """
    V = np.asarray(purifier, dtype=complex)
    check_unitary(V)
    nq = _nqubits(V.shape[0])
    a = nq - n
    if a < 0:
        raise DimensionMismatch("purifier is smaller than the system register")
    total = a + 2 * n
    _check_size(total)
    Vf = on_qubits(V, list(range(a + n)), total)
    perm = list(range(a)) + list(range(a + n, a + 2 * n)) + list(range(a, a + n))
    swap = _permutation_unitary(perm, total)
    U = Vf.conj().T @ swap @ Vf
    psi = V[:, 0].reshape(1 << a, 1 << n)
    rho = psi.T @ psi.conj()
    return BlockEncoding(U, n, n + a, 1.0, 0.0, ResourceLedger({label: 1}, n, n + a), label, rho)


def _permutation_unitary(perm: list[int], nq: int) -> np.ndarray:
    """Unitary sending qubit ``q`` to position ``perm[q]``."""
    D = 1 << nq
    idx = np.arange(D)
    bits = (idx[:, None] >> (nq - 1 - np.arange(nq))) & 1
    out = np.zeros(D, dtype=int)
    for q in range(nq):
        out |= bits[:, q] << (nq - 1 - perm[q])
    P = np.zeros((D, D))
    P[out, idx] = 1
    return P


def purifier_for(rho: np.ndarray) -> tuple[np.ndarray, int]:
    """A purifier ``V`` on [n purification, n system] qubits for ``rho``."""
    from .linalg_core import spectral_decompose

    rho = np.asarray(rho)
    N = rho.shape[0]
    n = _nqubits(N)
    sd = spectral_decompose(rho)
    w = np.clip(sd.eigenvalues, 0, None)
    psi = np.zeros((N, N), dtype=complex)        # psi[k, i] amplitude of |k>_pur |i>_sys
    for k in range(N):
        psi[k] = math.sqrt(w[k]) * sd.eigenvectors[:, k]
    vec = psi.reshape(-1)
    vec /= np.linalg.norm(vec)
    basis = null_space(vec.conj()[None, :])
    V = np.column_stack([vec, basis])
    return V, n


# --------------------------------------------------------------- combinators

def compact(be: BlockEncoding) -> BlockEncoding:
    """Same logical encoding, physically re-dilated onto one ancilla."""
    if be.phys_a == 1:
        return be
    return replace(be, unitary=dilation(be.block))


def adjoint(be: BlockEncoding) -> BlockEncoding:
    """``U^dag`` encodes ``A^dag`` with the same tuple and one query per use."""
    tgt = None if be.target is None else be.target.conj().T
    return replace(be, unitary=be.unitary.conj().T, target=tgt, label=be.label + "^dag")


def product(beA: BlockEncoding, beB: BlockEncoding, label: str | None = None) -> BlockEncoding:
    """(alpha beta, a+b, alpha eps_B + beta eps_A)-encoding of ``A B``."""
    if beA.n != beB.n:
        raise DimensionMismatch(f"system sizes {beA.n} and {beB.n} differ")
    A, B = compact(beA), compact(beB)
    n = A.n
    nq = n + 2                                  # [anc_A, anc_B, sys]
    W = on_qubits(A.unitary, [0] + list(range(2, nq)), nq) @ on_qubits(B.unitary, list(range(1, nq)), nq)
    block = W[: 1 << n, : 1 << n]
    tgt = None if A.target is None or B.target is None else A.target @ B.target
    ledger = (A.ledger + B.ledger).with_extra(ancillas=A.a + B.a)
    return BlockEncoding(dilation(block), n, A.a + B.a, A.alpha * B.alpha,
                         A.alpha * B.eps_claimed + B.alpha * A.eps_claimed, ledger,
                         label or _merge_label(beA.label, beB.label), tgt)


def _round_probs(p: np.ndarray, bits: int) -> np.ndarray:
    q = np.round(p * 2 ** bits) / 2 ** bits
    q[np.argmax(q)] += 1 - q.sum()
    return q


def linear_combine(weights, bes: list[BlockEncoding], eps: float, beta: float | None = None,
                   label: str | None = None) -> BlockEncoding:
    """Encoding of ``beta^{-1} sum_j x_j A_j`` from scale-1 encodings.

    A zero-block term absorbs ``beta - ||x||_1`` so the prepare state is
    normalized. Prepare probabilities are rounded to ``ceil(log2(1/eps))``
    bits; the claimed error is ``sum_j |x_j| eps_j / beta`` plus the exact
    effect of that rounding. Logical ancillas: ``max a_j + ceil(log2 m) +
    ceil(log2(1/eps))`` with ``m`` counting the padding term.
    """
    x = np.asarray(weights, dtype=float)
    if len(x) != len(bes) or len(bes) == 0:
        raise DimensionMismatch("one weight per encoding is required")
    if not 0 < eps < 1:
        raise InvalidParams("eps must lie in (0, 1)")
    beta = float(np.abs(x).sum()) if beta is None else float(beta)
    l1 = float(np.abs(x).sum())
    if l1 > beta * (1 + 1e-12):
        raise WeightNormExceeded(f"||x||_1 = {l1} exceeds beta = {beta}")
    if any(abs(b.alpha - 1) > 1e-12 for b in bes):
        raise ScaleNotOne("linear combinations take scale-1 encodings")
    n = bes[0].n
    if any(b.n != n for b in bes):
        raise DimensionMismatch("encodings act on different system sizes")

    parts = [compact(b) for b in bes]
    probs = list(np.abs(x) / beta)
    signs = list(np.sign(x) + (x == 0))
    units = [p.unitary for p in parts]
    if l1 < beta * (1 - 1e-12):
        probs.append(1 - l1 / beta)
        signs.append(1.0)
        units.append(np.kron(np.array([[0, 1], [1, 0]]), np.eye(1 << n)))  # block 0
    m_eff = len(probs)
    r = max(0, math.ceil(math.log2(m_eff)))
    bits = math.ceil(math.log2(1 / eps))
    p = np.zeros(1 << r)
    p[:m_eff] = probs
    pr = _round_probs(p, bits)
    prep = np.column_stack([np.sqrt(pr), null_space(np.sqrt(pr)[None, :])]) if r else np.eye(1)
    nq = r + 1 + n
    _check_size(nq)
    sel = np.zeros((1 << nq, 1 << nq), dtype=complex)
    blk = 1 << (n + 1)
    for j in range(1 << r):
        Uj = signs[j] * units[j] if j < m_eff else np.eye(blk)
        sel[j * blk:(j + 1) * blk, j * blk:(j + 1) * blk] = Uj
    P = on_qubits(prep, list(range(r)), nq) if r else np.eye(1 << nq)
    U = P.conj().T @ sel @ P
    block = U[: 1 << n, : 1 << n]

    rounding = float(np.abs(pr - p).sum())
    claimed = float(sum(abs(xj) * b.eps_claimed for xj, b in zip(x, bes)) / beta + rounding)
    tgt = None
    if all(b.target is not None for b in bes):
        tgt = sum(xj * b.target for xj, b in zip(x, bes)) / beta
    ledger = ResourceLedger()
    for b in bes:
        ledger = ledger + b.ledger
    a_out = max(b.a for b in bes) + r + bits
    ledger = ledger.with_extra(gates=bits ** 2 + m_eff, ancillas=a_out)
    return BlockEncoding(dilation(block), n, a_out, 1.0, claimed, ledger,
                         label or "LCU" + str([b.label for b in bes]), tgt)


def qsvt(be: BlockEncoding, poly: ChebyshevPoly, delta: float = 0.0,
         label: str | None = None, hermitian_tol: float = 1e-8) -> BlockEncoding:
    """(1, a+2, 4 d sqrt(eps) + delta)-encoding of ``q(A)/2``.

    ``q`` is applied to the eigenvalues of the block actually encoded, so the
    result carries the input's error exactly. The attached target becomes
    ``q(target)/2``; use :func:`retarget` to switch to the ideal function.
    """
    if abs(be.alpha - 1) > 1e-12:
        raise ScaleNotOne(f"qsvt needs a scale-1 encoding, got alpha={be.alpha}")
    if not poly.measured_max_abs <= 1 + config.BOUND_SLACK:
        raise PolyUnbounded(f"max |q| = {poly.measured_max_abs} on [-1, 1]")
    blk = be.block
    dev = np.linalg.norm(blk - blk.conj().T, 2)
    if dev > hermitian_tol:
        raise NonHermitian(f"encoded block deviates from Hermitian by {dev:.3e}")
    H = (blk + blk.conj().T) / 2
    w, V = np.linalg.eigh(H)
    qw = evaluate_many(poly.coeffs, np.clip(w, -1, 1))
    out = (V * (qw / 2)) @ V.conj().T
    tgt = None
    if be.target is not None:
        tw, tV = np.linalg.eigh((be.target + be.target.conj().T) / 2)
        if np.all(np.abs(tw) <= 1 + 1e-9):
            tgt = (tV * (evaluate_many(poly.coeffs, np.clip(tw, -1, 1)) / 2)) @ tV.conj().T
    d = poly.degree
    ledger = be.ledger.scaled(d).with_extra(
        gates=config.QSVT_GATES_PER_QUERY * (be.a + 1) * d, ancillas=be.a + 2,
        classical=d * d)
    claimed = 4 * d * math.sqrt(be.eps_claimed) + delta
    return BlockEncoding(dilation(out), be.n, be.a + 2, 1.0, claimed, ledger,
                         label or f"q[{poly.kind},c={poly.c:g}]({be.label})", tgt)


def retarget(be: BlockEncoding, target, extra_eps: float, label: str | None = None) -> BlockEncoding:
    """Attach a new target whose distance from the old one is ``extra_eps``."""
    T = np.asarray(getattr(target, "data", target))
    return replace(be, target=T, eps_claimed=be.eps_claimed + extra_eps, label=label or be.label)


def upscale(be: BlockEncoding, eps: float, label: str | None = None) -> BlockEncoding:
    """(2, a+1, sqrt(alpha eps))-encoding of the same operator.

    Input: an ``(alpha, a, eps_in)``-encoding of ``A``, so the block is about
    ``A/alpha``. Output block ``A/2``. The simulator multiplies the block by
    ``alpha/2`` exactly and charges ``ceil(alpha ln(1/eps))`` queries per
    input query. The claimed error is
    ``max(C sqrt(alpha * max(eps, eps_in)), eps_in)``.
    """
    if not 0 < eps < 1:
        raise InvalidParams("eps must lie in (0, 1)")
    if be.alpha < 2 - 1e-12:
        raise InvalidParams(f"up-scaling expects alpha >= 2, got {be.alpha}")
    out = be.block * (be.alpha / 2)
    norm = np.linalg.norm(out, 2)
    if norm > 1 + config.NORM_SLACK:
        raise NormTooLarge(f"up-scaled block has norm {norm:.6g} > 1")
    e_in = max(be.eps_claimed, eps)
    claimed = max(config.UPSCALE_ERROR_CONSTANT * math.sqrt(be.alpha * e_in), be.eps_claimed)
    k = math.ceil(config.UPSCALE_QUERY_CONSTANT * be.alpha * math.log(1 / eps))
    ledger = be.ledger.scaled(k).with_extra(gates=be.a * k, ancillas=be.a + 1)
    return BlockEncoding(dilation(out), be.n, be.a + 1, 2.0, claimed, ledger,
                         label or f"up({be.label})", be.target)


def pad_ancillas(be: BlockEncoding, k: int) -> BlockEncoding:
    """Declare ``k`` extra idle ancillas."""
    return replace(be, a=be.a + int(k))


def ledger_report(be: BlockEncoding, theory: dict | None = None) -> str:
    """Plain-text table of per-oracle queries, optionally against a formula."""
    lines = [f"encoding {be.label}: alpha={be.alpha:.6g} a={be.a} eps={be.eps_claimed:.3e}",
             f"{'oracle':<12}{'queries':>16}{'theory':>16}"]
    for o, q in sorted(be.ledger.queries.items()):
        t = "" if not theory or o not in theory else f"{theory[o]:.4g}"
        lines.append(f"{o:<12}{q:>16}{t:>16}")
    lines.append(f"gates~{be.ledger.gate_estimate} ancillas_peak={be.ledger.ancillas_peak}")
    return "\n".join(lines)
