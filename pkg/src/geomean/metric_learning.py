"""Geometric mean metric learning.

From similar pairs S and dissimilar pairs D the scatter matrices
``A = sum_S (x - x')(x - x')^T`` and ``C = sum_D (x - x')(x - x')^T`` give the
loss ``L(Y) = Tr(YA) + Tr(Y^{-1}C)``, minimized by ``Y = A^{-1} # C``. The
same observable with density matrices, ``sigma^{-1} # rho``, scores test
states for one-class anomaly detection.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from .blockenc import from_density, purifier_for
from .errors import DimensionMismatch, InvalidParams, InvalidState, NotPositiveDefinite, SchemaError
from .geomean_pipeline import PipelineReport, be_weighted_inverse
from .linalg_core import (
    PDMatrix,
    geodesic_distance,
    geodesic_point,
    geometric_mean,
    inverse,
    weighted_geometric_mean,
)

RIDGE_REL = 1e-8


@dataclass
class PairDataset:
    dim: int
    similar: np.ndarray          # shape (m, 2, dim)
    dissimilar: np.ndarray
    source_note: str = ""

    def __post_init__(self):
        for name in ("similar", "dissimilar"):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1, 2, self.dim)
            setattr(self, name, arr)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """All pairs stacked, with label 1 for dissimilar."""
        X = np.concatenate([self.similar, self.dissimilar])
        y = np.r_[np.zeros(len(self.similar), int), np.ones(len(self.dissimilar), int)]
        return X, y


@dataclass
class MetricModel:
    Y: PDMatrix
    weight_t: float = 0.5
    trace_ratio: float = 1.0
    provenance: str = "exact"
    threshold: float | None = None
    encoding: PipelineReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        from .io import matrix_to_json

        return {"Y": matrix_to_json(self.Y.data), "weight_t": self.weight_t,
                "trace_ratio": self.trace_ratio, "provenance": self.provenance,
                "threshold": self.threshold}

    @classmethod
    def from_dict(cls, obj: dict) -> "MetricModel":
        from .io import matrix_from_json

        try:
            Y = PDMatrix.from_array(matrix_from_json(obj["Y"]))
        except KeyError as exc:
            raise SchemaError(f"metric model lacks {exc}") from exc
        return cls(Y, float(obj.get("weight_t", 0.5)), float(obj.get("trace_ratio", 1.0)),
                   str(obj.get("provenance", "exact")), obj.get("threshold"))


# -------------------------------------------------------------------- data

def two_gaussian_pairs(dim: int = 8, n_pairs: int = 200, seed: int = 0,
                       separation: float = 5.0, signal_std: float = 0.5,
                       noise_std: float = 2.5) -> PairDataset:
    """Pairs drawn from two Gaussian classes that differ along the first two axes.

    The remaining axes carry large shared noise, which hurts the Euclidean
    distance but is learned away by the metric.
    """
    if dim < 3:
        raise InvalidParams("the benchmark needs dim >= 3")
    rng = np.random.default_rng(seed)
    mu = np.zeros((2, dim))
    mu[1, :2] = separation / math.sqrt(2)
    std = np.full(dim, noise_std)
    std[:2] = signal_std

    def draw(cls, m):
        return mu[cls] + rng.normal(size=(m, dim)) * std

    cls_s = rng.integers(0, 2, n_pairs)
    similar = np.stack([np.stack([draw(c, 1)[0], draw(c, 1)[0]]) for c in cls_s])
    dissimilar = np.stack([np.stack([draw(0, 1)[0], draw(1, 1)[0]]) for _ in range(n_pairs)])
    return PairDataset(dim, similar, dissimilar,
                       f"two-gaussian dim={dim} pairs={n_pairs} seed={seed}")


def read_pairs_csv(path: str | Path) -> PairDataset:
    """Rows ``label,xs...,ys...`` with label S or D."""
    sim, dis = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].startswith("#"):
                continue
            label, vals = row[0].strip(), np.array([float(v) for v in row[1:]])
            if len(vals) % 2:
                raise SchemaError(f"line {lineno}: odd number of coordinates")
            pair = vals.reshape(2, -1)
            if label == "S":
                sim.append(pair)
            elif label == "D":
                dis.append(pair)
            else:
                raise SchemaError(f"line {lineno}: label must be S or D, got {label!r}")
    dims = {p.shape[1] for p in sim + dis}
    if len(dims) != 1:
        raise DimensionMismatch(f"inconsistent vector lengths {sorted(dims)}")
    dim = dims.pop()
    return PairDataset(dim, np.array(sim).reshape(-1, 2, dim), np.array(dis).reshape(-1, 2, dim),
                       f"csv:{Path(path).name}")


def write_pairs_csv(ds: PairDataset, path: str | Path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for label, arr in (("S", ds.similar), ("D", ds.dissimilar)):
            for x, x2 in arr:
                w.writerow([label] + [repr(float(v)) for v in np.r_[x, x2]])


# ------------------------------------------------------------------ fitting

def _scatter(pairs: np.ndarray) -> np.ndarray:
    diff = pairs[:, 0] - pairs[:, 1]
    return diff.T @ diff


def build_scatter(ds: PairDataset, ridge: bool = False) -> tuple[PDMatrix, PDMatrix]:
    """Scatter matrices of the similar and dissimilar differences."""
    if len(ds.similar) == 0 or len(ds.dissimilar) == 0:
        raise InvalidParams("both pair lists must be nonempty")
    out = []
    for name, pairs in (("A", ds.similar), ("C", ds.dissimilar)):
        if pairs.shape[2] != ds.dim:
            raise DimensionMismatch(f"pairs of length {pairs.shape[2]}, dataset dim {ds.dim}")
        S = _scatter(pairs)
        if ridge:
            S = S + RIDGE_REL * np.trace(S) / ds.dim * np.eye(ds.dim)
        try:
            out.append(PDMatrix.from_array(S))
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite(
                f"scatter {name} is rank deficient ({exc}); pass ridge=True to regularize") from exc
    return out[0], out[1]


def loss(Y, A, C) -> float:
    """``Tr(YA) + Tr(Y^{-1}C)``."""
    y, a, c = (PDMatrix.from_array(M).data for M in (Y, A, C))
    return float(np.real(np.trace(y @ a) + np.trace(inverse(y) @ c)))


def loss_gradient(Y, A, C) -> np.ndarray:
    y, a, c = (PDMatrix.from_array(M).data for M in (Y, A, C))
    yi = inverse(y)
    return a - yi @ c @ yi


def weighted_loss(Y, A, C, t: float) -> float:
    """``(1-t) delta(Y, A^{-1})^2 + t delta(Y, C)^2`` with the Riemannian distance.

    The squared distance is what makes the weighted mean the minimizer; with
    plain distances the minimum sits at an endpoint whenever ``t != 1/2``.
    """
    a_inv = inverse(PDMatrix.from_array(A).data)
    return float((1 - t) * geodesic_distance(Y, a_inv) ** 2 + t * geodesic_distance(Y, C) ** 2)


def _trace_factor(A: PDMatrix, C: PDMatrix, t: float) -> float:
    # (A/TrA)^{-1} #_t (C/TrC) = TrA^{1-t} TrC^{-t} (A^{-1} #_t C)
    return float(np.trace(A.data).real ** (t - 1) * np.trace(C.data).real ** t)


def gmml_fit(A, C) -> MetricModel:
    """Minimizer ``A^{-1} # C`` of the metric-learning loss."""
    A, C = PDMatrix.from_array(A), PDMatrix.from_array(C)
    Y = PDMatrix.from_array(geometric_mean(inverse(A.data), C.data))
    return MetricModel(Y, 0.5, _trace_factor(A, C, 0.5), "exact")


def gmml_fit_weighted(A, C, t: float) -> MetricModel:
    """``A^{-1} #_t C``, the minimizer of :func:`weighted_loss`."""
    A, C = PDMatrix.from_array(A), PDMatrix.from_array(C)
    Y = PDMatrix.from_array(weighted_geometric_mean(inverse(A.data), C.data, t))
    return MetricModel(Y, float(t), _trace_factor(A, C, t), "exact")


def gmml_fit_normalized(A, C, t: float = 0.5) -> MetricModel:
    """Fit from the unit-trace matrices and undo the normalization afterwards."""
    A, C = PDMatrix.from_array(A), PDMatrix.from_array(C)
    rA = A.data / np.trace(A.data).real
    rC = C.data / np.trace(C.data).real
    factor = _trace_factor(A, C, t)
    Y = PDMatrix.from_array(factor * geodesic_point(inverse(rA), rC, t))
    return MetricModel(Y, float(t), factor, "exact-normalized")


def gmml_fit_pipeline(A, C, eps: float, t: float = 0.5, strict: bool = True) -> MetricModel:
    """Fit through a block encoding built from purified unit-trace scatter matrices."""
    A, C = PDMatrix.from_array(A), PDMatrix.from_array(C)
    if not 0 < t < 1:
        raise InvalidParams(f"weight must lie in (0, 1), got {t}")
    rA = A.data / np.trace(A.data).real
    rC = C.data / np.trace(C.data).real
    kA = 1 / np.linalg.eigvalsh(rA)[0]
    kC = 1 / np.linalg.eigvalsh(rC)[0]
    UA = from_density(*purifier_for(rA), label="V_A")
    UC = from_density(*purifier_for(rC), label="V_C")
    rep = be_weighted_inverse(UA, UC, 1 / t, eps, kA, kC, strict=strict)
    factor = _trace_factor(A, C, t)
    dec = rep.output.decoded()
    Y = PDMatrix.from_array(factor * (dec + dec.conj().T) / 2)
    return MetricModel(Y, float(t), factor, f"pipeline({eps:g})", encoding=rep)


# ------------------------------------------------------------------ scoring

def mahalanobis(model, y, y2, mode: str = "exact") -> float:
    """``(y - y')^T Y (y - y')``.

    In pipeline mode the value is read off the encoding as
    ``factor * alpha * N^2 * Re <psi|block|psi>`` with ``psi = (y - y')/N``.
    """
    Y = model.Y.data if isinstance(model, MetricModel) else PDMatrix.from_array(model).data
    d = np.asarray(y, dtype=float) - np.asarray(y2, dtype=float)
    if d.shape != (Y.shape[0],):
        raise DimensionMismatch(f"vectors of shape {d.shape}, metric of dim {Y.shape[0]}")
    if mode == "exact":
        return float(max(d @ Y @ d, 0.0).real)
    if mode != "pipeline":
        raise InvalidParams(f"unknown mode {mode!r}")
    if not isinstance(model, MetricModel) or model.encoding is None:
        raise InvalidParams("pipeline mode needs a model from gmml_fit_pipeline")
    norm = np.linalg.norm(d)
    if norm == 0:
        return 0.0
    out = model.encoding.output
    psi = d / norm
    return float(model.trace_ratio * out.alpha * norm ** 2 * np.real(psi @ out.block @ psi))


def pair_distances(model, pairs: np.ndarray) -> np.ndarray:
    Y = model.Y.data if isinstance(model, MetricModel) else np.asarray(model)
    diff = pairs[:, 0] - pairs[:, 1]
    return np.einsum("ij,jk,ik->i", diff, Y.real, diff)


def fit_threshold(model: MetricModel, ds: PairDataset) -> float:
    """Threshold on ``d_Y`` that maximizes training accuracy (dissimilar above)."""
    X, y = ds.pairs()
    d = pair_distances(model, X)
    order = np.sort(d)
    grid = np.r_[order[0] - 1, (order[1:] + order[:-1]) / 2, order[-1] + 1]
    acc = [np.mean((d > g) == y) for g in grid]
    best = float(grid[int(np.argmax(acc))])
    model.threshold = best
    return best


def pair_accuracy(model: MetricModel, ds: PairDataset, threshold: float | None = None) -> float:
    thr = model.threshold if threshold is None else threshold
    if thr is None:
        raise InvalidParams("no threshold: call fit_threshold first")
    X, y = ds.pairs()
    return float(np.mean((pair_distances(model, X) > thr) == y))


def euclidean_model(dim: int) -> MetricModel:
    return MetricModel(PDMatrix.from_array(np.eye(dim)), 0.5, 1.0, "euclidean")


def _density(x, name: str) -> np.ndarray:
    from .estimation import DensityMatrix

    try:
        return DensityMatrix.from_array(x).data
    except (NotPositiveDefinite, InvalidState) as exc:
        raise InvalidState(f"{name}: {exc}") from exc


def anomaly_score(rho_anom, sigma_normal, xi, mode: str = "exact", eps: float = 1e-3,
                  t: float = 0.5, strict: bool = True) -> float:
    """``Tr(Y xi)`` with ``Y = sigma^{-1} #_t rho``; larger means more anomalous."""
    r, s, x = _density(rho_anom, "rho"), _density(sigma_normal, "sigma"), _density(xi, "xi")
    if not r.shape == s.shape == x.shape:
        raise DimensionMismatch("states have different dimensions")
    if mode == "exact":
        return float(np.real(np.trace(geodesic_point(inverse(s), r, t) @ x)))
    if mode != "pipeline":
        raise InvalidParams(f"unknown mode {mode!r}")
    ks = 1 / np.linalg.eigvalsh(s)[0]
    kr = 1 / np.linalg.eigvalsh(r)[0]
    rep = be_weighted_inverse(from_density(*purifier_for(s), label="O_sigma"),
                              from_density(*purifier_for(r), label="O_rho"),
                              1 / t, eps, ks, kr, strict=strict)
    out = rep.output
    return float(out.alpha * np.real(np.trace(out.block @ x)))


def state_prep_cost(m: int, sparsity: int) -> dict:
    """Gate counts for preparing an ``m``-qubit state with ``sparsity`` nonzero amplitudes.

    Constants are pinned to 1; only the scaling is meaningful.
    """
    if m < 1 or sparsity < 1:
        raise InvalidParams("qubits and sparsity must be positive")
    lg = max(1, math.ceil(math.log2(sparsity))) if sparsity > 1 else 1
    return {
        "cnot": m * sparsity,
        "one_qubit": sparsity * (lg + m),
        "ancilla": 0,
        "depth_option": {"depth": max(1, math.ceil(math.log2(m * sparsity))),
                         "ancilla": m * sparsity * lg},
    }
