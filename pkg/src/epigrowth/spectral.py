"""Eigendecomposition-based community detection.

Two routes: k-means on the unit-normalized rows of the top-|eigenvalue|
eigenvectors of the correlation matrix, or of the smallest-|eigenvalue|
eigenvectors of the normalized symmetric Laplacian of an adjacency graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import linear_sum_assignment

from .errors import ContractError
from .similarity import AdjacencyGraph, CorrelationMatrix
from .util import DiagnosticLog, rng_stream

_SYM_TOL = 1e-9
_JACOBI_TOL = 1e-12  # off-diagonal Frobenius norm relative to ||M||_F


@dataclass
class KMeansConfig:
    seed: int = 0
    restarts: int = 10
    max_iter: int = 300


@dataclass
class SpectralEmbedding:
    """Selected eigenvector block, optionally with unit-normalized rows."""

    vectors: np.ndarray  # (n, K)
    eigenvalues: np.ndarray  # (K,)
    normalized: bool
    zero_rows: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))


@dataclass
class Partition:
    entities: list[str]
    labels: np.ndarray  # (n,) community ids in 1..K
    K: int
    method: str  # correlation | laplacian-epsilon | laplacian-knn | ...
    centroids: np.ndarray  # (K, K) k-means centroids in embedding space

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if np.any(self.labels < 1) or np.any(self.labels > self.K):
            raise ContractError("labels must lie in 1..K")
        if len(np.unique(self.labels)) != self.K:
            raise ContractError("every community must be non-empty")

    def members(self, k: int) -> list[str]:
        return [e for e, z in zip(self.entities, self.labels) if z == k]


@njit(cache=True)
def _jacobi(a: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi sweeps on a symmetric matrix (destroys `a`)."""
    n = a.shape[0]
    v = np.eye(n)
    norm = np.sqrt((a * a).sum())
    if norm == 0.0:
        return np.zeros(n), v, 0
    sweeps = 0
    while sweeps < 100:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if np.sqrt(off) < tol * norm:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v, sweeps


def eigen_sym(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full spectrum of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) in ascending eigenvalue order with
    orthonormal columns. Sign convention: each vector's largest-magnitude
    entry is positive, so repeated runs are bit-identical.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError("matrix must be square")
    if m.size and np.abs(m - m.T).max() > _SYM_TOL:
        raise ContractError("matrix is not symmetric to 1e-9")
    work = ((m + m.T) / 2.0).copy()
    values, vectors, _ = _jacobi(work, _JACOBI_TOL)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    flip = vectors[np.abs(vectors).argmax(axis=0), np.arange(len(values))] < 0
    vectors[:, flip] *= -1.0
    return values, vectors


def kmeans(points: np.ndarray, K: int, seed: int = 0, restarts: int = 10,
           max_iter: int = 300) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd iterations from k-means++ seeding; best inertia over restarts.

    Returns (labels in 0..K-1, centroids, inertia). Deterministic given the
    seed; empty clusters are repaired by reassigning the farthest point.
    """
    points = np.asarray(points, dtype=float)
    m = points.shape[0]
    if m < K:
        raise ContractError("need at least K points")
    rng = rng_stream(seed, 0x4B)
    max_iter = max(1, max_iter)
    best = None
    for _ in range(max(1, restarts)):
        centers = _kmeanspp(points, K, rng)
        labels, centers, inertia, _ = lloyd_iterations(points, centers, max_iter)
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    return best


def _kmeanspp(points: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    m = points.shape[0]
    centers = np.empty((K, points.shape[1]))
    centers[0] = points[rng.integers(m)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for k in range(1, K):
        total = d2.sum()
        if total <= 0:
            centers[k] = points[rng.integers(m)]
        else:
            centers[k] = points[rng.choice(m, p=d2 / total)]
        d2 = np.minimum(d2, ((points - centers[k]) ** 2).sum(axis=1))
    return centers


def lloyd_iterations(points: np.ndarray, centers: np.ndarray, max_iter: int
                     ) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """Run Lloyd updates to convergence; inertia trace is non-increasing."""
    m, K = points.shape[0], centers.shape[0]
    centers = centers.copy()
    labels = np.full(m, -1)
    trace: list[float] = []
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        for k in range(K):
            if not np.any(new_labels == k):
                # Repair: move the farthest point that is not itself the
                # sole member of its cluster.
                counts = np.bincount(new_labels, minlength=K)
                movable = np.flatnonzero(counts[new_labels] > 1)
                far = movable[d2[movable, new_labels[movable]].argmax()]
                new_labels[far] = k
                centers[k] = points[far]
                d2[:, k] = ((points - centers[k]) ** 2).sum(axis=1)
        trace.append(float(d2[np.arange(m), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for k in range(K):
            centers[k] = points[labels == k].mean(axis=0)
    inertia = float(((points - centers[labels]) ** 2).sum())
    return labels, centers, inertia, trace


def embedding_from_spectrum(values: np.ndarray, vectors: np.ndarray, K: int,
                            which: str = "largest", normalize: bool = True
                            ) -> SpectralEmbedding:
    """Select K eigenvectors from a precomputed spectrum by |eigenvalue|
    (largest or smallest first), unit-normalizing rows when requested.
    Rows that are exactly zero are left alone and flagged."""
    order = np.argsort(-np.abs(values), kind="stable")
    if which == "smallest":
        order = order[::-1]
    elif which != "largest":
        raise ContractError(f"unknown eigenvector selection {which!r}")
    take = order[:K]
    block = vectors[:, take].copy()
    vals = values[take].copy()
    zero_rows = np.array([], dtype=int)
    if normalize:
        norms = np.linalg.norm(block, axis=1)
        zero_rows = np.flatnonzero(norms == 0.0)
        safe = np.where(norms == 0.0, 1.0, norms)
        block = block / safe[:, None]
    return SpectralEmbedding(block, vals, normalize, zero_rows)


def spectral_embedding(matrix: np.ndarray, K: int, which: str = "largest",
                       normalize: bool = True) -> SpectralEmbedding:
    values, vectors = eigen_sym(matrix)
    return embedding_from_spectrum(values, vectors, K, which, normalize)


def cluster_embedding(emb: SpectralEmbedding, entities: list[str], K: int,
                      method: str, cfg: KMeansConfig,
                      diag: DiagnosticLog | None = None) -> Partition:
    diag = diag if diag is not None else DiagnosticLog()
    points = emb.vectors
    mask = np.ones(points.shape[0], dtype=bool)
    mask[emb.zero_rows] = False
    labels = np.empty(points.shape[0], dtype=int)
    sub_labels, centroids, _ = kmeans(points[mask], K, cfg.seed, cfg.restarts, cfg.max_iter)
    labels[mask] = sub_labels
    for i in emb.zero_rows:  # unnormalizable rows: nearest centroid after the fact
        labels[i] = int(((centroids - points[i]) ** 2).sum(axis=1).argmin())
        diag.add("spectral", entities[i], "zero embedding row assigned to nearest centroid")
    return Partition(list(entities), labels + 1, K, method, centroids)


def cluster_correlation(corr: CorrelationMatrix, K: int,
                        cfg: KMeansConfig | None = None,
                        diag: DiagnosticLog | None = None) -> Partition:
    """Top-K |eigenvalue| eigenvectors of R, unit-norm rows, k-means."""
    cfg = cfg or KMeansConfig()
    if K < 1:
        raise ContractError("K must be >= 1")
    if corr.n <= K:
        raise ContractError("need more entities than communities")
    emb = spectral_embedding(corr.values, K, which="largest")
    return cluster_embedding(emb, corr.entities, K, "correlation", cfg, diag)


def laplacian_matrix(graph: AdjacencyGraph, diag: DiagnosticLog | None = None) -> np.ndarray:
    """Normalized symmetric Laplacian I - D^{-1/2} A D^{-1/2}.

    Isolated vertices get D^{-1/2} = 0, leaving an identity row, and are
    reported.
    """
    diag = diag if diag is not None else DiagnosticLog()
    a = np.asarray(graph.edges, dtype=float)
    degrees = a.sum(axis=1)
    isolated = np.flatnonzero(degrees == 0)
    for i in isolated:
        diag.add("laplacian", graph.entities[i], "isolated vertex (degree 0)")
    inv_sqrt = np.where(degrees > 0, 1.0 / np.sqrt(np.where(degrees > 0, degrees, 1.0)), 0.0)
    return np.eye(graph.n) - inv_sqrt[:, None] * a * inv_sqrt[None, :]


def cluster_laplacian(graph: AdjacencyGraph, K: int,
                      cfg: KMeansConfig | None = None,
                      diag: DiagnosticLog | None = None) -> Partition:
    """Smallest-|eigenvalue| K eigenvectors of the normalized Laplacian,
    unit-norm rows, k-means. Method tag follows the graph kind.
    """
    cfg = cfg or KMeansConfig()
    if K < 1:
        raise ContractError("K must be >= 1")
    if graph.n <= K:
        raise ContractError("need more entities than communities")
    lap = laplacian_matrix(graph, diag)
    emb = spectral_embedding(lap, K, which="smallest")
    return cluster_embedding(emb, graph.entities, K, f"laplacian-{graph.kind}", cfg, diag)


def select_k_eigengap(eigenvalues, k_max: int) -> int:
    """K maximizing |lambda_k| - |lambda_{k+1}| for k in 2..k_max, where the
    input is ordered by descending absolute value.
    """
    mags = np.abs(np.asarray(eigenvalues, dtype=float))
    if k_max < 2 or len(mags) <= k_max:
        raise ContractError("need k_max >= 2 and more eigenvalues than k_max")
    gaps = mags[1:k_max] - mags[2 : k_max + 1]
    return int(gaps.argmax()) + 2


def partition_block_summary(corr: CorrelationMatrix, part: Partition,
                            diag: DiagnosticLog | None = None) -> np.ndarray:
    """K x K means of R over community pairs; same-community means exclude
    the diagonal. A singleton community's within-mean is NaN.
    """
    diag = diag if diag is not None else DiagnosticLog()
    if list(corr.entities) != list(part.entities):
        raise ContractError("correlation matrix and partition entities differ")
    out = np.full((part.K, part.K), np.nan)
    for a in range(1, part.K + 1):
        ia = np.flatnonzero(part.labels == a)
        for b in range(1, part.K + 1):
            ib = np.flatnonzero(part.labels == b)
            block = corr.values[np.ix_(ia, ib)]
            if a == b:
                if len(ia) < 2:
                    diag.add("block-summary", f"community {a}",
                             "singleton community has no within-pair mean")
                    continue
                total = block.sum() - np.trace(block)
                out[a - 1, b - 1] = total / (len(ia) * (len(ia) - 1))
            else:
                out[a - 1, b - 1] = block.mean()
    return out


def align_labels(pred: Partition | np.ndarray, truth) -> tuple[np.ndarray, float]:
    """Relabel predictions by the agreement-maximizing permutation (Hungarian
    assignment on the confusion matrix) and report the misclassification
    rate under it.
    """
    pred_labels = pred.labels if isinstance(pred, Partition) else np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred_labels.shape != truth.shape:
        raise ContractError("prediction and truth must have the same length")
    pred_vals = np.unique(pred_labels)
    true_vals = np.unique(truth)
    confusion = np.zeros((len(pred_vals), len(true_vals)))
    for pi, pv in enumerate(pred_vals):
        for ti, tv in enumerate(true_vals):
            confusion[pi, ti] = np.sum((pred_labels == pv) & (truth == tv))
    rows, cols = linear_sum_assignment(-confusion)
    mapping = {pred_vals[r]: true_vals[c] for r, c in zip(rows, cols)}
    spare = [tv for tv in true_vals if tv not in mapping.values()]
    for pv in pred_vals:  # more predicted than true labels: map leftovers anywhere fixed
        if pv not in mapping:
            mapping[pv] = spare.pop(0) if spare else true_vals[0]
    permuted = np.array([mapping[z] for z in pred_labels])
    rate = float(np.mean(permuted != truth))
    return permuted, rate
