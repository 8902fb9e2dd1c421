"""Graph Laplacians, low-frequency eigenvector embeddings, K-means, and the
clustering-accuracy sweep over the path-metric power."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, PointCloud, complete_graph, make_rng, pairwise_euclidean
from .kernels import (
    KernelMatrix,
    diffusion_kernel,
    epsilon_percentile,
    gaussian_kernel,
    self_tuning_kernel,
)
from .paths import PwspdQueryConfig, pwspd_all_pairs

log = logging.getLogger("pwspd")

LAPLACIAN_KINDS = ("unnormalized", "random-walk", "symmetric")
_RESIDUAL_TOL = 1e-8


def laplacian(W: KernelMatrix | np.ndarray, kind: str = "unnormalized") -> np.ndarray:
    """L = Deg - W, Deg^-1 L, or Deg^-1/2 L Deg^-1/2 by kind."""
    w = W.values if isinstance(W, KernelMatrix) else np.asarray(W, dtype=np.float64)
    if kind not in LAPLACIAN_KINDS:
        raise ValueError(f"kind must be one of {LAPLACIAN_KINDS}, got {kind!r}")
    deg = w.sum(axis=1)
    dead = np.flatnonzero(deg <= 0)
    if dead.size:
        raise ValueError(f"zero-degree node at index {int(dead[0])}")
    lap = np.diag(deg) - w
    if kind == "unnormalized":
        return lap
    if kind == "random-walk":
        return lap / deg[:, None]
    inv = 1.0 / np.sqrt(deg)
    sym = lap * np.outer(inv, inv)
    return (sym + sym.T) / 2.0


@dataclass
class SpectralEmbedding:
    """K lowest-frequency eigenpairs; eigenvalues ascending, vector signs
    fixed so each vector's largest-magnitude coordinate is positive."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    laplacian_kind: str


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    for j in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, j])))
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return vecs


def embed(L: np.ndarray, K: int, kind: str = "unnormalized") -> SpectralEmbedding:
    """K smallest eigenpairs of a symmetric matrix via dense eigh."""
    n = L.shape[0]
    if not 1 <= K < n:
        raise ValueError(f"K must be in [1, n-1], got {K}")
    if not np.allclose(L, L.T, atol=1e-12):
        raise ValueError("embed requires a symmetric matrix")
    evals, evecs = np.linalg.eigh((L + L.T) / 2.0)
    evals, evecs = evals[:K], evecs[:, :K]
    resid = np.linalg.norm(L @ evecs - evecs * evals, axis=0)
    if (resid > _RESIDUAL_TOL * max(1.0, np.abs(L).max())).any():
        raise RuntimeError(
            f"eigensolver residual too large: {resid.max():.3e}"
        )
    return SpectralEmbedding(evals.copy(), _fix_signs(evecs.copy()), kind)


def spectral_embedding(W: KernelMatrix, K: int, kind: str = "symmetric") -> SpectralEmbedding:
    """Embedding pipeline from a kernel. The random-walk variant reuses the
    symmetric eigenproblem (similar matrices) and rescales by Deg^-1/2."""
    if kind == "random-walk":
        emb = embed(laplacian(W, "symmetric"), K, kind="random-walk")
        deg = W.values.sum(axis=1)
        vecs = emb.vectors / np.sqrt(deg)[:, None]
        vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)
        return SpectralEmbedding(emb.eigenvalues, _fix_signs(vecs), "random-walk")
    return embed(laplacian(W, kind), K, kind=kind)


# ---------------------------------------------------------------------------
# K-means
# ---------------------------------------------------------------------------

def _plusplus_init(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[int(rng.integers(n))]
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = X[int(rng.integers(n))]
            continue
        centers[c] = X[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(X, centers, max_iter=300):
    n, k = X.shape[0], centers.shape[0]
    labels = np.full(n, -1)
    history = []
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
        new_labels = np.argmin(d2, axis=1)
        cost = float(d2[np.arange(n), new_labels].sum())
        history.append(cost)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = labels == c
            if members.any():
                centers[c] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(d2[np.arange(n), labels]))
                centers[c] = X[far]
    return labels, history[-1], history


def kmeans(
    embedding: np.ndarray,
    clusters: int,
    seed: int = 0,
    restarts: int = 8,
    return_history: bool = False,
):
    """Lloyd's algorithm with k-means++ seeding; best of `restarts` runs by
    within-cluster sum of squares. Deterministic given the seed."""
    X = np.asarray(embedding, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if clusters < 2:
        raise ValueError("clusters must be >= 2")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = make_rng(seed, 0xC1)
    best = None
    for _ in range(restarts):
        centers = _plusplus_init(X, clusters, rng)
        labels, cost, history = _lloyd(X, centers)
        if best is None or cost < best[1]:
            best = (labels, cost, history)
    if return_history:
        return best[0], best[1], best[2]
    return best[0]


def accuracy(labels, truth) -> float:
    """Fraction of points correctly labeled after the best cluster-name
    alignment (exhaustive over permutations; up to 6 distinct labels)."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    if labels.shape != truth.shape:
        raise ValueError("labels and truth must have equal length")
    lab_names = np.unique(labels)
    tru_names = np.unique(truth)
    if max(len(lab_names), len(tru_names)) > 6:
        raise ValueError("alignment supports at most 6 distinct labels")
    names = np.unique(np.concatenate([lab_names, tru_names]))
    best = 0.0
    for perm in itertools.permutations(names):
        mapping = dict(zip(names, perm))
        mapped = np.array([mapping[v] for v in labels])
        best = max(best, float((mapped == truth).mean()))
    return best


@dataclass
class ClusteringResult:
    labels: np.ndarray
    accuracy: float
    p: float | None = None


# ---------------------------------------------------------------------------
# Accuracy sweep over p
# ---------------------------------------------------------------------------

def _pipeline_accuracy(cloud, kernel: KernelMatrix, seed, kind, restarts) -> ClusteringResult:
    emb = spectral_embedding(kernel, K=2, kind=kind)
    phi2 = emb.vectors[:, 1]
    labels = kmeans(phi2, clusters=2, seed=seed, restarts=restarts)
    return ClusteringResult(labels, accuracy(labels, cloud.labels))


def _path_metric(cloud: PointCloud, p: float) -> DistanceMatrix:
    # p = 1 on the complete graph is exactly the Euclidean matrix
    if p == 1:
        return pairwise_euclidean(cloud)
    cfg = PwspdQueryConfig(p=p, graph=complete_graph(cloud))
    return pwspd_all_pairs(cfg)


def accuracy_vs_p_sweep(
    cloud: PointCloud,
    p_grid,
    seed: int = 0,
    laplacian_kind: str = "symmetric",
    percentile: float = 15.0,
    restarts: int = 8,
) -> np.ndarray:
    """For each p: all-pairs path metric on the complete graph, Gaussian
    kernel at that metric's own 15th-percentile scale, two-eigenvector
    embedding clustered on phi_2 alone, aligned accuracy vs ground truth.

    Returns an (m, 2) array of (p, accuracy) rows. The p = 1 entry uses the
    Euclidean matrix directly (they coincide on complete graphs), so it equals
    the Euclidean spectral-clustering baseline exactly.
    """
    if cloud.labels is None:
        raise ValueError("cloud must carry ground-truth labels")
    out = []
    for p in p_grid:
        dm = _path_metric(cloud, float(p))
        eps = epsilon_percentile(dm, percentile)
        W = gaussian_kernel(dm, eps, a=1.0)
        res = _pipeline_accuracy(cloud, W, seed, laplacian_kind, restarts)
        out.append((float(p), res.accuracy))
        log.info("sweep p=%.3g accuracy=%.4f", p, res.accuracy)
    return np.array(out)


def baseline_accuracy(
    cloud: PointCloud,
    method: str,
    seed: int = 0,
    laplacian_kind: str = "symmetric",
    percentile: float = 15.0,
    self_tuning_k: int = 10,
    alpha: float = 1.0,
    restarts: int = 8,
) -> ClusteringResult:
    """Comparison pipelines: plain Euclidean SC, self-tuning SC, or
    diffusion-normalized SC, sharing the sweep's embedding and K-means."""
    if cloud.labels is None:
        raise ValueError("cloud must carry ground-truth labels")
    if method == "euclidean":
        dm = pairwise_euclidean(cloud)
        W = gaussian_kernel(dm, epsilon_percentile(dm, percentile), a=1.0)
    elif method == "self-tuning":
        W = self_tuning_kernel(cloud, self_tuning_k)
    elif method == "diffusion":
        dm = pairwise_euclidean(cloud)
        W = diffusion_kernel(cloud, epsilon_percentile(dm, percentile), alpha)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _pipeline_accuracy(cloud, W, seed, laplacian_kind, restarts)
