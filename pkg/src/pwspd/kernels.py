"""Affinity-matrix constructions and the local-equivalence diagnostic.

Gaussian kernels over any metric, the self-tuning kernel with per-point
bandwidths, the degree-normalized diffusion family, and the density-based
stretch of Euclidean distance that path distances locally resemble.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .core import DistanceMatrix, PointCloud, pairwise_euclidean
from .neighbors import DensityEstimate, knn_density, knn_graph, knn_scales
from .paths import pow_scale
from .spanner import theoretical_k_intrinsic, SpannerParams

log = logging.getLogger("pwspd")


@dataclass
class KernelMatrix:
    """Symmetric nonnegative affinity matrix with construction metadata."""

    values: np.ndarray
    kind: str
    epsilon: float | None = None
    k: int | None = None
    alpha: float | None = None
    a: float | None = None
    p: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("kernel must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("kernel must be symmetric")
        if v.min() < 0:
            raise ValueError("kernel must be nonnegative")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]


def epsilon_percentile(dist: DistanceMatrix, percentile: float = 15.0) -> float:
    """Scale parameter: the given percentile of all off-diagonal pairwise
    distances sorted smallest to largest."""
    vals = dist.values[np.triu_indices(dist.n, k=1)]
    if vals.size == 0:
        raise ValueError("need at least two points")
    return float(np.percentile(vals, percentile))


def gaussian_kernel(dist: DistanceMatrix, epsilon: float, a: float = 1.0) -> KernelMatrix:
    """W_ij = exp(-(d_ij / epsilon)^(2a)); a = 1 is the Gaussian kernel.

    The family satisfies h_1(l_p / eps^(1/p)) = h_{1/p}(l_p^p / eps) with
    h_a(x) = exp(-x^(2a)).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if a <= 0:
        raise ValueError("a must be positive")
    w = np.exp(-((dist.values / epsilon) ** (2.0 * a)))
    return KernelMatrix(w, kind="gaussian", epsilon=float(epsilon), a=float(a), p=dist.p)


def self_tuning_kernel(cloud: PointCloud, k: int) -> KernelMatrix:
    """W_ij = exp(-||x_i - x_j||^2 / (sigma_{i,k} sigma_{j,k})) with
    sigma_{i,k} the distance to the k-th nearest neighbor."""
    sig = knn_scales(cloud, k).sigmas
    zero = np.flatnonzero(sig == 0.0)
    if zero.size:
        raise ValueError(
            f"duplicate point: sigma_{{i,k}} = 0 at index {int(zero[0])}"
        )
    d = pairwise_euclidean(cloud).values
    w = np.exp(-(d**2) / np.outer(sig, sig))
    return KernelMatrix(w, kind="self-tuning", k=int(k))


def diffusion_kernel(cloud: PointCloud, epsilon: float, alpha: float) -> KernelMatrix:
    """Degree-normalized Gaussian family
    W_ij = exp(-||x_i-x_j||^2/eps^2) / (d(x_i)^alpha d(x_j)^alpha) with
    d(x_i) the Gaussian row sum; alpha = 0 reproduces the plain Gaussian."""
    base = gaussian_kernel(pairwise_euclidean(cloud), epsilon, a=1.0)
    if alpha == 0:
        return KernelMatrix(
            base.values, kind="diffusion", epsilon=float(epsilon), alpha=0.0
        )
    deg = base.values.sum(axis=1)
    w = base.values / np.outer(deg**alpha, deg**alpha)
    w = np.minimum(w, w.T)  # restore exact symmetry after the outer division
    return KernelMatrix(w, kind="diffusion", epsilon=float(epsilon), alpha=float(alpha))


def density_stretched_distance(
    dist_euclidean: DistanceMatrix,
    density: DensityEstimate,
    p: float,
    d: int,
) -> DistanceMatrix:
    """d_{f,euc}(x,y) = ||x-y|| / (f(x) f(y))^((p-1)/(2d)); the local model of
    the powered path metric. p = 1 returns the input unchanged."""
    f = np.asarray(density.values, dtype=np.float64)
    if (f <= 0).any():
        raise ValueError("density values must be positive")
    if p == 1:
        vals = dist_euclidean.values.copy()
    else:
        expo = (p - 1.0) / (2.0 * d)
        vals = dist_euclidean.values / np.outer(f, f) ** expo
        np.fill_diagonal(vals, 0.0)
    return DistanceMatrix(vals, metric="density-stretched", p=float(p))


@dataclass
class EquivalenceReport:
    """Sandwich diagnostic for the powered path metric vs the density stretch.

    For close pairs, ratio = normalized_lp^p / d_{f,euc} should be nearly
    constant (the unknown discrete-to-continuum constant), between
    rho^-(p-1)/d and rho^+(p-1)/d * (1 + kappa eps^2) after normalizing out
    the constant by the median ratio.
    """

    pairs: np.ndarray
    lpp_values: np.ndarray
    stretched_values: np.ndarray
    ratios: np.ndarray
    normalized_ratios: np.ndarray
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray
    within_bounds: np.ndarray
    rho: np.ndarray
    worst_ratio: float
    cv: float
    skipped_pairs: int


def local_equivalence_report(
    cloud: PointCloud,
    p: float,
    epsilon: float,
    kappa: float,
    pairs,
    density: DensityEstimate | None = None,
    density_k: int = 64,
) -> EquivalenceReport:
    """Check the local sandwich between the normalized powered path metric and
    the density-stretched Euclidean distance on pairs within epsilon.

    Path distances are computed in a kNN graph at the sufficient spanner k;
    rho is estimated as max/min estimated density over the Euclidean
    epsilon-neighborhood of the pair (flat-space simplification). Ratios are
    median-normalized before the bound check since the proportionality
    constant has no closed form.
    """
    n = cloud.n
    d = cloud.intrinsic_dim
    if density is None:
        density = knn_density(cloud, min(density_k, n - 1))
    f = density.values
    pts = cloud.points
    if p > 1:
        k_span = min(n - 1, int(math.ceil(theoretical_k_intrinsic(
            SpannerParams(p=p, d=d, n=n)
        ))))
        graph = knn_graph(cloud, k_span)
        eng = _engine.active()
        scale = pow_scale(float(graph.lengths.max()), p)
        wpow = (graph.lengths / scale) ** p
    norm = float(n) ** ((p - 1.0) / (p * d))

    kept = []
    lpp = []
    dfe = []
    rho = []
    skipped = 0
    for i, j in pairs:
        i, j = int(i), int(j)
        gap = float(np.linalg.norm(pts[i] - pts[j]))
        if gap > epsilon or i == j:
            skipped += 1
            continue
        if p == 1:
            # complete-graph path distance at p = 1 is the Euclidean distance
            lp = gap
        else:
            sums, _, _ = eng.dijkstra_csr(
                graph.indptr, graph.indices, wpow, n, i, j, -1
            )
            if not np.isfinite(sums[j]):
                skipped += 1
                continue
            lp = norm * scale * float(sums[j]) ** (1.0 / p)
        lpp.append(lp**p)
        dfe.append(gap / (f[i] * f[j]) ** ((p - 1.0) / (2.0 * d)))
        near = np.linalg.norm(pts - pts[i], axis=1) <= epsilon
        fn = f[near]
        rho.append(float(fn.max() / fn.min()))
        kept.append((i, j))
    if skipped:
        log.info("local_equivalence_report: skipped %d pairs", skipped)
    if not kept:
        raise ValueError("no usable pairs within epsilon")
    lpp = np.array(lpp)
    dfe = np.array(dfe)
    rho = np.array(rho)
    ratios = lpp / dfe
    med = float(np.median(ratios))
    normalized = ratios / med
    lower = rho ** (-(p - 1.0) / d)
    upper = rho ** ((p - 1.0) / d) * (1.0 + kappa * epsilon**2)
    within = (normalized >= lower) & (normalized <= upper)
    cv = float(normalized.std() / normalized.mean())
    return EquivalenceReport(
        pairs=np.array(kept, dtype=np.int64),
        lpp_values=lpp,
        stretched_values=dfe,
        ratios=ratios,
        normalized_ratios=normalized,
        lower_bounds=lower,
        upper_bounds=upper,
        within_bounds=within,
        rho=rho,
        worst_ratio=float(np.max(np.maximum(normalized / upper, lower / normalized))),
        cv=cv,
        skipped_pairs=skipped,
    )
