"""kNN search, kNN density estimation, and self-tuning scale extraction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .core import DistanceMatrix, NeighborGraph, PointCloud

# grid-bucketed selection pays off once the full scan gets expensive
GRID_MIN_N = 4096


@dataclass(frozen=True)
class ScaleVector:
    """Per-point distance to the k-th nearest neighbor (self excluded)."""

    sigmas: np.ndarray
    k: int


@dataclass(frozen=True)
class DensityEstimate:
    """kNN density values f(x_i) = k / (n * vol(B_1^d) * sigma_{i,k}^d)."""

    values: np.ndarray
    k: int
    d: int


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def _check_k(k: int, n: int) -> int:
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, n-1] = [1, {n - 1}], got {k}")
    return k


def knn_select(points: np.ndarray, k: int):
    """Exact kNN lists (idx, dist) for a point array, routed to the grid
    accelerator when available and worthwhile."""
    eng = _engine.active()
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if (
        getattr(eng, "HAS_GRID_KNN", False)
        and pts.shape[1] <= 3
        and pts.shape[0] >= GRID_MIN_N
    ):
        return eng.knn_grid_points(pts, k)
    return eng.knn_brute_points(pts, k)


def knn_graph(
    cloud: PointCloud | None,
    k: int,
    metric: DistanceMatrix | str = "euclidean",
) -> NeighborGraph:
    """Symmetric kNN graph: edge {i,j} kept iff j is among the k nearest of i
    or i among the k nearest of j. Raw lengths are stored; an arbitrary
    user-supplied metric matrix is accepted in place of Euclidean distances."""
    eng = _engine.active()
    if isinstance(metric, DistanceMatrix):
        n = metric.n
        _check_k(k, n)
        idx, dst = eng.knn_brute_matrix(
            np.ascontiguousarray(metric.values), k
        )
        graph_metric = metric.metric
    elif metric == "euclidean":
        if cloud is None:
            raise ValueError("cloud required for euclidean metric")
        n = cloud.n
        _check_k(k, n)
        idx, dst = knn_select(cloud.points, k)
        graph_metric = "euclidean"
    else:
        raise ValueError(f"metric must be 'euclidean' or a DistanceMatrix, got {metric!r}")
    indptr, indices, lengths = eng.knn_to_csr(idx, dst, n)
    return NeighborGraph(
        n=n, k=k, indptr=indptr, indices=indices, lengths=lengths,
        metric=graph_metric,
    )


def knn_scales(cloud: PointCloud, k: int) -> ScaleVector:
    """sigma_{i,k}: Euclidean distance from x_i to its k-th nearest neighbor."""
    _check_k(k, cloud.n)
    _, dst = knn_select(cloud.points, k)
    return ScaleVector(sigmas=dst[:, k - 1].copy(), k=k)


def knn_density(cloud: PointCloud, k: int) -> DensityEstimate:
    """kNN density estimator f(x_i) = k / (n * vol(B_1^d) * sigma_{i,k}^d),
    with d the declared intrinsic dimension of the cloud."""
    _check_k(k, cloud.n)
    d = cloud.intrinsic_dim
    sig = knn_scales(cloud, k).sigmas
    zero = np.flatnonzero(sig == 0.0)
    if zero.size:
        raise ValueError(
            f"duplicate point: sigma_{{i,k}} = 0 at index {int(zero[0])}"
        )
    vals = k / (cloud.n * unit_ball_volume(d) * sig**d)
    return DensityEstimate(values=vals, k=k, d=d)
