"""Core data types, pairwise distances, powered edge weights, RNG, and I/O."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np


class PointCloudParseError(ValueError):
    """Raised when a point-cloud file cannot be parsed."""


def _freeze(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PointCloud:
    """n points in ambient dimension D with declared intrinsic dimension d.

    labels, when present, hold integer cluster ids per point. Instances are
    immutable after construction and safe to share.
    """

    points: np.ndarray
    intrinsic_dim: int
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be a non-empty 2-D array")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        d = int(self.intrinsic_dim)
        if not 1 <= d <= pts.shape[1]:
            raise ValueError(
                f"intrinsic_dim must be in [1, {pts.shape[1]}], got {d}"
            )
        object.__setattr__(self, "points", _freeze(pts))
        object.__setattr__(self, "intrinsic_dim", d)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (pts.shape[0],):
                raise ValueError("labels must have one entry per point")
            object.__setattr__(self, "labels", _freeze(lab))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass
class DistanceMatrix:
    """Dense symmetric matrix of pairwise metric values.

    metric tags the construction ('euclidean', 'pwspd', 'longest-leg',
    'density-stretched'); p is the power parameter where applicable;
    normalized records whether the n^((p-1)/(p*d)) factor was applied.
    +inf entries mark unreachable pairs (counted in unreachable_pairs).
    """

    values: np.ndarray
    metric: str = "euclidean"
    p: float | None = None
    normalized: bool = False
    unreachable_pairs: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("values must be square")
        if np.isnan(v).any():
            raise ValueError("values must not contain NaN")
        finite = v[np.isfinite(v)]
        if finite.size and finite.min() < 0:
            raise ValueError("values must be nonnegative")
        if np.diagonal(v).any():
            raise ValueError("diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValueError("values must be symmetric")
        self.values = v

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def summary(self) -> dict:
        """JSON-ready summary with a content checksum."""
        return {
            "n": self.n,
            "metric": self.metric,
            "p": self.p,
            "normalized": self.normalized,
            "unreachable_pairs": self.unreachable_pairs,
            "checksum": hashlib.sha256(
                np.ascontiguousarray(self.values).tobytes()
            ).hexdigest(),
        }


@dataclass
class NeighborGraph:
    """Sparse symmetric weighted graph with raw (un-powered) edge lengths.

    Either a kNN graph stored as CSR adjacency, or a complete graph stored as
    the dense length matrix (k == 'complete'). Edges are kept when either
    endpoint lists the other among its k nearest; zero-length edges are
    excluded from kNN graphs, while complete graphs keep duplicate points at
    distance 0.
    """

    n: int
    k: int | str
    indptr: np.ndarray | None = None
    indices: np.ndarray | None = None
    lengths: np.ndarray | None = None
    dense_lengths: np.ndarray | None = None
    metric: str = "euclidean"

    @property
    def is_complete(self) -> bool:
        return self.k == "complete"

    @property
    def num_edges(self) -> int:
        if self.is_complete:
            return self.n * (self.n - 1) // 2
        return int(self.indptr[-1]) // 2

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 3) array of (i, j, length) rows with i < j."""
        if self.is_complete:
            iu = np.triu_indices(self.n, k=1)
            return np.column_stack(
                [iu[0], iu[1], self.dense_lengths[iu]]
            ).astype(np.float64)
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = rows < self.indices
        return np.column_stack(
            [rows[mask], self.indices[mask], self.lengths[mask]]
        ).astype(np.float64)

    def edge_lengths(self) -> np.ndarray:
        """Raw lengths of the canonical (i < j) edge list."""
        if self.is_complete:
            iu = np.triu_indices(self.n, k=1)
            return self.dense_lengths[iu].copy()
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return self.lengths[rows < self.indices].copy()

    def degrees(self) -> np.ndarray:
        if self.is_complete:
            return np.full(self.n, self.n - 1)
        return np.diff(self.indptr)


@dataclass(frozen=True)
class RngHandle:
    """Seed wrapper around numpy's counter-based Philox generator.

    generator(*stream) derives an independent, platform-stable stream from
    (seed, *stream) via SeedSequence, so per-trial randomness is reproducible
    regardless of execution order.
    """

    seed: int
    algorithm: str = "philox"

    def generator(self, *stream: int) -> np.random.Generator:
        ss = np.random.SeedSequence((int(self.seed),) + tuple(int(s) for s in stream))
        return np.random.Generator(np.random.Philox(ss))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    return RngHandle(seed).generator(*stream)


# ---------------------------------------------------------------------------
# Pairwise distances and powered weights
# ---------------------------------------------------------------------------

def pairwise_euclidean(cloud: PointCloud) -> DistanceMatrix:
    """Dense Euclidean distance matrix, computed in row blocks."""
    pts = cloud.points
    n = cloud.n
    out = np.empty((n, n))
    bs = max(1, int(4_000_000 / max(n * cloud.ambient_dim, 1)))
    for a in range(0, n, bs):
        b = min(a + bs, n)
        d2 = ((pts[a:b, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        out[a:b] = np.sqrt(d2)
    np.fill_diagonal(out, 0.0)
    return DistanceMatrix(out, metric="euclidean", p=None)


def complete_graph(source: PointCloud | DistanceMatrix) -> NeighborGraph:
    """Complete graph with raw Euclidean (or user-metric) edge lengths."""
    if isinstance(source, PointCloud):
        dm = pairwise_euclidean(source)
        metric = "euclidean"
    else:
        dm = source
        metric = source.metric
    return NeighborGraph(
        n=dm.n, k="complete", dense_lengths=dm.values, metric=metric
    )


def power_weights(
    graph: NeighborGraph, p: float, allow_nonmetric: bool = False
) -> np.ndarray:
    """Powered weights length**p for the canonical (i < j) edge list.

    p must be >= 1; values 0 < p < 1 are accepted only with
    allow_nonmetric=True (the rooted quantity is then not a metric).
    """
    validate_power(p, allow_nonmetric)
    return graph.edge_lengths() ** p


def validate_power(p: float, allow_nonmetric: bool = False) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 0:
        raise ValueError(f"power p must be finite and positive, got {p}")
    if p < 1 and not allow_nonmetric:
        raise ValueError(
            f"p={p} < 1 does not give a metric; pass allow_nonmetric=True to proceed"
        )
    return p


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

FLOAT_FMT = "%.17g"


def load_point_cloud(
    path, intrinsic_dim: int | None = None, labeled: bool = False
) -> PointCloud:
    """Parse a header-less CSV point cloud (one point per row, comma-separated
    coordinates, optional trailing integer label). '#' lines are skipped."""
    rows = []
    labels = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            ncoord = len(fields) - 1 if labeled else len(fields)
            if ncoord < 1:
                raise PointCloudParseError(
                    f"{path}: line {lineno}: no coordinates"
                )
            if width is None:
                width = ncoord
            elif ncoord != width:
                raise PointCloudParseError(
                    f"{path}: line {lineno}: expected {width} coordinates, got {ncoord}"
                )
            try:
                rows.append([float(f) for f in fields[:width]])
            except ValueError as exc:
                raise PointCloudParseError(
                    f"{path}: line {lineno}: {exc}"
                ) from None
            if labeled:
                try:
                    labels.append(int(fields[-1]))
                except ValueError:
                    raise PointCloudParseError(
                        f"{path}: line {lineno}: label {fields[-1]!r} is not an integer"
                    ) from None
    if not rows:
        raise PointCloudParseError(f"{path}: no data rows")
    pts = np.array(rows, dtype=np.float64)
    if not np.isfinite(pts).all():
        raise PointCloudParseError(f"{path}: non-finite coordinate")
    d = intrinsic_dim if intrinsic_dim is not None else pts.shape[1]
    return PointCloud(pts, d, np.array(labels) if labeled else None)


def save_point_cloud(cloud: PointCloud, path, header: str | None = None) -> None:
    """Write a CSV round-trippable to the same doubles (%.17g formatting)."""
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for i in range(cloud.n):
            coords = ",".join(FLOAT_FMT % v for v in cloud.points[i])
            if cloud.labels is not None:
                fh.write(f"{coords},{cloud.labels[i]}\n")
            else:
                fh.write(coords + "\n")


def save_distance_matrix(dm: DistanceMatrix, path, header: str | None = None) -> None:
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for row in dm.values:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def load_distance_matrix(path, metric="euclidean", p=None, normalized=False) -> DistanceMatrix:
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(f) for f in line.split(",")])
    return DistanceMatrix(
        np.array(rows), metric=metric, p=p, normalized=normalized
    )


def save_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_json(obj))


def dumps_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
