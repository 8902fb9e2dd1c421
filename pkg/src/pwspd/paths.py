"""Shortest-path engines: powered path distances, longest-leg distances, and
k-nearest queries in the path metric."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .core import DistanceMatrix, NeighborGraph, validate_power

log = logging.getLogger("pwspd")


@dataclass(frozen=True)
class PathResult:
    """One shortest-path answer: value = (sum of leg^p)^(1/p) and the node
    sequence from source to target (empty when unreachable, value +inf)."""

    value: float
    nodes: tuple[int, ...]


@dataclass
class PwspdQueryConfig:
    """Query settings: power p, the graph to search, and the optional
    n^((p-1)/(p*d)) output normalization (needs the intrinsic dimension d)."""

    p: float
    graph: NeighborGraph
    normalize: bool = False
    d: int | None = None
    allow_nonmetric: bool = False

    def __post_init__(self):
        self.p = validate_power(self.p, self.allow_nonmetric)
        if self.normalize and (self.d is None or self.d < 1):
            raise ValueError("normalization requires intrinsic dimension d >= 1")

    @property
    def n(self) -> int:
        return self.graph.n

    def norm_factor(self) -> float:
        if not self.normalize:
            return 1.0
        return float(self.n) ** ((self.p - 1.0) / (self.p * self.d))


# powers beyond this (or extreme magnitudes) rescale lengths by the graph
# maximum before powering; exact up to rounding since l_p is homogeneous
_POW_RESCALE_P = 16.0
_POW_SAFE_DIGITS = 250.0


def pow_scale(max_len: float, p: float) -> float:
    """Length rescale factor preventing overflow/underflow of length**p."""
    if max_len <= 0.0 or not math.isfinite(max_len):
        return 1.0
    if p > _POW_RESCALE_P:
        return max_len
    if abs(p * math.log10(max_len)) > _POW_SAFE_DIGITS:
        return max_len
    return 1.0


def _prep_dense(graph: NeighborGraph, p: float):
    lengths = graph.dense_lengths
    scale = pow_scale(float(lengths.max()), p)
    return (lengths / scale) ** p, scale


def _prep_csr(graph: NeighborGraph, p: float):
    scale = pow_scale(float(graph.lengths.max()) if len(graph.lengths) else 1.0, p)
    return (graph.lengths / scale) ** p, scale


def _root(sums, p: float, scale: float):
    return scale * sums ** (1.0 / p)


def _reconstruct(pred, src, t) -> tuple[int, ...]:
    nodes = [int(t)]
    while nodes[-1] != src:
        prev = int(pred[nodes[-1]])
        if prev < 0:
            return ()
        nodes.append(prev)
    return tuple(reversed(nodes))


def pwspd_single_source(config: PwspdQueryConfig, source: int) -> list[PathResult]:
    """Dijkstra on powered edge weights from one source.

    Values are un-normalized (Eq.-4 scaling applies only to all-pairs
    matrices). Unreachable nodes get value +inf and an empty path.
    """
    g = config.graph
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    eng = _engine.active()
    if g.is_complete:
        w, scale = _prep_dense(g, config.p)
        sums, pred = eng.dijkstra_dense(w, source)
    else:
        w, scale = _prep_csr(g, config.p)
        sums, pred, _ = eng.dijkstra_csr(
            g.indptr, g.indices, w, g.n, source, -1, -1
        )
    vals = _root(sums, config.p, scale)
    out = []
    for t in range(g.n):
        if t == source:
            out.append(PathResult(0.0, (source,)))
        elif not math.isfinite(vals[t]):
            out.append(PathResult(math.inf, ()))
        else:
            out.append(PathResult(float(vals[t]), _reconstruct(pred, source, t)))
    return out


def pwspd_all_pairs(config: PwspdQueryConfig) -> DistanceMatrix:
    """All-pairs path distances, normalized by n^((p-1)/(p*d)) when requested.

    Disconnected graphs yield +inf entries; the count is recorded on the
    result and logged as a warning.
    """
    g = config.graph
    eng = _engine.active()
    if g.is_complete:
        w, scale = _prep_dense(g, config.p)
        sums = eng.dijkstra_dense_ap(w)
    else:
        w, scale = _prep_csr(g, config.p)
        sums = eng.dijkstra_csr_ap(g.indptr, g.indices, w, g.n)
    vals = _root(sums, config.p, scale)
    # forward/backward sums agree to rounding; keep the smaller to restore
    # exact symmetry
    vals = np.minimum(vals, vals.T)
    np.fill_diagonal(vals, 0.0)
    vals *= config.norm_factor()
    bad = int(np.isinf(vals[np.triu_indices(g.n, k=1)]).sum())
    if bad:
        log.warning("pwspd_all_pairs: %d unreachable pairs (+inf)", bad)
    return DistanceMatrix(
        vals,
        metric="pwspd",
        p=config.p,
        normalized=config.normalize,
        unreachable_pairs=bad,
    )


def longest_leg_all_pairs(graph: NeighborGraph) -> DistanceMatrix:
    """Minimax edge length over connecting paths (the p -> inf limit)."""
    eng = _engine.active()
    if graph.is_complete:
        vals = eng.minimax_dense_ap(graph.dense_lengths)
    else:
        vals = eng.minimax_csr_ap(
            graph.indptr, graph.indices, graph.lengths, graph.n
        )
    vals = np.minimum(vals, vals.T)
    np.fill_diagonal(vals, 0.0)
    bad = int(np.isinf(vals[np.triu_indices(graph.n, k=1)]).sum())
    if bad:
        log.warning("longest_leg_all_pairs: %d unreachable pairs (+inf)", bad)
    return DistanceMatrix(
        vals, metric="longest-leg", p=None, unreachable_pairs=bad
    )


def pwspd_knn_query(
    config: PwspdQueryConfig, source: int, k_target: int
) -> list[PathResult]:
    """k nearest nodes to source in the path metric, via Dijkstra stopped
    after k_target settled nodes. Matches the k smallest entries (by value,
    then node index) of the full single-source run."""
    g = config.graph
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    if not 1 <= k_target < g.n:
        raise ValueError(f"k_target must be in [1, n-1], got {k_target}")
    eng = _engine.active()
    if g.is_complete:
        w, scale = _prep_dense(g, config.p)
        sums, pred = eng.dijkstra_dense(w, source)
        done = np.isfinite(sums)
    else:
        w, scale = _prep_csr(g, config.p)
        sums, pred, done = eng.dijkstra_csr(
            g.indptr, g.indices, w, g.n, source, -1, k_target
        )
    vals = _root(sums, config.p, scale)
    settled = [t for t in np.flatnonzero(done) if t != source]
    settled.sort(key=lambda t: (vals[t], t))
    settled = settled[:k_target]
    if len(settled) < k_target:
        log.warning(
            "pwspd_knn_query: only %d of %d requested nodes reachable",
            len(settled), k_target,
        )
    return [
        PathResult(float(vals[t]), _reconstruct(pred, source, t))
        for t in settled
    ]
