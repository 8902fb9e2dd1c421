"""kNN 1-spanner theory and verification: the k(n, p, d) bounds, elongated-set
geometry, critical edges, and the success-fraction heatmap experiment."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .core import PointCloud, RngHandle, pairwise_euclidean
from .neighbors import knn_select
from .paths import pow_scale
from .sampling import sample_distribution

log = logging.getLogger("pwspd")

DEFAULT_TOL = 1e-10

# dense all-pairs reference is cheaper than certified retries below this size
_DENSE_REF_MAX_N = 1200


@dataclass(frozen=True)
class SpannerParams:
    """Inputs to the k bounds: power p > 1, intrinsic dimension d, sample
    size n, ball-regularity constant kappa >= 1, and f_max/f_min >= 1."""

    p: float
    d: int
    n: int
    kappa: float = 1.0
    density_ratio: float = 1.0

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError("p must be > 1 (the bound degenerates at p = 1)")
        if self.d < 1 or self.n < 1:
            raise ValueError("d and n must be positive")
        if self.kappa < 1 or self.density_ratio < 1:
            raise ValueError("kappa and density_ratio must be >= 1")


def k_log_coefficient(p: float, d: int) -> float:
    """The (4 / (4^(1-1/p) - 1))^(d/2) factor multiplying 3*log(n)."""
    if not p > 1:
        raise ValueError("p must be > 1")
    return (4.0 / (4.0 ** (1.0 - 1.0 / p) - 1.0)) ** (d / 2.0)


def theoretical_k_euclidean(params: SpannerParams) -> float:
    """Sufficient k for the kNN graph to be a 1-spanner w.p. >= 1 - 1/n
    (isometrically embedded case). Returns the bound as a real; callers ceil."""
    return (
        1.0
        + params.kappa**2
        * 3.0
        * params.density_ratio
        * k_log_coefficient(params.p, params.d)
        * math.log(params.n)
    )


def theoretical_k_intrinsic(params: SpannerParams) -> float:
    """Limit form of the bound for intrinsic (geodesic) path distances; the
    curvature corrections vanish, leaving the kappa = 1 formula."""
    return (
        1.0
        + 3.0
        * params.density_ratio
        * k_log_coefficient(params.p, params.d)
        * math.log(params.n)
    )


def elongated_ball_radius(s: float, alpha: float, p: float) -> float:
    """Radius of the ball inscribed in the two-hop improvement region
    D_{alpha,p}(x,y) about the midpoint, for ||x-y|| = s.

    Returns 0 when the region has no inscribed ball (alpha^(2/p)/4^(1/p)
    <= 1/4, e.g. p = 1 with alpha = 1).
    """
    if s <= 0:
        raise ValueError("s must be positive")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must be in (0, 1]")
    if p < 1:
        raise ValueError("p must be >= 1")
    val = alpha ** (2.0 / p) / 4.0 ** (1.0 / p) - 0.25
    return s * math.sqrt(max(val, 0.0))


def is_critical_edge(cloud: PointCloud, p: float, i: int, j: int) -> bool:
    """True iff the direct edge {i,j} attains the powered path distance in the
    complete graph within 1e-12 (no strictly shorter multi-hop route)."""
    if i == j:
        raise ValueError("i and j must differ")
    lengths = pairwise_euclidean(cloud).values
    scale = pow_scale(float(lengths.max()), p)
    w = (lengths / scale) ** p
    eng = _engine.active()
    sums, _ = eng.dijkstra_dense(w, i)
    return w[i, j] <= sums[j] + 1e-12


def _knn_lists(cloud: PointCloud, k: int):
    return knn_select(cloud.points, k)


def _scan(eng, idx, dst, k, n, dpow, lengths, p, scale, tol):
    indptr, indices, lens = eng.knn_to_csr(
        np.ascontiguousarray(idx[:, :k]), np.ascontiguousarray(dst[:, :k]), n
    )
    wpow = (lens / scale) ** p
    return eng.spanner_knn_scan(
        indptr, indices, wpow, n, dpow, lengths, p, scale, tol
    )


def _complete_reference(eng, cloud, dpow, lengths, p, scale, k_start):
    """Rooted complete-graph all-pairs distances.

    Uses a dense sweep at small n; otherwise runs the kNN scan at growing k
    until the spanner certificate holds, which proves the sparse distances
    equal the complete-graph ones.
    """
    n = cloud.n
    if n <= _DENSE_REF_MAX_N:
        sums = eng.dijkstra_dense_ap((lengths / scale) ** p)
        return scale * sums ** (1.0 / p)
    k = min(max(k_start, 8), n - 1)
    while True:
        idx, dst = _knn_lists(cloud, k)
        status, _, sums = _scan(
            eng, idx, dst, k, n, dpow, lengths, p, scale, math.inf
        )
        if status == eng.SCAN_CERTIFIED:
            return scale * sums ** (1.0 / p)
        if k >= n - 1:
            # complete graph reached; distances are exact by construction
            return scale * sums ** (1.0 / p)
        k = min(2 * k, n - 1)


def verify_one_spanner(
    cloud: PointCloud, p: float, k: int, tol: float = DEFAULT_TOL
) -> bool:
    """Success iff the kNN-graph path distances match the complete-graph ones
    entrywise within tol (disconnected kNN graphs fail).

    Fast paths: if every kNN distance is <= its direct edge length the graphs
    agree exactly (certificate, success); if some kNN distance exceeds the
    direct length by more than tol the comparison must fail (early exit).
    Only borderline runs compute the complete-graph reference.
    """
    n = cloud.n
    if not 1 <= k < n:
        raise ValueError(f"k must be in [1, n-1], got {k}")
    eng = _engine.active()
    lengths = pairwise_euclidean(cloud).values
    scale = pow_scale(float(lengths.max()), p)
    dpow = (lengths / scale) ** p
    idx, dst = _knn_lists(cloud, k)
    status, _, sums = _scan(eng, idx, dst, k, n, dpow, lengths, p, scale, tol)
    if status == eng.SCAN_CERTIFIED:
        return True
    if status == eng.SCAN_FAILED:
        return False
    ref = _complete_reference(eng, cloud, dpow, lengths, p, scale, 2 * k)
    diff = np.abs(scale * sums ** (1.0 / p) - ref)
    return float(diff.max()) <= tol


@dataclass
class HeatmapResult:
    """Per-cell 1-spanner success fractions over an (n, k) grid, plus the
    fitted transition line k = slope * log(n) + intercept through the first
    all-success k of each column."""

    n_grid: list[int]
    k_grid: list[int]
    success_fraction: np.ndarray
    trials_per_cell: int
    transition_slope: float
    transition_intercept: float
    first_success_k: list[int | None] = field(default_factory=list)
    skipped_columns: int = 0

    def to_dict(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "k_grid": list(self.k_grid),
            "success_fraction": self.success_fraction.tolist(),
            "trials_per_cell": self.trials_per_cell,
            "transition_slope": self.transition_slope,
            "transition_intercept": self.transition_intercept,
            "first_success_k": [
                -1 if k is None else k for k in self.first_success_k
            ],
            "skipped_columns": self.skipped_columns,
        }


DESK_N_GRID = (250, 500, 1000, 2000, 4000)


def default_k_grid(d: int, p: float, n_max: int) -> list[int]:
    """k grid spanning ~1.2x the empirically relevant transition range."""
    hi = max(6, int(round(0.35 * 3 * k_log_coefficient(p, d) * math.log(n_max))))
    step = max(1, hi // 18)
    return list(range(2, hi + step + 1, step))


def _min_success_k(evaluate, n_k: int) -> int | None:
    """Smallest k-grid index with success, exploiting monotonicity in k."""
    if not evaluate(n_k - 1):
        return None
    lo, hi = 0, n_k - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if evaluate(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def spanner_heatmap(
    d: int,
    p: float,
    distribution: str,
    n_grid,
    k_grid,
    trials: int,
    seed: int,
    tol: float = DEFAULT_TOL,
) -> HeatmapResult:
    """Success fraction of the 1-spanner test per (n, k) cell.

    Per trial the minimal successful k is located by bisection over the k
    grid (success is monotone in k: larger k only adds edges), and every
    cell's fraction follows from those minima. Trial RNG streams derive from
    (seed, n-index, trial), so results are independent of execution order.
    """
    n_grid = [int(v) for v in n_grid]
    k_grid = [int(v) for v in k_grid]
    if not n_grid or not k_grid:
        raise ValueError("n_grid and k_grid must be nonempty")
    if sorted(set(n_grid)) != n_grid or sorted(set(k_grid)) != k_grid:
        raise ValueError("grids must be strictly ascending")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    eng = _engine.active()
    handle = RngHandle(seed)
    frac = np.zeros((len(n_grid), len(k_grid)))
    first_k: list[int | None] = []
    for ni, n in enumerate(n_grid):
        if k_grid[0] >= n:
            raise ValueError(f"k grid starts at {k_grid[0]} >= n = {n}")
        kmax = min(k_grid[-1], n - 1)
        usable = [k for k in k_grid if k <= kmax]
        min_idx = np.full(trials, len(k_grid), dtype=int)
        for t in range(trials):
            cloud = sample_distribution(distribution, n, d, handle.generator(ni, t))
            lengths = pairwise_euclidean(cloud).values
            scale = pow_scale(float(lengths.max()), p)
            dpow = (lengths / scale) ** p
            idx, dst = _knn_lists(cloud, usable[-1])
            cache: dict[int, bool] = {}
            ref: list[np.ndarray | None] = [None]

            def evaluate(ki: int) -> bool:
                if ki in cache:
                    return cache[ki]
                k = usable[ki]
                status, _, sums = _scan(
                    eng, idx, dst, k, n, dpow, lengths, p, scale, tol
                )
                if status == eng.SCAN_CERTIFIED:
                    ok = True
                elif status == eng.SCAN_FAILED:
                    ok = False
                else:
                    if ref[0] is None:
                        ref[0] = _complete_reference(
                            eng, cloud, dpow, lengths, p, scale, 2 * usable[-1]
                        )
                    diff = np.abs(scale * sums ** (1.0 / p) - ref[0])
                    ok = float(diff.max()) <= tol
                cache[ki] = ok
                return ok

            got = _min_success_k(evaluate, len(usable))
            min_idx[t] = got if got is not None else len(k_grid)
            log.debug("heatmap n=%d trial %d: min k index %s", n, t, got)
        for ki in range(len(usable)):
            frac[ni, ki] = float((min_idx <= ki).mean())
        # grid cells with k >= n are complete graphs, always successful
        frac[ni, len(usable):] = 1.0
        all_ok = [ki for ki in range(len(usable)) if (min_idx <= ki).all()]
        first_k.append(k_grid[all_ok[0]] if all_ok else None)
        log.info(
            "heatmap column n=%d done (first all-success k: %s)",
            n, first_k[-1],
        )
    xs = [math.log(n) for n, fk in zip(n_grid, first_k) if fk is not None]
    ys = [fk for fk in first_k if fk is not None]
    skipped = len(n_grid) - len(xs)
    if len(xs) >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
    else:
        slope, intercept = math.nan, math.nan
    return HeatmapResult(
        n_grid=n_grid,
        k_grid=k_grid,
        success_fraction=frac,
        trials_per_cell=trials,
        transition_slope=float(slope),
        transition_intercept=float(intercept),
        first_success_k=first_k,
        skipped_columns=skipped,
    )
