"""Synthetic dataset generators, Poisson point process sampling, and the
variance-scaling (fluctuation exponent) estimation pipeline."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import _engine
from .core import PointCloud, RngHandle
from .neighbors import knn_select
from .paths import pow_scale
from .spanner import k_log_coefficient

log = logging.getLogger("pwspd")


# ---------------------------------------------------------------------------
# Synthetic clustering datasets
# ---------------------------------------------------------------------------

DATASET_DEFAULTS = {
    "two-rings": {
        "inner_radius": 1.0,
        "outer_radius": 2.0,
        "points_per_ring": 500,
        "noise": 0.05,
    },
    "long-bottleneck": {
        "disc1_radius": 1.0,
        "disc2_radius": 2.4,
        "center_gap": 6.0,
        "disc1_points": 500,
        "disc2_points": 300,
        "strip_points": 100,
        "strip_halfwidth": 0.1,
    },
    "short-bottleneck": {
        "rect_length": 3.0,
        "rect_height": 0.5,
        "rect1_points": 300,
        "rect2_points": 300,
        "bridge_length": 0.5,
        "bridge_height": 0.5,
        "bridge_points": 50,
    },
}


@dataclass
class DatasetSpec:
    """Named generator configuration; params override the per-name defaults."""

    name: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        if self.name not in DATASET_DEFAULTS:
            raise ValueError(
                f"unknown dataset {self.name!r}; choose from {sorted(DATASET_DEFAULTS)}"
            )
        base = dict(DATASET_DEFAULTS[self.name])
        for key, val in self.params.items():
            if key not in base:
                raise ValueError(f"unknown parameter {key!r} for {self.name}")
            base[key] = val
        for key, val in base.items():
            if not val > 0:
                raise ValueError(f"parameter {key} must be positive, got {val}")
        return base


def _unit_disc(n, rng):
    r = np.sqrt(rng.random(n))
    th = rng.random(n) * 2 * math.pi
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


def _rect(n, x0, y0, w, h, rng):
    return np.column_stack(
        [x0 + rng.random(n) * w, y0 + rng.random(n) * h]
    )


def gen_dataset(spec: DatasetSpec) -> PointCloud:
    """Deterministic labeled 2-D benchmark clouds (seeded Philox streams)."""
    prm = spec.resolved()
    rng = RngHandle(spec.seed).generator(0xDA7A)
    if spec.name == "two-rings":
        m = int(prm["points_per_ring"])
        pts = []
        labels = []
        for lab, rad in enumerate((prm["inner_radius"], prm["outer_radius"])):
            th = rng.random(m) * 2 * math.pi
            rr = rad + rng.normal(0.0, prm["noise"], m)
            pts.append(np.column_stack([rr * np.cos(th), rr * np.sin(th)]))
            labels.append(np.full(m, lab))
    elif spec.name == "long-bottleneck":
        r1 = prm["disc1_radius"]
        r2 = prm["disc2_radius"]
        gap = prm["center_gap"]
        hw = prm["strip_halfwidth"]
        d1 = _unit_disc(int(prm["disc1_points"]), rng) * r1
        d2 = _unit_disc(int(prm["disc2_points"]), rng) * r2 + np.array([gap, 0.0])
        strip = _rect(int(prm["strip_points"]), r1, -hw, gap - r1 - r2, 2 * hw, rng)
        pts = [d1, d2, strip]
        labels = [
            np.zeros(len(d1), np.int64),
            np.ones(len(d2), np.int64),
            (strip[:, 0] > gap / 2).astype(np.int64),
        ]
    elif spec.name == "short-bottleneck":
        # two parallel elongated bars separated by bridge_height, joined by a
        # short dense bridge at the x-center
        L, H = prm["rect_length"], prm["rect_height"]
        bl, bh = prm["bridge_length"], prm["bridge_height"]
        r1 = _rect(int(prm["rect1_points"]), 0.0, 0.0, L, H, rng)
        r2 = _rect(int(prm["rect2_points"]), 0.0, H + bh, L, H, rng)
        bridge = _rect(int(prm["bridge_points"]), (L - bl) / 2, H, bl, bh, rng)
        pts = [r1, r2, bridge]
        mid = H + bh / 2
        labels = [
            np.zeros(len(r1), np.int64),
            np.ones(len(r2), np.int64),
            (bridge[:, 1] > mid).astype(np.int64),
        ]
    else:  # pragma: no cover - resolved() already validated
        raise ValueError(spec.name)
    return PointCloud(
        np.vstack(pts), intrinsic_dim=2, labels=np.concatenate(labels)
    )


# ---------------------------------------------------------------------------
# Poisson point process
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by lo/hi corner coordinates."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("lo and hi must have equal positive length")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("hi must exceed lo in every coordinate")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def volume(self) -> float:
        return float(np.prod([h - l for l, h in zip(self.lo, self.hi)]))


PPP_MEAN_GUARD = 1e8


def sample_ppp(
    intensity: float, region: Box, rng: np.random.Generator
) -> PointCloud:
    """Homogeneous Poisson point process: N ~ Poisson(intensity * |region|)
    followed by N i.i.d. uniform points in the region."""
    if intensity <= 0:
        raise ValueError("intensity must be positive")
    mean = intensity * region.volume()
    if mean >= PPP_MEAN_GUARD:
        raise ValueError(
            f"expected count {mean:.3g} exceeds guard {PPP_MEAN_GUARD:.0e}"
        )
    count = int(rng.poisson(mean))
    if count == 0:
        raise ValueError(
            "Poisson draw produced zero points; increase intensity or region"
        )
    lo = np.array(region.lo, dtype=np.float64)
    hi = np.array(region.hi, dtype=np.float64)
    pts = lo + rng.random((count, region.dim)) * (hi - lo)
    return PointCloud(pts, intrinsic_dim=region.dim)


# ---------------------------------------------------------------------------
# Fluctuation-exponent estimation
# ---------------------------------------------------------------------------

def chi_spanner_k(d: int, p: float, n: int) -> int:
    """k = ceil(1 + 3 (4/(4^(1-1/p)-1))^(d/2) log n): sufficient for the kNN
    graph to reproduce complete-graph path distances w.h.p."""
    return int(math.ceil(1.0 + 3.0 * k_log_coefficient(p, d) * math.log(n)))


@dataclass
class ChiEstimate:
    """Variance-scaling summary: slope m of log Var vs log n and the derived
    fluctuation exponent chi = m*d/2 + 1 with its confidence interval."""

    d: int
    p: float
    n_grid: list[int]
    variances: list[float]
    means: list[float]
    slope: float
    slope_stderr: float
    chi: float
    ci: tuple[float, float]
    trials_per_n: int
    k_per_n: list[int]
    speedup_per_n: list[float]
    residuals: list[float]
    error_trials: int

    def to_dict(self) -> dict:
        def fin(x):
            return x if math.isfinite(x) else None

        return {
            "d": self.d,
            "p": self.p,
            "n_grid": list(self.n_grid),
            "variances": list(self.variances),
            "means": list(self.means),
            "slope": self.slope,
            "slope_stderr": fin(self.slope_stderr),
            "chi": self.chi,
            "ci": [fin(c) for c in self.ci],
            "trials_per_n": self.trials_per_n,
            "k_per_n": list(self.k_per_n),
            "speedup_per_n": list(self.speedup_per_n),
            "residuals": list(self.residuals),
            "error_trials": self.error_trials,
        }


DESK_CHI_N_GRID = (2048, 4096, 8192, 16384)


def _one_chi_sample(pts_extra, d, p, k):
    """Normalized path distance between the two probe points appended to a
    uniform sample, computed in the kNN graph."""
    eng = _engine.active()
    n_tot = pts_extra.shape[0]
    idx, dst = knn_select(pts_extra, k)
    indptr, indices, lens = eng.knn_to_csr(idx, dst, n_tot)
    scale = pow_scale(float(lens.max()), p)
    wpow = (lens / scale) ** p
    sums, _, _ = eng.dijkstra_csr(
        indptr, indices, wpow, n_tot, n_tot - 2, n_tot - 1, -1
    )
    val = sums[n_tot - 1]
    if not math.isfinite(val):
        return math.inf
    return scale * val ** (1.0 / p)


def estimate_chi(
    d: int,
    p: float,
    n_grid,
    trials_per_n: int,
    seed: int,
) -> ChiEstimate:
    """Estimate the fluctuation exponent from the variance of the normalized
    path distance between two fixed interior probe points of the unit cube.

    Per (n, trial): sample n uniform points, append the probes at
    (0.25, 0.5, ...) and (0.75, 0.5, ...), run one early-exit Dijkstra in the
    kNN graph at the sufficient k, and record n^((p-1)/(p d)) * l_p. The
    log-log regression slope m of the per-n variances gives
    chi = m * d / 2 + 1. Per-trial RNG streams derive from
    (seed, n-index, trial), making the estimate order-independent.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if not p > 1:
        raise ValueError("p must be > 1")
    n_grid = [int(v) for v in n_grid]
    if sorted(set(n_grid)) != n_grid or len(n_grid) < 2:
        raise ValueError("n_grid must be strictly ascending with >= 2 sizes")
    if trials_per_n < 2:
        raise ValueError("trials_per_n must be >= 2")
    probes = np.full((2, d), 0.5)
    probes[0, 0] = 0.25
    probes[1, 0] = 0.75
    handle = RngHandle(seed)
    variances = []
    means = []
    k_per_n = []
    errors = 0
    for ni, n in enumerate(n_grid):
        k = chi_spanner_k(d, p, n)
        if k >= n:
            raise ValueError(f"required k = {k} >= n = {n}; grid too small")
        k_per_n.append(k)
        vals = np.empty(trials_per_n)
        for t in range(trials_per_n):
            rng = handle.generator(ni, t)
            pts = np.vstack([rng.random((n, d)), probes])
            val = _one_chi_sample(pts, d, p, k)
            if not math.isfinite(val):
                # disconnected kNN graph: resample once, then record an error
                rng = handle.generator(ni, t, 1)
                pts = np.vstack([rng.random((n, d)), probes])
                val = _one_chi_sample(pts, d, p, k)
                if not math.isfinite(val):
                    errors += 1
                    val = math.nan
            vals[t] = val
        good = vals[np.isfinite(vals)]
        scaled = good * float(n) ** ((p - 1.0) / (p * d))
        variances.append(float(np.var(scaled, ddof=1)))
        means.append(float(np.mean(scaled)))
        log.info(
            "chi n=%d k=%d: mean %.5f var %.3e (%d trials)",
            n, k, means[-1], variances[-1], len(good),
        )
    xs = np.log(np.array(n_grid, dtype=np.float64))
    ys = np.log(np.array(variances))
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * xs + intercept
    resid = ys - fitted
    dof = len(xs) - 2
    if dof > 0:
        se = math.sqrt(float(resid @ resid) / dof / float(((xs - xs.mean()) ** 2).sum()))
        tcrit = float(stats.t.ppf(0.975, dof))
    else:
        se = math.nan
        tcrit = math.nan
    chi = float(slope) * d / 2.0 + 1.0
    ci = (
        (float(slope) - tcrit * se) * d / 2.0 + 1.0,
        (float(slope) + tcrit * se) * d / 2.0 + 1.0,
    )
    return ChiEstimate(
        d=d,
        p=p,
        n_grid=n_grid,
        variances=variances,
        means=means,
        slope=float(slope),
        slope_stderr=float(se),
        chi=chi,
        ci=ci,
        trials_per_n=trials_per_n,
        k_per_n=k_per_n,
        speedup_per_n=[n / k for n, k in zip(n_grid, k_per_n)],
        residuals=[float(r) for r in resid],
        error_trials=errors,
    )
