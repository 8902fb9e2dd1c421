import math

import numpy as np
import pytest
from scipy.optimize import brentq

from pwspd import _engine
from pwspd.core import PointCloud, pairwise_euclidean
from pwspd.spanner import (
    SpannerParams,
    default_k_grid,
    elongated_ball_radius,
    is_critical_edge,
    spanner_heatmap,
    theoretical_k_euclidean,
    theoretical_k_intrinsic,
    verify_one_spanner,
)
from conftest import random_cloud
from oracles import enumeration_all_pairs, naive_pairwise


def line_cloud(*xs):
    return PointCloud(np.array(xs, dtype=float)[:, None], 1)


# ---------------------------------------------------------------------------
# k bounds
# ---------------------------------------------------------------------------

def coefficient(p, d):
    params = SpannerParams(p=p, d=d, n=math.e)
    return theoretical_k_euclidean(params) - 1.0


def test_paper_slope_coefficients():
    assert coefficient(1.5, 5) == pytest.approx(363.02, rel=0.005)
    assert coefficient(2.0, 5) == pytest.approx(96.0, rel=0.005)
    assert coefficient(10.0, 5) == pytest.approx(9.89, rel=0.005)


def test_intrinsic_formula():
    assert theoretical_k_intrinsic(
        SpannerParams(p=2.0, d=2, n=math.e)
    ) == pytest.approx(13.0, abs=1e-9)
    # kappa does not enter the intrinsic limit form
    assert theoretical_k_intrinsic(
        SpannerParams(p=2.0, d=2, n=math.e, kappa=3.0)
    ) == pytest.approx(13.0, abs=1e-9)


def test_large_p_limit_coefficient():
    # 4^(1-1/p) -> 4, so the log coefficient tends to 3 * (4/3)^(d/2)
    got = theoretical_k_intrinsic(SpannerParams(p=1e9, d=4, n=math.e)) - 1.0
    assert got == pytest.approx(3 * (4.0 / 3.0) ** 2, rel=1e-6)


def test_k_formula_monotonicity():
    base = SpannerParams(p=2.0, d=3, n=1000)
    assert theoretical_k_euclidean(
        SpannerParams(p=1.5, d=3, n=1000)
    ) > theoretical_k_euclidean(base) > theoretical_k_euclidean(
        SpannerParams(p=10.0, d=3, n=1000)
    )
    assert theoretical_k_euclidean(SpannerParams(p=2.0, d=4, n=1000)) > \
        theoretical_k_euclidean(base)
    assert theoretical_k_euclidean(
        SpannerParams(p=2.0, d=3, n=1000, kappa=2.0)
    ) > theoretical_k_euclidean(base)
    assert theoretical_k_euclidean(
        SpannerParams(p=2.0, d=3, n=1000, density_ratio=2.0)
    ) > theoretical_k_euclidean(base)


def test_k_formula_rejects_p1():
    with pytest.raises(ValueError):
        SpannerParams(p=1.0, d=2, n=10)


# ---------------------------------------------------------------------------
# elongated-set geometry
# ---------------------------------------------------------------------------

def test_ball_radius_p2():
    assert elongated_ball_radius(1.0, 1.0, 2.0) == pytest.approx(0.5)


def test_ball_radius_large_p():
    assert elongated_ball_radius(1.0, 1.0, 1e6) == pytest.approx(
        math.sqrt(3) / 2, abs=1e-4
    )


def test_ball_radius_degenerate():
    assert elongated_ball_radius(1.0, 1.0, 1.0) == 0.0
    assert elongated_ball_radius(2.0, 0.1, 1.5) == 0.0


def test_ball_radius_matches_boundary_root():
    # solve the boundary equation at polar angle pi/2 by root-finding
    s, alpha, p = 2.0, 1.0, 3.0
    f = lambda r: 2.0 * (r * r + s * s / 4.0) ** (p / 2.0) - alpha * s**p
    root = brentq(f, 0.0, s, xtol=1e-13)
    assert elongated_ball_radius(s, alpha, p) == pytest.approx(root, abs=1e-9)


def test_ball_radius_monotone():
    alphas = np.linspace(0.3, 1.0, 8)
    vals = [elongated_ball_radius(1.0, a, 2.0) for a in alphas]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    ps = [1.0, 1.5, 2.0, 4.0, 16.0]
    vals = [elongated_ball_radius(1.0, 1.0, p) for p in ps]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_ball_radius_validation():
    with pytest.raises(ValueError):
        elongated_ball_radius(0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        elongated_ball_radius(1.0, 1.5, 2.0)
    with pytest.raises(ValueError):
        elongated_ball_radius(1.0, 1.0, 0.5)


# ---------------------------------------------------------------------------
# critical edges
# ---------------------------------------------------------------------------

def test_critical_edge_collinear():
    cloud = line_cloud(0, 1, 2)
    assert not is_critical_edge(cloud, 2.0, 0, 2)
    assert is_critical_edge(cloud, 2.0, 0, 1)
    with pytest.raises(ValueError):
        is_critical_edge(cloud, 2.0, 1, 1)


def test_critical_edges_match_enumeration(rng):
    cloud = random_cloud(rng, 9, dim=2)
    p = 2.5
    ref = enumeration_all_pairs(cloud.points, p)
    direct = naive_pairwise(cloud.points)
    for i in range(9):
        for j in range(i + 1, 9):
            expected = direct[i, j] ** p <= ref[i, j] ** p + 1e-12
            assert is_critical_edge(cloud, p, i, j) == expected


def test_critical_edge_removal_changes_distance(rng):
    cloud = random_cloud(rng, 12)
    p = 2.0
    d = pairwise_euclidean(cloud).values
    w = d**p
    eng = _engine.active()
    base = eng.dijkstra_dense_ap(w)
    crit = [
        (i, j)
        for i in range(12)
        for j in range(i + 1, 12)
        if is_critical_edge(cloud, p, i, j)
    ]
    assert crit
    for i, j in crit:
        w2 = w.copy()
        w2[i, j] = w2[j, i] = np.inf
        got = eng.dijkstra_dense(w2, i)[0][j]
        assert got > base[i, j] + 1e-13


# ---------------------------------------------------------------------------
# spanner verification
# ---------------------------------------------------------------------------

def test_verify_complete_always_success(rng):
    cloud = random_cloud(rng, 15)
    assert verify_one_spanner(cloud, 2.0, 14)


def test_verify_collinear_chain():
    assert verify_one_spanner(line_cloud(0, 1, 2), 2.0, 1)


def test_verify_detects_failure():
    # two clusters with k=1: the kNN graph misses the inter-cluster edge
    pts = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 0.0], [5.1, 0.0]])
    assert not verify_one_spanner(PointCloud(pts, 2), 2.0, 1)


def test_verify_monte_carlo(rng):
    n = 300
    k = math.ceil(theoretical_k_euclidean(SpannerParams(p=2.0, d=2, n=n)))
    wins = sum(
        verify_one_spanner(random_cloud(rng, n), 2.0, k) for _ in range(20)
    )
    assert wins >= 19


def test_verify_monotone_in_k(rng):
    cloud = random_cloud(rng, 80)
    results = [verify_one_spanner(cloud, 2.0, k) for k in range(2, 30, 3)]
    # once success appears it must persist for larger k
    first = results.index(True)
    assert all(results[first:])


def test_verify_matches_bruteforce_reference(rng):
    # cross-check the certificate fast path against a dense two-sided check
    eng = _engine.active()
    for trial in range(6):
        cloud = random_cloud(rng, 40)
        p = (1.5, 2.0, 6.0)[trial % 3]
        d = pairwise_euclidean(cloud).values
        full = eng.dijkstra_dense_ap(d**p) ** (1.0 / p)
        for k in (2, 5, 12):
            from pwspd.neighbors import knn_graph
            from pwspd.paths import PwspdQueryConfig, pwspd_all_pairs

            sub = pwspd_all_pairs(
                PwspdQueryConfig(p=p, graph=knn_graph(cloud, k))
            ).values
            expected = bool(np.max(np.abs(sub - full)) <= 1e-10)
            assert verify_one_spanner(cloud, p, k) == expected


# ---------------------------------------------------------------------------
# heatmap
# ---------------------------------------------------------------------------

def test_heatmap_degenerate_grid(rng):
    hm = spanner_heatmap(
        d=2, p=2.0, distribution="uniform-cube",
        n_grid=[20, 30], k_grid=[19], trials=4, seed=9,
    )
    assert (hm.success_fraction == 1.0).all()
    assert hm.first_success_k == [19, 19]


def test_heatmap_small(rng):
    hm = spanner_heatmap(
        d=2, p=2.0, distribution="uniform-cube",
        n_grid=[40, 80], k_grid=[2, 6, 10, 16, 24, 39], trials=6, seed=4,
    )
    assert hm.success_fraction.shape == (2, 6)
    assert ((hm.success_fraction >= 0) & (hm.success_fraction <= 1)).all()
    # success fraction is monotone in k per column
    assert (np.diff(hm.success_fraction, axis=1) >= 0).all()
    assert hm.success_fraction[:, -1].min() == 1.0
    assert hm.skipped_columns == 0
    assert math.isfinite(hm.transition_slope)


def test_heatmap_distributions(rng):
    for dist in ("sphere", "gaussian"):
        hm = spanner_heatmap(
            d=2, p=2.0, distribution=dist,
            n_grid=[40], k_grid=[4, 12, 39], trials=3, seed=2,
        )
        assert hm.success_fraction[0, -1] == 1.0


def test_heatmap_validation():
    with pytest.raises(ValueError):
        spanner_heatmap(2, 2.0, "uniform-cube", [], [2], 3, 0)
    with pytest.raises(ValueError):
        spanner_heatmap(2, 2.0, "uniform-cube", [30, 20], [2], 3, 0)
    with pytest.raises(ValueError):
        spanner_heatmap(2, 2.0, "nope", [20], [2], 3, 0)


def test_default_k_grid():
    grid = default_k_grid(3, 2.0, 2000)
    assert grid[0] >= 1 and all(b > a for a, b in zip(grid, grid[1:]))
