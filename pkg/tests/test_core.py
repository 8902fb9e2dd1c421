import numpy as np
import pytest

from pwspd.core import (
    DistanceMatrix,
    PointCloud,
    PointCloudParseError,
    RngHandle,
    complete_graph,
    load_point_cloud,
    load_distance_matrix,
    make_rng,
    pairwise_euclidean,
    power_weights,
    save_distance_matrix,
    save_point_cloud,
    validate_power,
)
from conftest import random_cloud
from oracles import naive_pairwise


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def test_load_basic(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("0,0\n1,0\n0,1\n")
    cloud = load_point_cloud(f, intrinsic_dim=2)
    assert cloud.n == 3 and cloud.ambient_dim == 2
    assert cloud.labels is None


def test_load_labeled(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("0,0,1\n1,1,2\n")
    cloud = load_point_cloud(f, labeled=True)
    assert list(cloud.labels) == [1, 2]
    assert cloud.ambient_dim == 2


def test_load_parse_error_line_number(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("0,abc\n")
    with pytest.raises(PointCloudParseError, match="line 1"):
        load_point_cloud(f)


def test_load_empty(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("")
    with pytest.raises(PointCloudParseError, match="no data"):
        load_point_cloud(f)


def test_load_ragged_row(tmp_path):
    f = tmp_path / "c.csv"
    f.write_text("0,0\n1\n")
    with pytest.raises(PointCloudParseError, match="line 2"):
        load_point_cloud(f)


def test_roundtrip_bit_exact(tmp_path, rng):
    pts = rng.standard_normal((17, 3)) * np.pi
    cloud = PointCloud(pts, 2, labels=rng.integers(0, 3, 17))
    f = tmp_path / "c.csv"
    save_point_cloud(cloud, f, header="demo")
    back = load_point_cloud(f, intrinsic_dim=2, labeled=True)
    assert np.array_equal(back.points, cloud.points)
    assert np.array_equal(back.labels, cloud.labels)


def test_distance_matrix_roundtrip(tmp_path, rng):
    dm = pairwise_euclidean(random_cloud(rng, 12))
    f = tmp_path / "d.csv"
    save_distance_matrix(dm, f)
    back = load_distance_matrix(f)
    assert np.array_equal(back.values, dm.values)


# ---------------------------------------------------------------------------
# PointCloud / DistanceMatrix invariants
# ---------------------------------------------------------------------------

def test_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud(np.empty((0, 2)), 2)
    with pytest.raises(ValueError):
        PointCloud(np.array([[np.inf, 0.0]]), 1)
    with pytest.raises(ValueError):
        PointCloud(np.zeros((3, 2)), 3)  # d > D
    with pytest.raises(ValueError):
        PointCloud(np.zeros((3, 2)), 0)


def test_cloud_immutable(rng):
    cloud = random_cloud(rng, 5)
    with pytest.raises(ValueError):
        cloud.points[0, 0] = 9.0


def test_distance_matrix_validation(rng):
    with pytest.raises(ValueError, match="symmetric"):
        DistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError, match="diagonal"):
        DistanceMatrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError, match="nonnegative"):
        DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_summary_checksum(rng):
    dm = pairwise_euclidean(random_cloud(rng, 8))
    s = dm.summary()
    assert s["n"] == 8 and len(s["checksum"]) == 64
    other = pairwise_euclidean(random_cloud(rng, 8))
    assert other.summary()["checksum"] != s["checksum"]


# ---------------------------------------------------------------------------
# pairwise distances
# ---------------------------------------------------------------------------

def test_pairwise_345():
    cloud = PointCloud(np.array([[0.0, 0.0], [3.0, 4.0]]), 2)
    assert pairwise_euclidean(cloud).values[0, 1] == 5.0


def test_pairwise_single_point():
    cloud = PointCloud(np.array([[2.0, 7.0]]), 2)
    assert pairwise_euclidean(cloud).values.shape == (1, 1)
    assert pairwise_euclidean(cloud).values[0, 0] == 0.0


def test_pairwise_matches_naive(rng):
    cloud = random_cloud(rng, 10, dim=3)
    got = pairwise_euclidean(cloud).values
    ref = naive_pairwise(cloud.points)
    assert np.abs(got - ref).max() <= 1e-12


def test_pairwise_triangle_inequality(rng):
    d = pairwise_euclidean(random_cloud(rng, 60, dim=4)).values
    n = d.shape[0]
    i, j, k = (rng.integers(0, n, 5000) for _ in range(3))
    assert (d[i, j] <= d[i, k] + d[k, j] + 1e-10).all()


def test_pairwise_duplicates_zero():
    cloud = PointCloud(np.array([[1.0, 1.0], [1.0, 1.0]]), 2)
    assert pairwise_euclidean(cloud).values[0, 1] == 0.0


# ---------------------------------------------------------------------------
# powered weights
# ---------------------------------------------------------------------------

def test_power_weights_arithmetic():
    cloud = PointCloud(np.array([[0.0], [2.0]]), 1)
    g = complete_graph(cloud)
    assert power_weights(g, 3.0) == pytest.approx([8.0])
    assert power_weights(g, 1.0) == pytest.approx([2.0])


def test_power_weights_monotone(rng):
    cloud = random_cloud(rng, 25)
    g = complete_graph(cloud)
    lengths = g.edge_lengths()
    w = power_weights(g, 2.5)
    assert np.array_equal(np.argsort(lengths), np.argsort(w))


def test_power_validation():
    with pytest.raises(ValueError):
        validate_power(0.0)
    with pytest.raises(ValueError):
        validate_power(-2.0)
    with pytest.raises(ValueError):
        validate_power(np.inf)
    with pytest.raises(ValueError, match="nonmetric"):
        validate_power(0.5)
    assert validate_power(0.5, allow_nonmetric=True) == 0.5


# ---------------------------------------------------------------------------
# RNG
# ---------------------------------------------------------------------------

def test_rng_reproducible():
    a = RngHandle(123).generator(4, 5).random(8)
    b = RngHandle(123).generator(4, 5).random(8)
    assert np.array_equal(a, b)
    c = RngHandle(123).generator(4, 6).random(8)
    assert not np.array_equal(a, c)
    d = make_rng(124, 4, 5).random(8)
    assert not np.array_equal(a, d)


def test_rng_is_counter_based():
    assert isinstance(RngHandle(0).generator().bit_generator, np.random.Philox)


# ---------------------------------------------------------------------------
# NeighborGraph basics
# ---------------------------------------------------------------------------

def test_complete_graph_edges(rng):
    cloud = random_cloud(rng, 6)
    g = complete_graph(cloud)
    assert g.is_complete and g.num_edges == 15
    arr = g.edge_array()
    assert arr.shape == (15, 3)
    assert (arr[:, 2] >= 0).all()
