import numpy as np
import pytest

from pwspd.kernels import KernelMatrix
from pwspd.spectral import (
    accuracy,
    accuracy_vs_p_sweep,
    baseline_accuracy,
    embed,
    kmeans,
    laplacian,
    spectral_embedding,
)
from pwspd.experiments import DatasetSpec, gen_dataset
from conftest import random_cloud
from oracles import exact_1d_two_means


def random_kernel(rng, n):
    w = rng.random((n, n))
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 1.0)
    return w


# ---------------------------------------------------------------------------
# Laplacians
# ---------------------------------------------------------------------------

def test_laplacian_row_sums(rng):
    L = laplacian(random_kernel(rng, 12), "unnormalized")
    assert np.abs(L.sum(axis=1)).max() <= 1e-12


def test_laplacian_two_node():
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    L = laplacian(w, "unnormalized")
    assert np.array_equal(L, np.array([[1.0, -1.0], [-1.0, 1.0]]))
    vals = np.linalg.eigvalsh(L)
    assert vals == pytest.approx([0.0, 2.0], abs=1e-12)


def test_laplacian_similarity(rng):
    w = random_kernel(rng, 15)
    deg = w.sum(axis=1)
    lsym = laplacian(w, "symmetric")
    lrw = laplacian(w, "random-walk")
    lhs = np.diag(np.sqrt(deg)) @ lrw @ np.diag(1.0 / np.sqrt(deg))
    assert np.abs(lhs - lsym).max() <= 1e-10


def test_laplacian_zero_degree():
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 1.0
    with pytest.raises(ValueError, match="index 2"):
        laplacian(w, "unnormalized")


def test_laplacian_kind_validation(rng):
    with pytest.raises(ValueError):
        laplacian(random_kernel(rng, 4), "bogus")


# ---------------------------------------------------------------------------
# embedding
# ---------------------------------------------------------------------------

def path_graph_weights(n):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = 1.0
    return w


def test_embed_path_graph():
    L = laplacian(path_graph_weights(3), "unnormalized")
    emb = embed(L, 2)
    assert emb.eigenvalues == pytest.approx([0.0, 1.0], abs=1e-10)
    full = np.linalg.eigvalsh(L)
    assert full == pytest.approx([0.0, 1.0, 3.0], abs=1e-10)


def test_embed_constant_first_vector(rng):
    w = random_kernel(rng, 20)
    L = laplacian(w, "unnormalized")
    emb = embed(L, 3)
    phi1 = emb.vectors[:, 0]
    assert np.abs(L @ phi1).max() <= 1e-8
    assert phi1.std() <= 1e-8
    resid = L @ emb.vectors - emb.vectors * emb.eigenvalues
    assert np.linalg.norm(resid, axis=0).max() <= 1e-8


def test_embed_disconnected_components(rng):
    w = np.zeros((6, 6))
    w[:3, :3] = random_kernel(rng, 3)
    w[3:, 3:] = random_kernel(rng, 3)
    L = laplacian(w, "unnormalized")
    emb = embed(L, 3)
    assert emb.eigenvalues[:2] == pytest.approx([0.0, 0.0], abs=1e-10)
    # zero-eigenspace is spanned by component indicators
    for j in range(2):
        v = emb.vectors[:, j]
        assert v[:3].std() <= 1e-8 and v[3:].std() <= 1e-8


def test_embed_sign_deterministic(rng):
    w = random_kernel(rng, 10)
    e1 = embed(laplacian(w, "symmetric"), 4)
    e2 = embed(laplacian(w, "symmetric"), 4)
    assert np.array_equal(e1.vectors, e2.vectors)
    for j in range(4):
        v = e1.vectors[:, j]
        assert v[np.argmax(np.abs(v))] > 0


def test_embed_requires_symmetric(rng):
    w = random_kernel(rng, 8)
    with pytest.raises(ValueError):
        embed(laplacian(w, "random-walk"), 2)


def test_rw_embedding_eigenvalues(rng):
    w = random_kernel(rng, 25)
    emb = spectral_embedding(KernelMatrix(w, kind="test"), 5, kind="random-walk")
    assert (emb.eigenvalues >= -1e-10).all()
    assert (emb.eigenvalues <= 2.0 + 1e-10).all()
    # columns are unit vectors and satisfy the RW eigen equation
    lrw = laplacian(w, "random-walk")
    resid = lrw @ emb.vectors - emb.vectors * emb.eigenvalues
    assert np.abs(resid).max() <= 1e-8


# ---------------------------------------------------------------------------
# k-means
# ---------------------------------------------------------------------------

def test_kmeans_two_blobs(rng):
    x = np.concatenate([rng.normal(0, 0.1, 40), rng.normal(10, 0.1, 40)])
    labels = kmeans(x, 2, seed=1)
    assert accuracy(labels, np.repeat([0, 1], 40)) == 1.0


def test_kmeans_degenerate():
    labels = kmeans(np.zeros(12), 2, seed=0)
    # all points identical: single effective cluster, zero cost
    _, cost, _ = kmeans(np.zeros(12), 2, seed=0, return_history=True)
    assert cost == 0.0
    assert len(set(labels.tolist())) >= 1


def test_kmeans_matches_exact_1d(rng):
    # bimodal data: restarts reliably land in the global basin
    x = np.concatenate([rng.standard_normal(100), rng.standard_normal(100) + 6.0])
    _, cost, _ = kmeans(x, 2, seed=3, restarts=12, return_history=True)
    assert cost == pytest.approx(exact_1d_two_means(x), abs=1e-9)


def test_kmeans_objective_monotone(rng):
    x = rng.standard_normal((150, 2))
    _, _, history = kmeans(x, 3, seed=5, return_history=True)
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_kmeans_deterministic(rng):
    x = rng.standard_normal((60, 2))
    a = kmeans(x, 3, seed=11)
    b = kmeans(x, 3, seed=11)
    assert np.array_equal(a, b)


def test_kmeans_empty_cluster_rescue():
    from pwspd.spectral import _lloyd

    # two tight blobs but three centers, two of them coincident far away:
    # one center must go empty and be re-seeded from the farthest point
    X = np.concatenate([np.zeros(10), np.ones(10) * 2.0])[:, None]
    centers = np.array([[0.0], [50.0], [50.0]])
    labels, cost, history = _lloyd(X, centers.copy())
    assert len(set(labels.tolist())) >= 2
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_kmeans_validation(rng):
    with pytest.raises(ValueError):
        kmeans(np.zeros(5), 1, seed=0)
    with pytest.raises(ValueError):
        kmeans(np.zeros(5), 2, seed=0, restarts=0)


# ---------------------------------------------------------------------------
# accuracy
# ---------------------------------------------------------------------------

def test_accuracy_basics():
    truth = np.array([0, 0, 1, 1])
    assert accuracy(truth, truth) == 1.0
    assert accuracy(1 - truth, truth) == 1.0
    half = np.array([0, 1, 0, 1])
    assert accuracy(half, truth) == 0.5


def test_accuracy_permutation_invariant(rng):
    truth = rng.integers(0, 3, 30)
    labels = rng.integers(0, 3, 30)
    base = accuracy(labels, truth)
    remap = {0: 2, 1: 0, 2: 1}
    relabeled = np.array([remap[v] for v in labels])
    assert accuracy(relabeled, truth) == base
    assert accuracy(truth, labels) == base
    assert (accuracy(labels, truth) == 1.0) == bool(
        base == 1.0
    )


def test_accuracy_rejects_many_labels():
    with pytest.raises(ValueError):
        accuracy(np.arange(7), np.arange(7))


def test_accuracy_balanced_lower_bound(rng):
    truth = np.repeat([0, 1, 2], 20)
    labels = rng.integers(0, 3, 60)
    assert accuracy(labels, truth) >= 1.0 / 3.0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def test_sweep_p1_equals_baseline():
    cloud = gen_dataset(
        DatasetSpec(name="two-rings", seed=5, params={"points_per_ring": 120})
    )
    sweep = accuracy_vs_p_sweep(cloud, [1.0, 2.0], seed=3)
    base = baseline_accuracy(cloud, "euclidean", seed=3)
    assert sweep[0][1] == base.accuracy
    assert sweep.shape == (2, 2)


def test_sweep_requires_labels(rng):
    with pytest.raises(ValueError):
        accuracy_vs_p_sweep(random_cloud(rng, 10), [1.0], seed=0)


def test_baselines_run():
    cloud = gen_dataset(
        DatasetSpec(name="two-rings", seed=5, params={"points_per_ring": 100})
    )
    for method in ("euclidean", "self-tuning", "diffusion"):
        res = baseline_accuracy(cloud, method, seed=1)
        assert 0.0 <= res.accuracy <= 1.0
    with pytest.raises(ValueError):
        baseline_accuracy(cloud, "nope", seed=1)
