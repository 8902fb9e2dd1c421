"""Pure-numpy fallback kernels, contract-identical to the numba versions.

Selected with PWSPD_BACKEND=numpy (or automatically when numba is missing).
Slower, but useful for debugging and as a reference in the backend benchmark.
Tie-breaking matches the numba engine: ascending (distance, index) order in
kNN selection, lowest-index winners in Dijkstra.
"""
import heapq

import numpy as np

HAS_GRID_KNN = False


def _block_size(n, dim):
    return max(1, int(4_000_000 / max(n * max(dim, 1), 1)))


def knn_brute_points(pts, k):
    """Exact kNN by blocked full scan; rows sorted ascending by (dist, index)."""
    n, dim = pts.shape
    idx = np.empty((n, k), np.int64)
    dst = np.empty((n, k), np.float64)
    bs = _block_size(n, dim)
    for a in range(0, n, bs):
        b = min(a + bs, n)
        d2 = ((pts[a:b, None, :] - pts[None, :, :]) ** 2).sum(axis=-1)
        d2[np.arange(b - a), np.arange(a, b)] = np.inf
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        idx[a:b] = order
        dst[a:b] = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return idx, dst


def knn_brute_matrix(dmat, k):
    n = dmat.shape[0]
    d = dmat.copy()
    np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")[:, :k]
    return order.astype(np.int64), np.take_along_axis(d, order, axis=1)


def knn_to_csr(idx, dst, n):
    """Symmetric-union CSR adjacency from kNN lists; zero-length edges dropped."""
    k = idx.shape[1]
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    cols = idx.ravel().astype(np.int64)
    lens = dst.ravel()
    keep = lens > 0.0
    rows, cols, lens = rows[keep], cols[keep], lens[keep]
    r2 = np.concatenate([rows, cols])
    c2 = np.concatenate([cols, rows])
    l2 = np.concatenate([lens, lens])
    order = np.lexsort((c2, r2))
    r2, c2, l2 = r2[order], c2[order], l2[order]
    if len(r2):
        first = np.ones(len(r2), bool)
        first[1:] = (r2[1:] != r2[:-1]) | (c2[1:] != c2[:-1])
        r2, c2, l2 = r2[first], c2[first], l2[first]
    indptr = np.zeros(n + 1, np.int64)
    np.add.at(indptr, r2 + 1, 1)
    return np.cumsum(indptr), c2, l2


def _dense_sweep(w, src, minimax):
    n = w.shape[0]
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, np.int64)
    done = np.zeros(n, bool)
    dist[src] = 0.0
    masked = np.empty(n)
    for _ in range(n):
        np.copyto(masked, dist)
        masked[done] = np.inf
        u = int(np.argmin(masked))
        if masked[u] == np.inf:
            break
        done[u] = True
        if minimax:
            nd = np.maximum(dist[u], w[u])
        else:
            nd = dist[u] + w[u]
        nd[u] = np.inf
        better = nd < dist
        tie = (nd == dist) & (pred >= 0) & (u < pred) & np.isfinite(nd)
        dist[better] = nd[better]
        pred[better | tie] = u
    return dist, pred


def dijkstra_dense(w, src):
    return _dense_sweep(w, src, False)


def dijkstra_dense_ap(w):
    n = w.shape[0]
    out = np.empty((n, n))
    for s in range(n):
        out[s] = _dense_sweep(w, s, False)[0]
    return out


def minimax_dense(lengths, src):
    return _dense_sweep(lengths, src, True)


def minimax_dense_ap(lengths):
    n = lengths.shape[0]
    out = np.empty((n, n))
    for s in range(n):
        out[s] = _dense_sweep(lengths, s, True)[0]
    return out


def _csr_sweep(indptr, indices, w, n, src, target, stop_after, minimax):
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, np.int64)
    done = np.zeros(n, bool)
    dist[src] = 0.0
    heap = [(0.0, src)]
    settled = 0
    while heap:
        d0, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u != src:
            settled += 1
        if u == target:
            break
        if stop_after > 0 and settled >= stop_after:
            break
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            nd = max(d0, w[e]) if minimax else d0 + w[e]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and pred[v] >= 0 and u < pred[v]:
                pred[v] = u
    return dist, pred, done


def dijkstra_csr(indptr, indices, w, n, src, target, stop_after):
    return _csr_sweep(indptr, indices, w, n, src, target, stop_after, False)


def dijkstra_csr_ap(indptr, indices, w, n):
    out = np.empty((n, n))
    for s in range(n):
        out[s] = _csr_sweep(indptr, indices, w, n, s, -1, -1, False)[0]
    return out


def minimax_csr(indptr, indices, w, n, src):
    dist, pred, _ = _csr_sweep(indptr, indices, w, n, src, -1, -1, True)
    return dist, pred


def minimax_csr_ap(indptr, indices, w, n):
    out = np.empty((n, n))
    for s in range(n):
        out[s] = _csr_sweep(indptr, indices, w, n, s, -1, -1, True)[0]
    return out


SCAN_CERTIFIED = 0
SCAN_UNDECIDED = 1
SCAN_FAILED = 2


def spanner_knn_scan(indptr, indices, wpow, n, dpow, lengths, p, scale, tol):
    """See the numba engine for the certificate logic; semantics identical."""
    out = np.empty((n, n))
    certified = True
    worst = 0.0
    for s in range(n):
        dist, _, _ = _csr_sweep(indptr, indices, wpow, n, s, -1, -1, False)
        out[s] = dist
        row = dist.copy()
        row[s] = 0.0
        bad = row > dpow[s]
        if bad.any():
            certified = False
            if np.isinf(row[bad]).any():
                return SCAN_FAILED, np.inf, out
            gap = (scale * row[bad] ** (1.0 / p) - lengths[s, bad]).max()
            worst = max(worst, gap)
            if worst > tol:
                return SCAN_FAILED, worst, out
    if certified:
        return SCAN_CERTIFIED, 0.0, out
    return SCAN_UNDECIDED, worst, out
