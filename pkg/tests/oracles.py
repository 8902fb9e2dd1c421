"""Independent reference implementations used to check the library.

Everything here is deliberately written from scratch with different
algorithms than the package (subset-DP path enumeration instead of Dijkstra,
Prim + tree walks instead of minimax search, threshold scan instead of
Lloyd iterations).
"""
import numpy as np
from numba import njit


def naive_pairwise(points):
    """Double-loop Euclidean distances."""
    n = len(points)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for t in range(points.shape[1]):
                s += (points[i, t] - points[j, t]) ** 2
            out[i, j] = s ** 0.5
    return out


@njit(cache=True)
def _enum_source(w, src):
    """Minimum powered path cost from src to every node over all simple
    paths, by dynamic programming over visited-subsets."""
    n = w.shape[0]
    full = 1 << n
    dp = np.full((full, n), np.inf)
    dp[1 << src, src] = 0.0
    best = np.full(n, np.inf)
    best[src] = 0.0
    for mask in range(full):
        if not (mask >> src) & 1:
            continue
        for v in range(n):
            cur = dp[mask, v]
            if cur == np.inf or not (mask >> v) & 1:
                continue
            if cur < best[v]:
                best[v] = cur
            for u in range(n):
                if (mask >> u) & 1:
                    continue
                nxt = cur + w[v, u]
                nm = mask | (1 << u)
                if nxt < dp[nm, u]:
                    dp[nm, u] = nxt
    return best


def enumeration_all_pairs(points, p):
    """Exact min over simple paths of (sum leg^p)^(1/p), all pairs. n <= ~16."""
    d = naive_pairwise(points)
    w = d**p
    n = len(points)
    out = np.zeros((n, n))
    for s in range(n):
        out[s] = _enum_source(w, s) ** (1.0 / p)
    return out


def recursive_enumeration(points, p, src, dst):
    """Literal DFS over every simple path; cross-check for the DP oracle."""
    d = naive_pairwise(points) ** p
    n = len(points)
    best = [np.inf]

    def walk(v, visited, cost):
        if v == dst:
            best[0] = min(best[0], cost)
            return
        for u in range(n):
            if u not in visited:
                walk(u, visited | {u}, cost + d[v, u])

    walk(src, {src}, 0.0)
    return best[0] ** (1.0 / p)


def mst_bottleneck(lengths):
    """Minimax distances via Prim's MST and per-pair max tree edge, from a
    dense symmetric length matrix."""
    d = np.asarray(lengths, dtype=np.float64)
    n = d.shape[0]
    in_tree = np.zeros(n, bool)
    in_tree[0] = True
    cost = d[0].copy()
    parent = np.zeros(n, np.int64)
    edges = []
    for _ in range(n - 1):
        cand = np.where(in_tree, np.inf, cost)
        v = int(np.argmin(cand))
        edges.append((parent[v], v, d[parent[v], v]))
        in_tree[v] = True
        closer = d[v] < cost
        cost[closer] = d[v][closer]
        parent[closer] = v
    adj = [[] for _ in range(n)]
    for a, b, wl in edges:
        adj[a].append((b, wl))
        adj[b].append((a, wl))
    out = np.zeros((n, n))
    for s in range(n):
        seen = np.zeros(n, bool)
        seen[s] = True
        stack = [(s, 0.0)]
        while stack:
            v, mx = stack.pop()
            out[s, v] = mx
            for u, wl in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    stack.append((u, max(mx, wl)))
    return out


def floyd_warshall(weights):
    """All-pairs shortest powered sums by the k-loop recurrence."""
    g = weights.copy().astype(np.float64)
    np.fill_diagonal(g, 0.0)
    n = g.shape[0]
    for k in range(n):
        np.minimum(g, g[:, k, None] + g[None, k, :], out=g)
    return g


def exact_1d_two_means(values):
    """Optimal 2-cluster 1-D k-means cost by scanning all threshold splits."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = len(x)
    pref = np.concatenate([[0.0], np.cumsum(x)])
    pref2 = np.concatenate([[0.0], np.cumsum(x**2)])

    def sse(a, b):  # cost of x[a:b]
        m = b - a
        if m == 0:
            return 0.0
        s = pref[b] - pref[a]
        return pref2[b] - pref2[a] - s * s / m

    return min(sse(0, m) + sse(m, n) for m in range(1, n))


def path_cost(points, nodes, p):
    """Recompute (sum leg^p)^(1/p) along an explicit node sequence."""
    legs = [
        np.linalg.norm(points[a] - points[b])
        for a, b in zip(nodes[:-1], nodes[1:])
    ]
    return float(np.sum(np.asarray(legs) ** p) ** (1.0 / p)) if legs else 0.0
