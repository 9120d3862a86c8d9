"""Document clustering: Lloyd's KMeans and a from-first-principles HDBSCAN.

HDBSCAN proceeds through the classic stages: core distances (distance to
the min_samples-th neighbour), the mutual reachability metric
max(core(a), core(b), d(a, b)), a Prim minimum spanning tree of the
complete mutual-reachability graph, a single-linkage dendrogram over the
MST edges, a condensed tree that prunes components smaller than
min_cluster_size, and excess-of-mass cluster selection by stability
(lambda = 1 / edge weight).  Equal-weight edges are ordered by their
(min index, max index) pair so results are reproducible.

KMeans uses k-means++ seeding, repairs empty clusters by re-seeding at
the point farthest from its assigned centroid, and asserts that the sum
of squared errors never increases across iterations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .reduce import ReducedMatrix

# Stand-in for lambda = 1/0 on zero-weight edges; keeps stability sums finite.
_LAMBDA_CAP = 1e12


class ClusterError(ValueError):
    """Raised for invalid clustering parameters."""


@dataclass
class ClusterAssignment:
    """Cluster labels per item; -1 marks noise (HDBSCAN only)."""

    item_ids: list[str]
    labels: np.ndarray
    k: int
    method: str
    params: dict

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


@dataclass(frozen=True)
class HdbscanParams:
    min_cluster_size: int = 10
    min_samples: int = 5
    metric: str = "euclidean"

    def __post_init__(self) -> None:
        if self.min_samples < 1:
            raise ClusterError("min_samples must be >= 1")
        if self.min_cluster_size < 2:
            raise ClusterError("min_cluster_size must be >= 2")
        if self.metric != "euclidean":
            raise ClusterError("hdbscan supports only the euclidean metric")


def _euclidean_distances(X: np.ndarray) -> np.ndarray:
    # Canonical sqrt(sum of squared differences); bit-for-bit comparable
    # with a per-pair reference computation, unlike the dot-product trick.
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(D, 0.0)
    return D


# --------------------------------------------------------------------------
# KMeans
# --------------------------------------------------------------------------

def _kmeanspp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[rng.integers(n)]
    closest_sq = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest_sq.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=closest_sq / total))
        centroids[c] = X[idx]
        np.minimum(closest_sq, ((X - centroids[c]) ** 2).sum(axis=1), out=closest_sq)
    return centroids


def kmeans(m: ReducedMatrix, k: int, iters: int = 300, seed: int = 42) -> ClusterAssignment:
    """Lloyd's algorithm with k-means++ seeding.

    Runs until no assignment changes or ``iters`` is reached.  An empty
    cluster is repaired by re-seeding its centroid at the point farthest
    from its currently assigned centroid.  The per-iteration SSE trace is
    recorded in ``params["sse_trace"]`` and checked to be non-increasing.

    Raises:
        ClusterError: k > number of rows, or iters < 1.
    """
    X = m.rows
    n = X.shape[0]
    if k > n:
        raise ClusterError(f"k={k} exceeds {n} rows")
    if k < 1 or iters < 1:
        raise ClusterError("k and iters must be positive")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(X, k, rng)

    def assign(C: np.ndarray) -> np.ndarray:
        d = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
        return d.argmin(axis=1)

    def sse(C: np.ndarray, labels: np.ndarray) -> float:
        return float(((X - C[labels]) ** 2).sum())

    labels = assign(centroids)
    trace = [sse(centroids, labels)]

    for _ in range(iters):
        for c in range(k):
            member = labels == c
            if member.any():
                centroids[c] = X[member].mean(axis=0)
        new_labels = assign(centroids)

        for _ in range(k):  # repair empty clusters, at most k of them
            counts = np.bincount(new_labels, minlength=k)
            empty = np.flatnonzero(counts == 0)
            if empty.size == 0:
                break
            residuals = ((X - centroids[new_labels]) ** 2).sum(axis=1)
            centroids[empty[0]] = X[int(residuals.argmax())]
            new_labels = assign(centroids)

        current = sse(centroids, new_labels)
        if current > trace[-1] + 1e-9 * (1.0 + trace[-1]):
            raise RuntimeError(f"kmeans SSE increased: {trace[-1]} -> {current}")
        trace.append(current)

        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    return ClusterAssignment(
        item_ids=list(m.item_ids),
        labels=labels.astype(np.int64),
        k=k,
        method="kmeans",
        params={"k": k, "iters": iters, "seed": seed, "sse_trace": trace},
    )


# --------------------------------------------------------------------------
# HDBSCAN
# --------------------------------------------------------------------------

def core_distance(m: ReducedMatrix, k: int) -> np.ndarray:
    """Euclidean distance from each point to its k-th nearest neighbour
    (self excluded).

    Raises:
        ClusterError: if k >= number of rows.
    """
    n = m.rows.shape[0]
    if not 1 <= k < n:
        raise ClusterError(f"core distance k={k} must be in [1, {n - 1}]")
    D = _euclidean_distances(m.rows)
    return np.sort(D, axis=1)[:, k]  # column 0 is the self distance (0)


def mutual_reachability(a: int, b: int, core: np.ndarray, m: ReducedMatrix) -> float:
    """max(core(a), core(b), d(a, b)) for two distinct point indices."""
    if a == b:
        raise ClusterError("mutual reachability requires two distinct points")
    d = float(np.sqrt(((m.rows[a] - m.rows[b]) ** 2).sum()))
    return max(float(core[a]), float(core[b]), d)


def _mst_mutual_reachability(
    D: np.ndarray, core: np.ndarray
) -> list[tuple[int, int, float]]:
    """Prim's MST over the complete mutual-reachability graph, O(n^2)."""
    n = D.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    reach = np.maximum(np.maximum(core, core[0]), D[0])
    reach[0] = np.inf
    from_node = np.zeros(n, dtype=np.int64)

    edges = []
    for _ in range(n - 1):
        v = int(reach.argmin())
        edges.append((int(from_node[v]), v, float(reach[v])))
        in_tree[v] = True
        reach[v] = np.inf
        candidate = np.maximum(np.maximum(core, core[v]), D[v])
        better = (~in_tree) & (candidate < reach)
        reach[better] = candidate[better]
        from_node[better] = v
    return edges


def _single_linkage(
    edges: list[tuple[int, int, float]], n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Union-find dendrogram. Nodes 0..n-1 are points; node n+i is the
    merge made by the i-th edge (ascending weight, ties by index pair)."""
    order = sorted(edges, key=lambda e: (e[2], min(e[0], e[1]), max(e[0], e[1])))
    parent = list(range(2 * n - 1))
    top = list(range(n))  # component root -> its dendrogram node
    children = np.zeros((n - 1, 2), dtype=np.int64)
    weights = np.zeros(n - 1)
    sizes = np.ones(2 * n - 1, dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, (u, v, w) in enumerate(order):
        ru, rv = find(u), find(v)
        node = n + i
        children[i] = (top[ru], top[rv])
        weights[i] = w
        sizes[node] = sizes[top[ru]] + sizes[top[rv]]
        parent[ru] = node
        parent[rv] = node
        parent[node] = node
        top.append(0)
        top[find(node)] = node
    return children, weights, sizes


def _leaves(node: int, n: int, children: np.ndarray) -> list[int]:
    stack, out = [node], []
    while stack:
        cur = stack.pop()
        if cur < n:
            out.append(cur)
        else:
            stack.extend(children[cur - n])
    return out


def hdbscan(m: ReducedMatrix, p: HdbscanParams | None = None) -> ClusterAssignment:
    """Density-based hierarchical clustering with noise.

    Points that never belong to a selected cluster get label -1.  Labels
    0..k-1 are assigned to selected clusters ordered by size (largest
    first; ties by smallest member index).

    Raises:
        ClusterError: if rows <= min_cluster_size.
    """
    if p is None:
        p = HdbscanParams()
    X = m.rows
    n = X.shape[0]
    if n <= p.min_cluster_size:
        raise ClusterError(
            f"hdbscan needs more than min_cluster_size={p.min_cluster_size} rows, got {n}"
        )

    D = _euclidean_distances(X)
    core = np.sort(D, axis=1)[:, p.min_samples]
    mst = _mst_mutual_reachability(D, core)
    children, weights, sizes = _single_linkage(mst, n)

    # Condensed tree: rows (parent_cluster, child, lambda, size) where child
    # is another cluster or a single point.
    min_size = p.min_cluster_size
    cluster_parent: dict[int, int] = {0: -1}
    cluster_birth: dict[int, float] = {0: 0.0}
    point_rows: list[tuple[int, int, float]] = []  # (cluster, point, lambda)
    cluster_rows: list[tuple[int, int, float, int]] = []  # (parent, child, lambda, size)
    next_cluster = 1

    root_node = 2 * n - 2
    stack = [(0, root_node)]
    while stack:
        cluster, node = stack.pop()
        while True:
            left, right = (int(c) for c in children[node - n])
            w = weights[node - n]
            lam = 1.0 / w if w > 0 else _LAMBDA_CAP
            size_l, size_r = int(sizes[left]), int(sizes[right])

            if size_l >= min_size and size_r >= min_size:
                for child_node, child_size in ((left, size_l), (right, size_r)):
                    cid = next_cluster
                    next_cluster += 1
                    cluster_parent[cid] = cluster
                    cluster_birth[cid] = lam
                    cluster_rows.append((cluster, cid, lam, child_size))
                    stack.append((cid, child_node))
                break
            if size_l < min_size and size_r < min_size:
                for pt in _leaves(left, n, children) + _leaves(right, n, children):
                    point_rows.append((cluster, pt, lam))
                break
            small, big = (left, right) if size_l < min_size else (right, left)
            for pt in _leaves(small, n, children):
                point_rows.append((cluster, pt, lam))
            node = big

    # Stability and excess-of-mass selection (root participates only when
    # it has no child clusters).
    stability = {cid: 0.0 for cid in cluster_parent}
    for cluster, _, lam in point_rows:
        stability[cluster] += lam - cluster_birth[cluster]
    for parent, _, lam, size in cluster_rows:
        stability[parent] += size * (lam - cluster_birth[parent])

    child_clusters: dict[int, list[int]] = {cid: [] for cid in cluster_parent}
    for parent, child, _, _ in cluster_rows:
        child_clusters[parent].append(child)

    if not child_clusters[0]:
        selected = {0}
    else:
        is_candidate: dict[int, bool] = {}
        subtree_value: dict[int, float] = {}
        for cid in sorted(cluster_parent, reverse=True):
            if cid == 0:
                continue
            kids_total = sum(subtree_value[k] for k in child_clusters[cid])
            if not child_clusters[cid] or stability[cid] > kids_total:
                is_candidate[cid] = True
                subtree_value[cid] = stability[cid]
            else:
                is_candidate[cid] = False
                subtree_value[cid] = kids_total
        selected = set()
        frontier = list(child_clusters[0])
        while frontier:
            cid = frontier.pop()
            if is_candidate[cid]:
                selected.add(cid)
            else:
                frontier.extend(child_clusters[cid])

    # Labels: each point fell out of exactly one cluster; walk up to the
    # first selected ancestor (or -1 when none).
    members: dict[int, list[int]] = {cid: [] for cid in selected}
    labels = np.full(n, -1, dtype=np.int64)
    for cluster, pt, _ in point_rows:
        cid = cluster
        while cid != -1 and cid not in selected:
            cid = cluster_parent[cid]
        if cid != -1:
            members[cid].append(pt)

    ordered = sorted(selected, key=lambda c: (-len(members[c]), min(members[c], default=n)))
    for label, cid in enumerate(ordered):
        labels[members[cid]] = label

    return ClusterAssignment(
        item_ids=list(m.item_ids),
        labels=labels,
        k=len(ordered),
        method="hdbscan",
        params={
            "min_cluster_size": p.min_cluster_size,
            "min_samples": p.min_samples,
            "metric": p.metric,
        },
    )


def mst_total_weight(m: ReducedMatrix, min_samples: int) -> float:
    """Total weight of the mutual-reachability MST (for verification)."""
    D = _euclidean_distances(m.rows)
    core = np.sort(D, axis=1)[:, min_samples]
    return float(sum(w for _, _, w in _mst_mutual_reachability(D, core)))
