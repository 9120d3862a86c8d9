"""Dimensionality reduction: exact PCA and a deterministic UMAP.

The UMAP here is a self-contained, reproducible variant of the reference
algorithm: exact brute-force nearest neighbours (corpora here are small),
smooth-kernel graph construction with a 64-iteration bisection per point,
probabilistic-sum symmetrization, spectral initialization from the
normalized graph Laplacian (seeded uniform noise when the kNN graph is
disconnected), and a sequential stochastic gradient layout whose random
draws come from a counter-based generator so that identical seeds give
bit-identical layouts on every platform.

The layout loop is deliberately single-threaded: parallel asynchronous
updates would trade determinism for speed, and determinism wins here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh
from scipy.optimize import curve_fit

from ._rng import rand_int, rand_uniform
from .embedding import EmbeddingMatrix


class ReduceError(ValueError):
    """Raised for invalid reduction parameters."""


@dataclass
class ReducedMatrix:
    """Rows of an embedding matrix projected to a lower dimension.

    Item order matches the input.  ``components`` and
    ``explained_variance_ratio`` are populated by PCA only.
    """

    item_ids: list[str]
    dim: int
    rows: np.ndarray
    method: str
    seed: int
    components: np.ndarray | None = None
    explained_variance_ratio: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if not np.isfinite(self.rows).all():
            raise ReduceError("reduced matrix contains non-finite values")


@dataclass(frozen=True)
class UmapParams:
    """Manifold layout parameters; defaults match the pipeline defaults."""

    n_neighbors: int = 10
    min_dist: float = 0.1
    n_components: int = 5
    metric: str = "cosine"
    seed: int = 42
    n_epochs: int = 200
    negative_sample_rate: int = 5

    def __post_init__(self) -> None:
        if self.n_neighbors < 2:
            raise ReduceError("n_neighbors must be >= 2")
        if not 0.0 < self.min_dist < 1.0:
            raise ReduceError("min_dist must be in (0, 1)")
        if self.metric not in ("cosine", "euclidean"):
            raise ReduceError(f"unsupported metric: {self.metric!r}")


def pca(m: EmbeddingMatrix, k: int) -> ReducedMatrix:
    """Project onto the top-k principal components.

    Rows are mean-centered and projected onto the top-k right singular
    vectors.  Component signs are fixed so each component's
    largest-magnitude loading is positive, making the projection unique.

    Raises:
        ReduceError: if k is out of range or fewer than 2 rows.
    """
    X = m.rows
    n, d = X.shape
    if n < 2:
        raise ReduceError("pca needs at least 2 rows")
    if not 1 <= k <= min(n, d):
        raise ReduceError(f"k={k} out of range for a {n}x{d} matrix")

    centered = X - X.mean(axis=0)
    _, singular_values, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:k].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0

    total_variance = float((centered**2).sum()) / (n - 1)
    if total_variance == 0.0:
        ratios = np.zeros(k)
    else:
        ratios = (singular_values[:k] ** 2 / (n - 1)) / total_variance

    return ReducedMatrix(
        item_ids=list(m.item_ids),
        dim=k,
        rows=centered @ components.T,
        method="pca",
        seed=0,
        components=components,
        explained_variance_ratio=ratios,
    )


# --------------------------------------------------------------------------
# UMAP
# --------------------------------------------------------------------------

def _pairwise_distances(X: np.ndarray, metric: str) -> np.ndarray:
    if metric == "cosine":
        norms = np.linalg.norm(X, axis=1)
        if (norms == 0).any():
            raise ReduceError("cosine metric requires nonzero rows")
        unit = X / norms[:, None]
        D = 1.0 - unit @ unit.T
    else:
        sq = (X**2).sum(axis=1)
        D = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.maximum(D, 0.0, out=D)
        np.sqrt(D, out=D)
    np.fill_diagonal(D, 0.0)
    return np.maximum(D, 0.0)


def _knn(D: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact k nearest neighbours (excluding self), ties broken by index."""
    n = D.shape[0]
    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k))
    for i in range(n):
        order = np.lexsort((np.arange(n), D[i]))
        order = order[order != i][:k]
        indices[i] = order
        distances[i] = D[i, order]
    return indices, distances


def _smooth_kernel(knn_dists: np.ndarray, n_neighbors: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (rho, sigma): rho is the nearest-neighbour distance and
    sigma solves sum_j exp(-max(0, d_ij - rho_i) / sigma_i) = log2(n_neighbors)
    by 64 bisection iterations."""
    n = knn_dists.shape[0]
    target = math.log2(n_neighbors)
    rho = knn_dists[:, 0].copy()
    sigma = np.empty(n)
    for i in range(n):
        lo, hi, mid = 0.0, math.inf, 1.0
        shifted = np.maximum(knn_dists[i] - rho[i], 0.0)
        for _ in range(64):
            psum = float(np.exp(-shifted / mid).sum())
            if abs(psum - target) < 1e-5:
                break
            if psum > target:
                hi = mid
                mid = (lo + hi) / 2.0
            else:
                lo = mid
                mid = mid * 2.0 if hi == math.inf else (lo + hi) / 2.0
        sigma[i] = mid
    return rho, sigma


def _fuzzy_graph(
    knn_idx: np.ndarray, knn_dists: np.ndarray, rho: np.ndarray, sigma: np.ndarray
) -> dict[tuple[int, int], float]:
    """Directed membership weights symmetrized by a+b-ab."""
    directed: dict[tuple[int, int], float] = {}
    n, k = knn_idx.shape
    for i in range(n):
        for jj in range(k):
            j = int(knn_idx[i, jj])
            d = max(knn_dists[i, jj] - rho[i], 0.0)
            directed[(i, j)] = math.exp(-d / sigma[i])
    graph: dict[tuple[int, int], float] = {}
    for (i, j), w in directed.items():
        if (j, i) in directed and j < i:
            continue  # handled from the (j, i) side
        wt = directed.get((j, i), 0.0)
        combined = w + wt - w * wt
        graph[(i, j)] = combined
        graph[(j, i)] = combined
    return graph


def _connected(graph: dict[tuple[int, int], float], n: int) -> bool:
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for (i, j), w in graph.items():
        if w > 0:
            adjacency[i].append(j)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        node = stack.pop()
        for nbr in adjacency[node]:
            if not seen[nbr]:
                seen[nbr] = True
                count += 1
                stack.append(nbr)
    return count == n


def _spectral_init(
    graph: dict[tuple[int, int], float], n: int, n_components: int, seed: int
) -> np.ndarray | None:
    """Layout from the bottom non-trivial eigenvectors of the normalized
    Laplacian; None when infeasible (disconnected graph or tiny n)."""
    if n < n_components + 2 or not _connected(graph, n):
        return None
    W = np.zeros((n, n))
    for (i, j), w in graph.items():
        W[i, j] = w
    degrees = W.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(degrees)
    L = np.eye(n) - (inv_sqrt[:, None] * W) * inv_sqrt[None, :]
    try:
        _, vecs = eigh(L, subset_by_index=[0, n_components])
    except np.linalg.LinAlgError:
        return None
    coords = vecs[:, 1 : n_components + 1].copy()
    for col in range(coords.shape[1]):
        column = coords[:, col]
        if column[np.argmax(np.abs(column))] < 0:
            coords[:, col] = -column
    peak = np.abs(coords).max()
    if peak == 0:
        return None
    coords *= 10.0 / peak
    for i in range(n):
        for d in range(n_components):
            coords[i, d] += (rand_uniform(seed, i * n_components + d) - 0.5) * 2e-4
    return coords


def fit_curve_params(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares fit of 1/(1 + a d^(2b)) to the min_dist target curve."""
    xv = np.linspace(0.0, spread * 3.0, 300)
    yv = np.where(xv < min_dist, 1.0, np.exp(-(xv - min_dist) / spread))
    (a, b), _ = curve_fit(lambda x, a_, b_: 1.0 / (1.0 + a_ * x ** (2.0 * b_)), xv, yv)
    return float(a), float(b)


def umap(m: EmbeddingMatrix, p: UmapParams | None = None) -> ReducedMatrix:
    """Reduce an embedding matrix with the deterministic UMAP variant.

    Identical input and identical seed give a bit-identical result.

    Raises:
        ReduceError: if the matrix has fewer rows than n_neighbors + 1.
    """
    if p is None:
        p = UmapParams()
    X = m.rows
    n = X.shape[0]
    if n <= p.n_neighbors:
        raise ReduceError(f"umap needs more than n_neighbors={p.n_neighbors} rows, got {n}")

    D = _pairwise_distances(X, p.metric)
    knn_idx, knn_dists = _knn(D, p.n_neighbors)
    rho, sigma = _smooth_kernel(knn_dists, p.n_neighbors)
    graph = _fuzzy_graph(knn_idx, knn_dists, rho, sigma)

    init = _spectral_init(graph, n, p.n_components, p.seed)
    if init is None:
        init = np.empty((n, p.n_components))
        for i in range(n):
            for d in range(p.n_components):
                init[i, d] = rand_uniform(p.seed, 1_000_000 + i * p.n_components + d) * 20.0 - 10.0

    embedding = _sgd_layout(graph, init, p)
    return ReducedMatrix(
        item_ids=list(m.item_ids),
        dim=p.n_components,
        rows=embedding,
        method="umap",
        seed=p.seed,
    )


def _sgd_layout(
    graph: dict[tuple[int, int], float], init: np.ndarray, p: UmapParams
) -> np.ndarray:
    """Sequential gradient layout with counter-based negative sampling."""
    n, dim = init.shape
    a, b = fit_curve_params(p.min_dist)
    n_epochs = p.n_epochs

    edges = sorted(graph.items())
    weights = np.array([w for _, w in edges])
    w_max = weights.max()
    keep = weights >= w_max / n_epochs
    heads = [e[0][0] for e, k in zip(edges, keep) if k]
    tails = [e[0][1] for e, k in zip(edges, keep) if k]
    kept_w = weights[keep]

    epochs_per_sample = (w_max / kept_w).tolist()
    epoch_of_next_sample = list(epochs_per_sample)
    epochs_per_negative = [eps / p.negative_sample_rate for eps in epochs_per_sample]
    epoch_of_next_negative = list(epochs_per_negative)

    emb = [[float(v) for v in row] for row in init]
    n_edges = len(heads)
    bm1 = b - 1.0
    counter = 0

    for epoch in range(n_epochs):
        alpha = 1.0 - epoch / n_epochs
        for e in range(n_edges):
            if epoch_of_next_sample[e] > epoch:
                continue
            i = heads[e]
            j = tails[e]
            cur = emb[i]
            other = emb[j]

            d2 = 0.0
            for d in range(dim):
                diff = cur[d] - other[d]
                d2 += diff * diff
            if d2 > 0.0:
                coeff = (-2.0 * a * b * d2**bm1) / (a * d2**b + 1.0)
                for d in range(dim):
                    g = coeff * (cur[d] - other[d])
                    if g > 4.0:
                        g = 4.0
                    elif g < -4.0:
                        g = -4.0
                    cur[d] += g * alpha
                    other[d] -= g * alpha
            epoch_of_next_sample[e] += epochs_per_sample[e]

            n_neg = int((epoch - epoch_of_next_negative[e]) / epochs_per_negative[e])
            for _ in range(n_neg):
                k = rand_int(p.seed, counter, n)
                counter += 1
                if k == i:
                    continue
                other = emb[k]
                d2 = 0.0
                for d in range(dim):
                    diff = cur[d] - other[d]
                    d2 += diff * diff
                if d2 > 0.0:
                    coeff = (2.0 * b) / ((0.001 + d2) * (a * d2**b + 1.0))
                    for d in range(dim):
                        g = coeff * (cur[d] - other[d])
                        if g > 4.0:
                            g = 4.0
                        elif g < -4.0:
                            g = -4.0
                        cur[d] += g * alpha
                else:
                    for d in range(dim):
                        cur[d] += 4.0 * alpha
            epoch_of_next_negative[e] += n_neg * epochs_per_negative[e]

    return np.array(emb, dtype=np.float64)


def project_2d(m: EmbeddingMatrix, method: str = "pca", seed: int = 42) -> ReducedMatrix:
    """2-D projection for scatter plots.

    Raises:
        ReduceError: fewer than 3 rows or unknown method.
    """
    if m.rows.shape[0] < 3:
        raise ReduceError("project_2d needs at least 3 rows")
    if method == "pca":
        return pca(m, 2)
    if method == "umap":
        n = m.rows.shape[0]
        n_neighbors = min(10, n - 1)
        return umap(m, UmapParams(n_neighbors=n_neighbors, n_components=2, seed=seed))
    raise ReduceError(f"unknown projection method: {method!r}")
