#!/usr/bin/env python3
"""Cluster the reduced fixture embeddings two ways and compare.

HDBSCAN finds the number of clusters itself and can refuse to assign
outliers (label -1).  KMeans needs K up front; following the pipeline
convention, K is taken from the HDBSCAN result.

    python demos/03_clustering.py
"""

from collections import Counter
from pathlib import Path

from versetopics import HdbscanParams, hdbscan, kmeans, normalize, read_embeddings, umap

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    docs_emb = normalize(read_embeddings(FIXTURES / "meadow.docs.emb"))
    print("reducing 64-dim document vectors to 5 dims with UMAP...")
    reduced = umap(docs_emb)

    print("\n=== HDBSCAN (density-based, finds K itself) ===")
    density = hdbscan(reduced, HdbscanParams(min_cluster_size=10, min_samples=5))
    sizes = Counter(int(v) for v in density.labels)
    noise = sizes.pop(-1, 0)
    print(f"  clusters: {density.k}, noise documents: {noise}")
    print("  sizes:", dict(sorted(sizes.items())))

    print("\n=== KMeans (K from the HDBSCAN result) ===")
    partition = kmeans(reduced, density.k, iters=300, seed=42)
    trace = partition.params["sse_trace"]
    print(f"  converged after {len(trace) - 1} iterations; SSE {trace[0]:.1f} -> {trace[-1]:.1f}")
    agreement = sum(
        1
        for a, b in zip(density.labels, partition.labels)
        if a >= 0
    )
    print(f"  kmeans assigns every document (no noise); hdbscan assigned {agreement}")


if __name__ == "__main__":
    main()
