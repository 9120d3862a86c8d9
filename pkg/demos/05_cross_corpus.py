#!/usr/bin/env python3
"""Measure topic overlap between the two fixture corpora.

Both corpora embed with the same encoder, so their topic vectors live in
one space.  For every topic of the first corpus we find its best match
in the second by cosine similarity; the mean of those best scores is the
(directional) mean similarity.  The fixtures share ten of their themes,
so ten matches come out strong and the rest weak.

    python demos/05_cross_corpus.py     # writes demos/output/heatmap.svg
"""

from pathlib import Path

from versetopics import (
    HdbscanParams,
    build_topic_model,
    hdbscan,
    normalize,
    read_embeddings,
    similarity_matrix,
    umap,
)
from versetopics.report import heatmap_svg

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
OUT = Path(__file__).resolve().parent / "output"


def model_for(name: str):
    docs_emb = normalize(read_embeddings(FIXTURES / f"{name}.docs.emb"))
    words_emb = read_embeddings(FIXTURES / f"{name}.words.emb")
    assignment = hdbscan(umap(docs_emb), HdbscanParams())
    return build_topic_model(
        docs_emb, words_emb, assignment, n=10, provenance={"embedder": "fixture-enc64-v1"}
    )


def main() -> None:
    OUT.mkdir(exist_ok=True)
    print("building topic models for both corpora (UMAP + HDBSCAN)...")
    meadow = model_for("meadow")
    orchard = model_for("orchard")
    print(f"  meadow: {meadow.k} topics; orchard: {orchard.k} topics")

    report = similarity_matrix(meadow, orchard)
    print(f"\nmean similarity (meadow -> orchard): {report.avg_sim:.2f}")
    print("\nbest matches:")
    for i, (j, score) in enumerate(report.best_match):
        left = " ".join(report.labels_a[i][:3])
        right = " ".join(report.labels_b[j][:3])
        print(f"  topic {i:2d} [{left:30s}] -> topic {j:2d} [{right:30s}] {score:.2f}")

    path = OUT / "meadow-vs-orchard-heatmap.svg"
    heatmap_svg(
        report.matrix,
        [f"A{i}" for i in range(meadow.k)],
        [f"B{j}" for j in range(orchard.k)],
        path,
        title="meadow vs orchard topic similarity",
    )
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
