#!/usr/bin/env python3
"""Build a full topic model for the "meadow" fixture and score it.

The pipeline: normalized document vectors -> UMAP to 5 dims -> HDBSCAN
-> topic vectors (cluster centroids back in the original 64-dim space)
-> top words by cosine against the vocabulary vectors -> TC-NPMI
coherence against the corpus itself.  Ends with hierarchical reduction
down to 10 topics.

    python demos/04_topic_model.py
"""

from pathlib import Path

from versetopics import (
    HdbscanParams,
    build_corpus,
    build_topic_model,
    build_window_index,
    coherence,
    hdbscan,
    normalize,
    read_embeddings,
    reduce_topics,
    umap,
)
from versetopics.corpus import read_documents_jsonl

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    docs = read_documents_jsonl(FIXTURES / "meadow.corpus.jsonl")
    corpus = build_corpus(docs, "meadow")
    docs_emb = normalize(read_embeddings(FIXTURES / "meadow.docs.emb"))
    words_emb = read_embeddings(FIXTURES / "meadow.words.emb")

    print("reduce + cluster...")
    reduced = umap(docs_emb)
    assignment = hdbscan(reduced, HdbscanParams())
    model = build_topic_model(docs_emb, words_emb, assignment, n=10)
    print(f"topics found: {model.k} (noise documents: {model.noise_count()})")

    print("\ntop words per topic:")
    for t, words in enumerate(model.top_words):
        print(f"  topic {t:2d} ({model.sizes()[t]:3d} docs): " + " ".join(w for w, _ in words[:6]))

    index = build_window_index(corpus, 110)
    report = coherence(model, index, 10)
    print(f"\nmean TC-NPMI over top-10 words: {report.mean:.3f}")
    print("per-topic: " + " ".join(f"{v:.2f}" for v in report.per_topic))

    print("\nhierarchical reduction to 10 topics...")
    smaller = reduce_topics(model, docs_emb, 10)
    merged = [g for g in smaller.provenance["merge_groups"] if len(g) > 1]
    print(f"  merge groups with more than one original topic: {merged}")
    report10 = coherence(smaller, index, 10)
    print(f"  mean TC-NPMI after reduction: {report10.mean:.3f}")


if __name__ == "__main__":
    main()
