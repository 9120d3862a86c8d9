#!/usr/bin/env python3
"""Fit the LDA baseline on the fixture corpus and compare its coherence
with the embedding-based pipeline's.

LDA sees only bag-of-words counts, so globally frequent words bleed into
every topic and drag the NPMI coherence down; the embedding pipeline
picks topic words by vector proximity and stays coherent.

    python demos/06_lda_baseline.py
"""

from pathlib import Path

from versetopics import (
    HdbscanParams,
    build_corpus,
    build_topic_model,
    build_window_index,
    coherence,
    hdbscan,
    lda_fit,
    lda_topics,
    normalize,
    read_embeddings,
    umap,
)
from versetopics.corpus import read_documents_jsonl

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    docs = read_documents_jsonl(FIXTURES / "meadow.corpus.jsonl")
    corpus = build_corpus(docs, "meadow")
    index = build_window_index(corpus, 110)

    print("embedding-based pipeline...")
    docs_emb = normalize(read_embeddings(FIXTURES / "meadow.docs.emb"))
    words_emb = read_embeddings(FIXTURES / "meadow.words.emb")
    model = build_topic_model(docs_emb, words_emb, hdbscan(umap(docs_emb), HdbscanParams()), n=10)
    embed_score = coherence(model, index, 10).mean

    print(f"LDA baseline at the same K={model.k} (200 iterations)...")
    baseline = lda_fit(corpus, model.k, iters=200, seed=42)
    top = lda_topics(baseline, n=10)
    lda_score = coherence([[w for w, _ in t] for t in top], index, 10).mean

    print("\nsample LDA topics:")
    for t in range(min(3, baseline.K)):
        print(f"  topic {t}: " + " ".join(w for w, _ in top[t][:8]))

    print(f"\nmean TC-NPMI  embedding pipeline: {embed_score:.3f}")
    print(f"mean TC-NPMI  LDA baseline:       {lda_score:.3f}")
    print("the embedding pipeline's topics are markedly more coherent"
          if embed_score > lda_score else "unexpected: LDA won on this corpus")


if __name__ == "__main__":
    main()
