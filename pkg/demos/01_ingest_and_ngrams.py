#!/usr/bin/env python3
"""Walk through corpus ingestion: cleaning, verse segmentation, statistics,
and n-gram tables, using the bundled "meadow" fixture corpus.

Run from the repository root:

    python demos/01_ingest_and_ngrams.py
"""

from pathlib import Path

from versetopics import build_corpus, clean_text, ngrams, segment

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main() -> None:
    print("=== Cleaning ===")
    samples = [
        "Lord, have we not prophesied in thy name?",
        "II-5(a). What winds up empirical life is (its) appearance as unreal.",
        'noisy extraction: "right \\u2019 \\n knowledge ?"',
    ]
    for raw in samples:
        print(f"  raw:     {raw!r}")
        print(f"  cleaned: {clean_text(raw)!r}")

    print("\n=== Segmentation (verse-as-document) ===")
    raw_text = (FIXTURES / "meadow.txt").read_text(encoding="utf-8")
    docs = segment(raw_text, "verse-numbered", source="meadow")
    print(f"  {len(docs)} documents from verse markers")
    first = docs[0]
    print(f"  first document: id={first.id} chapter={first.chapter} verse={first.verse}")
    print(f"  text: {first.text[:70]}...")

    print("\n=== Corpus statistics ===")
    corpus = build_corpus(docs, "meadow")
    s = corpus.stats
    print(f"  documents={s.documents} words={s.words} avg={s.avg_words:.2f} verses={s.verses}")
    print(f"  vocabulary (non-stopword): {len(corpus.vocabulary)} tokens")

    print("\n=== Top words and n-grams ===")
    for n in (1, 2, 3):
        table = ngrams(corpus, n, top_k=5)
        label = {1: "unigrams", 2: "bigrams", 3: "trigrams"}[n]
        print(f"  top {label}:")
        for tokens, count in table.entries:
            print(f"    {' '.join(tokens):40s} {count}")


if __name__ == "__main__":
    main()
