#!/usr/bin/env python3
"""Reduce the fixture document embeddings with PCA and UMAP and emit 2-D
projections for plotting.

PCA is exact and linear; it shows the global variance structure.  UMAP is
the non-linear layout the topic pipeline uses: local neighbourhoods stay
together, so themed verse blocks land in visually separate islands.

    python demos/02_reduction.py        # writes demos/output/*.csv|svg
"""

from pathlib import Path

from versetopics import normalize, pca, project_2d, read_embeddings, umap
from versetopics.corpus import read_documents_jsonl
from versetopics.report import scatter_svg, write_projection_csv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
OUT = Path(__file__).resolve().parent / "output"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    docs_emb = normalize(read_embeddings(FIXTURES / "meadow.docs.emb"))
    print(f"loaded {len(docs_emb)} document vectors, dim {docs_emb.dim}")

    reduced = pca(docs_emb, 5)
    print("PCA to 5 dims; explained variance ratios:")
    print("  " + " ".join(f"{v:.3f}" for v in reduced.explained_variance_ratio))

    print("UMAP to 5 dims (pipeline default: cosine metric, seed 42)...")
    manifold = umap(docs_emb)
    print(f"  output shape {manifold.rows.shape}, method={manifold.method}")

    print("2-D projections for plots...")
    docs = read_documents_jsonl(FIXTURES / "meadow.corpus.jsonl")
    labels = [f"chapter-{d.chapter}" for d in docs]
    for method in ("pca", "umap"):
        proj = project_2d(docs_emb, method, seed=42)
        write_projection_csv(proj, labels, OUT / f"meadow-2d-{method}.csv")
        scatter_svg(proj, labels, OUT / f"meadow-2d-{method}.svg", title=f"meadow ({method})")
        print(f"  wrote {OUT / f'meadow-2d-{method}.csv'} and .svg")


if __name__ == "__main__":
    main()
