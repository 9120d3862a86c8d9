"""Topic vectors, topic words, hierarchical reduction, and model sweeps.

A cluster of documents becomes a topic by taking the centroid of its
member document vectors in the original embedding space (never the
reduced space: reduced axes of different corpora are not mutually
aligned).  The topic's words are the vocabulary vectors nearest the
centroid by cosine similarity.  Noise documents (label -1) never
contribute to topic vectors and are reported separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cluster import ClusterAssignment, HdbscanParams, hdbscan
from .coherence import WindowIndex, build_window_index, coherence
from .corpus import Corpus
from .embedding import EmbeddingMatrix
from .reduce import UmapParams, umap


class TopicsError(ValueError):
    """Raised for invalid topic-model operations."""


DEFAULT_TOP_N = 50


@dataclass
class TopicModel:
    """Topic vectors plus per-topic ranked words and provenance.

    Attributes:
        topic_vectors: K x dim centroids in the original embedding space.
        assignment: The document clustering the topics came from.
        top_words: Per topic, (word, cosine score) ranked descending.
        provenance: Embedder id, reducer, clusterer, params, seed, and the
            merge history of any hierarchical reduction.
        words: The vocabulary matrix used to derive top_words (kept so
            reduction can re-derive them; not serialized).
    """

    topic_vectors: np.ndarray
    assignment: ClusterAssignment | None
    top_words: list[list[tuple[str, float]]]
    provenance: dict
    words: EmbeddingMatrix | None = field(default=None, repr=False)
    stored_sizes: list[int] | None = None

    @property
    def k(self) -> int:
        return self.topic_vectors.shape[0]

    def sizes(self) -> list[int]:
        if self.assignment is None:
            if self.stored_sizes is None:
                raise TopicsError("model has neither an assignment nor stored sizes")
            return list(self.stored_sizes)
        return [int((self.assignment.labels == t).sum()) for t in range(self.k)]

    def noise_count(self) -> int:
        if self.assignment is None:
            return int(self.provenance.get("noise", 0))
        return int((self.assignment.labels == -1).sum())


def topic_vectors(docs_emb: EmbeddingMatrix, assignment: ClusterAssignment) -> np.ndarray:
    """Centroid of each cluster's document vectors in the original space.

    Raises:
        TopicsError: if assignment items are missing from the embedding,
            or a label has no members.
    """
    vectors = np.empty((assignment.k, docs_emb.dim))
    try:
        doc_rows = np.stack([docs_emb.row_for(i) for i in assignment.item_ids])
    except KeyError as exc:
        raise TopicsError(f"assignment item missing from embedding: {exc.args[0]!r}") from exc
    for t in range(assignment.k):
        member = assignment.labels == t
        if not member.any():
            raise TopicsError(f"cluster label {t} has no members")
        vectors[t] = doc_rows[member].mean(axis=0)
    return vectors


def top_words(
    tv: np.ndarray, words: EmbeddingMatrix, n: int = DEFAULT_TOP_N
) -> list[list[tuple[str, float]]]:
    """Per topic, the n vocabulary words most cosine-similar to the topic
    vector, ranked descending; score ties keep vocabulary order.

    Raises:
        TopicsError: if n exceeds the number of word vectors.
    """
    if n > len(words.item_ids):
        raise TopicsError(f"n={n} exceeds {len(words.item_ids)} word vectors")
    word_norms = np.linalg.norm(words.rows, axis=1)
    topic_norms = np.linalg.norm(tv, axis=1)
    if (topic_norms == 0).any():
        raise TopicsError("zero topic vector")
    sims = (tv / topic_norms[:, None]) @ (words.rows / word_norms[:, None]).T

    ranked = []
    for t in range(tv.shape[0]):
        order = np.lexsort((np.arange(sims.shape[1]), -sims[t]))[:n]
        ranked.append([(words.item_ids[j], float(sims[t, j])) for j in order])
    return ranked


def build_topic_model(
    docs_emb: EmbeddingMatrix,
    words: EmbeddingMatrix,
    assignment: ClusterAssignment,
    n: int = DEFAULT_TOP_N,
    provenance: dict | None = None,
) -> TopicModel:
    """Assemble a TopicModel from an assignment and a joint embedding."""
    tv = topic_vectors(docs_emb, assignment)
    n_eff = min(n, len(words.item_ids))
    model = TopicModel(
        topic_vectors=tv,
        assignment=assignment,
        top_words=top_words(tv, words, n_eff),
        provenance=dict(provenance or {}),
        words=words,
    )
    model.provenance.setdefault("top_n", n_eff)
    return model


def reduce_topics(
    model: TopicModel, docs_emb: EmbeddingMatrix, target_k: int
) -> TopicModel:
    """Merge topics until ``target_k`` remain.

    Each step merges the smallest topic (fewest documents; ties take the
    lowest label) into its nearest topic by cosine similarity of topic
    vectors, recomputing the merged centroid from the union of member
    documents.  ``provenance["merge_groups"]`` records, for every final
    topic, the original topic ids it absorbed, and top words are
    re-derived.

    Raises:
        TopicsError: if target_k >= current K.
    """
    if target_k >= model.k:
        raise TopicsError(f"target_k={target_k} must be below current K={model.k}")
    if target_k < 1:
        raise TopicsError("target_k must be >= 1")
    if model.words is None:
        raise TopicsError("model has no word matrix to re-derive top words from")
    if model.assignment is None:
        raise TopicsError("reduce_topics needs a model with a document assignment")

    doc_rows = np.stack([docs_emb.row_for(i) for i in model.assignment.item_ids])
    labels = model.assignment.labels.copy()

    groups: list[list[int]] = [[t] for t in range(model.k)]
    vectors = [model.topic_vectors[t].copy() for t in range(model.k)]
    members: list[np.ndarray] = [np.flatnonzero(labels == t) for t in range(model.k)]

    while len(groups) > target_k:
        sizes = [m.size for m in members]
        smallest = int(np.argmin(sizes))  # argmin takes the lowest index on ties
        vs = vectors[smallest]
        sims = [
            float(np.dot(vs, vectors[t]) / (np.linalg.norm(vs) * np.linalg.norm(vectors[t])))
            for t in range(len(groups))
        ]
        sims[smallest] = -np.inf
        nearest = int(np.argmax(sims))

        members[nearest] = np.sort(np.concatenate([members[nearest], members[smallest]]))
        vectors[nearest] = doc_rows[members[nearest]].mean(axis=0)
        groups[nearest] = groups[nearest] + groups[smallest]
        del members[smallest], vectors[smallest], groups[smallest]

    new_labels = np.full_like(labels, -1)
    for t, member in enumerate(members):
        new_labels[member] = t

    assignment = ClusterAssignment(
        item_ids=list(model.assignment.item_ids),
        labels=new_labels,
        k=len(groups),
        method=model.assignment.method,
        params=dict(model.assignment.params),
    )
    tv = np.stack(vectors)
    provenance = dict(model.provenance)
    provenance["merge_groups"] = [sorted(g) for g in groups]
    return TopicModel(
        topic_vectors=tv,
        assignment=assignment,
        top_words=top_words(tv, model.words, min(provenance.get("top_n", DEFAULT_TOP_N), len(model.words.item_ids))),
        provenance=provenance,
        words=model.words,
    )


# --------------------------------------------------------------------------
# Parameter sweep
# --------------------------------------------------------------------------

DEFAULT_SWEEP_GRID = tuple(
    HdbscanParams(min_cluster_size=mcs, min_samples=ms)
    for mcs in (5, 10, 15, 20, 25)
    for ms in (3, 5, 8)
)


@dataclass(frozen=True)
class SweepResult:
    """Coherence of each grid point; ``best`` maximizes coherence with
    ties broken toward fewer topics."""

    grid: list[tuple[HdbscanParams, int, float]]
    best: int

    def best_params(self) -> HdbscanParams:
        return self.grid[self.best][0]

    def best_n_topics(self) -> int:
        return self.grid[self.best][1]


def sweep(
    docs_emb: EmbeddingMatrix,
    words: EmbeddingMatrix,
    corpus: Corpus,
    reducer_params: UmapParams | None = None,
    grid: tuple[HdbscanParams, ...] = DEFAULT_SWEEP_GRID,
    top_n: int = DEFAULT_TOP_N,
    coherence_n: int = 10,
    window: int | None = None,
    index: WindowIndex | None = None,
) -> SweepResult:
    """Run the clustering stage over a parameter grid and score each point
    by mean TC-NPMI; the chosen point's topic count doubles as the K for
    a matching KMeans run.

    The reduction is computed once (it does not depend on the grid) and
    the window index is shared across grid points.

    Raises:
        TopicsError: if the grid is empty.
    """
    if not grid:
        raise TopicsError("sweep grid is empty")
    reduced = umap(docs_emb, reducer_params or UmapParams())
    if index is None:
        index = build_window_index(corpus, window or 110)

    results: list[tuple[HdbscanParams, int, float]] = []
    for params in grid:
        try:
            assignment = hdbscan(reduced, params)
        except Exception:
            results.append((params, 0, float("-inf")))
            continue
        model = build_topic_model(docs_emb, words, assignment, n=top_n)
        n_eff = min(coherence_n, min(len(t) for t in model.top_words))
        report = coherence(model, index, n_eff)
        results.append((params, assignment.k, report.mean))

    best = min(range(len(results)), key=lambda i: (-results[i][2], results[i][1]))
    return SweepResult(grid=results, best=best)


def nearest_topic_labels(tv: np.ndarray, docs_emb: EmbeddingMatrix) -> np.ndarray:
    """Label every document (noise included) by its argmax-cosine topic.

    For visualization only; a model's own assignment is authoritative.
    """
    doc_norms = np.linalg.norm(docs_emb.rows, axis=1)
    tv_norms = np.linalg.norm(tv, axis=1)
    sims = (docs_emb.rows / doc_norms[:, None]) @ (tv / tv_norms[:, None]).T
    return sims.argmax(axis=1)
