"""Cross-corpus topic comparison.

Given two topic models built over the same encoder's space, compute the
full cosine matrix between their topic vectors, each first-model topic's
best match in the second model, and the mean of those row maxima.  The
mean is directional: it averages over the FIRST model's topics, so
compare(a, b) and compare(b, a) generally differ even though their
matrices are transposes.

Cosine similarity spans [-1, 1] in general; scores are reported as-is,
never clamped (clamping happens only in heatmap coloring).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .topics import TopicModel


class CompareError(ValueError):
    """Raised for invalid comparisons (dim or encoder mismatch)."""


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """cos of the angle between two vectors.

    Raises:
        CompareError: zero vector or dimension mismatch.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise CompareError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise CompareError("cosine of a zero vector is undefined")
    # bitwise-equal (or negated) inputs have an exact answer; return it
    # rather than the rounded quotient
    if np.array_equal(u, v):
        return 1.0
    if np.array_equal(u, -v):
        return -1.0
    return float(np.dot(u, v) / (nu * nv))


@dataclass(frozen=True)
class SimilarityReport:
    """Topic-by-topic cosine matrix between two models.

    Attributes:
        matrix: (A topics) x (B topics) cosine similarities.
        best_match: For each A topic, (B topic index, score); score equals
            the row maximum, ties resolved to the lower B index.
        avg_sim: Mean of the row maxima (directional).
        labels_a: Top-5 words per A topic, for display.
        labels_b: Top-5 words per B topic.
    """

    matrix: np.ndarray
    best_match: list[tuple[int, float]]
    avg_sim: float
    labels_a: list[list[str]]
    labels_b: list[list[str]]


def similarity_matrix(a: TopicModel, b: TopicModel) -> SimilarityReport:
    """Full cosine matrix, per-topic best matches, and the mean similarity.

    Raises:
        CompareError: when the models' embedding dims or encoder
            provenance ids differ (topic vectors from different encoders
            are not comparable).
    """
    if a.topic_vectors.shape[1] != b.topic_vectors.shape[1]:
        raise CompareError(
            f"embedding dims differ: {a.topic_vectors.shape[1]} vs {b.topic_vectors.shape[1]}"
        )
    enc_a = a.provenance.get("embedder")
    enc_b = b.provenance.get("embedder")
    if enc_a != enc_b:
        raise CompareError(f"encoder provenance differs: {enc_a!r} vs {enc_b!r}")

    norm_a = np.linalg.norm(a.topic_vectors, axis=1)
    norm_b = np.linalg.norm(b.topic_vectors, axis=1)
    if (norm_a == 0).any() or (norm_b == 0).any():
        raise CompareError("zero topic vector")
    matrix = (a.topic_vectors / norm_a[:, None]) @ (b.topic_vectors / norm_b[:, None]).T

    # exact values for bitwise-identical (or negated) vector pairs, so a
    # model compared with itself scores exactly 1.0 on the diagonal
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            if np.array_equal(a.topic_vectors[i], b.topic_vectors[j]):
                matrix[i, j] = 1.0
            elif np.array_equal(a.topic_vectors[i], -b.topic_vectors[j]):
                matrix[i, j] = -1.0

    best = [(int(row.argmax()), float(row.max())) for row in matrix]
    avg_sim = float(np.mean([score for _, score in best]))
    return SimilarityReport(
        matrix=matrix,
        best_match=best,
        avg_sim=avg_sim,
        labels_a=[[w for w, _ in topic[:5]] for topic in a.top_words],
        labels_b=[[w for w, _ in topic[:5]] for topic in b.top_words],
    )
