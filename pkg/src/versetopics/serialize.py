"""Save/load helpers binding the in-memory types to their file formats.

A topic model is stored as a JSON document (topics, sizes, top words,
provenance) plus an EMB1 sidecar ``<name>.vectors.emb`` holding the topic
vectors, so comparison across corpora can reload the exact vectors the
model was built with.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .compare import SimilarityReport
from .embedding import EmbeddingMatrix, read_embeddings, write_embeddings
from .lda import LdaModel, lda_topics
from .report import write_json
from .topics import SweepResult, TopicModel


def vectors_sidecar(json_path: str | Path) -> Path:
    return Path(str(json_path) + ".vectors.emb")


def topic_model_payload(model: TopicModel, provenance: dict | None = None) -> dict:
    sizes = model.sizes()
    payload = {
        "topics": [
            {
                "id": t,
                "size": sizes[t],
                "vector_dim": int(model.topic_vectors.shape[1]),
                "top_words": [[w, s] for w, s in model.top_words[t]],
            }
            for t in range(model.k)
        ],
        "noise": model.noise_count(),
        "provenance": provenance if provenance is not None else model.provenance,
    }
    return payload


def save_topic_model(model: TopicModel, json_path: str | Path) -> None:
    write_json(topic_model_payload(model), json_path, schema_name="topic_model")
    vectors = EmbeddingMatrix(
        item_ids=[f"topic-{t}" for t in range(model.k)],
        dim=model.topic_vectors.shape[1],
        rows=model.topic_vectors,
    )
    write_embeddings(vectors, vectors_sidecar(json_path))


def load_topic_model(json_path: str | Path) -> TopicModel:
    """Reload a saved topic model (vectors from the EMB1 sidecar).

    The reloaded model has no document assignment; sizes and noise come
    from the stored payload.
    """
    import json as _json

    payload = _json.loads(Path(json_path).read_text(encoding="utf-8"))
    vectors = read_embeddings(vectors_sidecar(json_path))
    top_words = [
        [(w, float(s)) for w, s in topic["top_words"]] for topic in payload["topics"]
    ]
    provenance = dict(payload.get("provenance", {}))
    provenance.setdefault("noise", payload.get("noise", 0))
    return TopicModel(
        topic_vectors=np.asarray(vectors.rows, dtype=np.float64),
        assignment=None,
        top_words=top_words,
        provenance=provenance,
        stored_sizes=[topic["size"] for topic in payload["topics"]],
    )


def similarity_payload(report: SimilarityReport, provenance: dict | None = None) -> dict:
    payload = {
        "avg_sim": report.avg_sim,
        "matrix": [[float(v) for v in row] for row in report.matrix],
        "best_match": [
            {"a_topic": i, "b_topic": j, "score": score}
            for i, (j, score) in enumerate(report.best_match)
        ],
        "labels_a": report.labels_a,
        "labels_b": report.labels_b,
    }
    if provenance is not None:
        payload["provenance"] = provenance
    return payload


def lda_payload(model: LdaModel, n_words: int = 10, provenance: dict | None = None) -> dict:
    payload = {
        "K": model.K,
        "alpha": model.alpha,
        "topics": [
            [[w, p] for w, p in topic] for topic in lda_topics(model, n=min(n_words, len(model.vocabulary)))
        ],
        "elbo_trace": [float(v) for v in model.elbo_trace],
    }
    if provenance is not None:
        payload["provenance"] = provenance
    return payload


def sweep_payload(result: SweepResult, provenance: dict | None = None) -> dict:
    payload = {
        "grid": [
            {
                "min_cluster_size": params.min_cluster_size,
                "min_samples": params.min_samples,
                "n_topics": n_topics,
                "coherence": score if score != float("-inf") else -1e9,
            }
            for params, n_topics, score in result.grid
        ],
        "best": result.best,
    }
    if provenance is not None:
        payload["provenance"] = provenance
    return payload
