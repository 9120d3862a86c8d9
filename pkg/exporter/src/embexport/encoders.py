"""Sentence encoders behind a single ``encode(texts) -> matrix`` interface.

Two families:

``hash-mean-512-v1``
    A fully local, dependency-light encoder: every token gets a fixed
    unit vector seeded from the SHA-256 of its text, and a sentence is
    the normalized mean of its token vectors.  It captures lexical
    overlap only (no transformer semantics) but is deterministic across
    platforms and needs no model download, which makes it the default
    for tests and air-gapped runs.

anything else
    Treated as a sentence-transformers model id (e.g.
    ``sentence-transformers/distiluse-base-multilingual-cased-v1``, a
    DistilBERT encoder with mean pooling and a 512-dim projection).
    Requires the model to be installed or already cached; inference runs
    in deterministic (eval, no-grad) mode.
"""

from __future__ import annotations

import hashlib

import numpy as np


class EncoderError(RuntimeError):
    """Raised when an encoder cannot be loaded or misbehaves."""


class HashedMeanEncoder:
    """Deterministic local encoder; see module docstring."""

    def __init__(self, dim: int = 512):
        self.dim = dim
        self.model_id = f"hash-mean-{dim}-v1"
        self._token_cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._token_cache.get(token)
        if cached is not None:
            return cached
        seed = int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8], "little")
        vec = np.random.default_rng(seed).standard_normal(self.dim)
        vec /= np.linalg.norm(vec)
        self._token_cache[token] = vec
        return vec

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            tokens = text.split() or ["[empty]"]
            mean = np.mean([self._token_vector(t) for t in tokens], axis=0)
            norm = np.linalg.norm(mean)
            out[i] = mean / norm if norm > 0 else self._token_vector("[zero]")
        return out


class SbertEncoder:
    """sentence-transformers wrapper; model must be local or cached."""

    def __init__(self, model_id: str, batch_size: int = 32):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(
                "sentence-transformers is not installed; "
                "install embexport[sbert] or use the hash-mean encoder"
            ) from exc
        try:
            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise EncoderError(f"cannot load encoder model {model_id!r}: {exc}") from exc
        self.model_id = model_id
        self.batch_size = batch_size
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(
            texts,
            batch_size=self.batch_size,
            convert_to_numpy=True,
            show_progress_bar=False,
            normalize_embeddings=False,
        )
        return np.asarray(vectors, dtype=np.float64)


def load_encoder(model_id: str, batch_size: int = 32):
    if model_id.startswith("hash-mean-"):
        try:
            dim = int(model_id.split("-")[2])
        except (IndexError, ValueError) as exc:
            raise EncoderError(f"malformed hash encoder id: {model_id!r}") from exc
        return HashedMeanEncoder(dim)
    return SbertEncoder(model_id, batch_size=batch_size)
