"""Embedding matrices and the EMB1 interchange format.

Encoders run out of process (they need model weights this engine does not
ship); documents and vocabulary words arrive as precomputed vectors in a
compact binary file.  Both kinds of vectors must come from the same
encoder so that word-to-topic distances are meaningful; the pair is held
as a :class:`JointEmbedding`.

EMB1 binary layout (little-endian):

    magic   4 bytes  b"EMB1"
    count   u32      number of items
    dim     u32      vector dimension
    then per item:
        id_len  u16
        id      id_len bytes, UTF-8
        row     dim * float32

Interchange stores float32; in memory everything is float64.  An optional
sidecar ``<file>.manifest.json`` records the encoder's identity
({"model_id", "dim", "digest"}) for provenance checks downstream.
"""

from __future__ import annotations

import json
import struct
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus

_MAGIC = b"EMB1"


class EmbeddingError(ValueError):
    """Raised for malformed embedding files or invalid matrices."""


@dataclass
class EmbeddingMatrix:
    """Dense vectors bound to item ids, one row per item.

    Attributes:
        item_ids: Ordered item identifiers (document ids or word tokens).
        dim: Number of columns.
        rows: float64 array of shape (len(item_ids), dim).
        normalized: True when every row has unit L2 norm (within 1e-6).
    """

    item_ids: list[str]
    dim: int
    rows: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise EmbeddingError("rows must be a 2-D matrix")
        if self.rows.shape != (len(self.item_ids), self.dim):
            raise EmbeddingError(
                f"shape mismatch: {self.rows.shape} vs ({len(self.item_ids)}, {self.dim})"
            )
        self._index: dict[str, int] | None = None

    def validate(self) -> None:
        """Check matrix invariants; raises EmbeddingError naming the first bad row."""
        bad = ~np.isfinite(self.rows)
        if bad.any():
            row = int(np.argwhere(bad)[0][0])
            raise EmbeddingError(f"non-finite entry in row {row} (id {self.item_ids[row]!r})")
        norms = np.linalg.norm(self.rows, axis=1)
        if (norms == 0).any():
            row = int(np.argmin(norms))
            raise EmbeddingError(f"all-zero row {row} (id {self.item_ids[row]!r})")
        if self.normalized and not np.allclose(norms, 1.0, atol=1e-6):
            row = int(np.argmax(np.abs(norms - 1.0)))
            raise EmbeddingError(f"row {row} marked normalized but has norm {norms[row]!r}")
        if len(set(self.item_ids)) != len(self.item_ids):
            raise EmbeddingError("duplicate item ids")

    def row_for(self, item_id: str) -> np.ndarray:
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.item_ids)}
        return self.rows[self._index[item_id]]

    def __len__(self) -> int:
        return len(self.item_ids)


@dataclass
class JointEmbedding:
    """Document and word vectors from the same encoder, same dimension."""

    docs: EmbeddingMatrix
    words: EmbeddingMatrix

    def __post_init__(self) -> None:
        if self.docs.dim != self.words.dim:
            raise EmbeddingError(
                f"joint embedding dims differ: docs {self.docs.dim}, words {self.words.dim}"
            )


def read_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Read an EMB1 file (or JSONL fallback {id, vector} per line).

    File order is preserved.  The normalized flag is set when every row
    already has unit norm.

    Raises:
        EmbeddingError: magic mismatch, truncated payload, dim mismatch,
            or non-finite/zero rows (the error names the row index).
    """
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] == _MAGIC:
        ids, rows = _parse_emb1(blob, str(path))
    else:
        ids, rows = _parse_jsonl(path)

    matrix = EmbeddingMatrix(item_ids=ids, dim=rows.shape[1], rows=rows)
    matrix.validate()
    norms = np.linalg.norm(matrix.rows, axis=1)
    matrix.normalized = bool(np.allclose(norms, 1.0, atol=1e-6))
    return matrix


def _parse_emb1(blob: bytes, name: str) -> tuple[list[str], np.ndarray]:
    if len(blob) < 12:
        raise EmbeddingError(f"{name}: truncated payload (header incomplete)")
    count, dim = struct.unpack_from("<II", blob, 4)
    if dim == 0:
        raise EmbeddingError(f"{name}: dim is zero")
    ids: list[str] = []
    rows = np.empty((count, dim), dtype=np.float64)
    offset = 12
    for i in range(count):
        if offset + 2 > len(blob):
            raise EmbeddingError(f"{name}: truncated payload at row {i}")
        (id_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        if offset + id_len + 4 * dim > len(blob):
            raise EmbeddingError(f"{name}: truncated payload at row {i}")
        ids.append(blob[offset : offset + id_len].decode("utf-8"))
        offset += id_len
        rows[i] = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset)
        offset += 4 * dim
    if offset != len(blob):
        raise EmbeddingError(f"{name}: {len(blob) - offset} trailing bytes after payload")
    return ids, rows


def _parse_jsonl(path: Path) -> tuple[list[str], np.ndarray]:
    ids: list[str] = []
    vectors: list[list[float]] = []
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            vec = record["vector"]
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise EmbeddingError(
                    f"{path}: row {len(ids)}: dim {len(vec)} differs from first row dim {dim}"
                )
            ids.append(str(record["id"]))
            vectors.append(vec)
    if not ids:
        raise EmbeddingError(f"{path}: no embedding rows found")
    return ids, np.array(vectors, dtype=np.float64)


def write_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write EMB1 bytes; rows are stored as float32."""
    parts = [_MAGIC, struct.pack("<II", len(matrix.item_ids), matrix.dim)]
    rows32 = matrix.rows.astype("<f4")
    for i, item_id in enumerate(matrix.item_ids):
        id_bytes = item_id.encode("utf-8")
        parts.append(struct.pack("<H", len(id_bytes)))
        parts.append(id_bytes)
        parts.append(rows32[i].tobytes())
    Path(path).write_bytes(b"".join(parts))


def normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm.

    Raises:
        EmbeddingError: naming the id of any zero row.
    """
    norms = np.linalg.norm(matrix.rows, axis=1)
    if (norms == 0).any():
        row = int(np.argmin(norms))
        raise EmbeddingError(f"cannot normalize zero row (id {matrix.item_ids[row]!r})")
    return EmbeddingMatrix(
        item_ids=list(matrix.item_ids),
        dim=matrix.dim,
        rows=matrix.rows / norms[:, None],
        normalized=True,
    )


# --------------------------------------------------------------------------
# Providers: sources of word vectors for vocabulary embedding
# --------------------------------------------------------------------------

class PrecomputedProvider:
    """Provider backed by an interchange file produced per vocabulary token."""

    def __init__(self, matrix: EmbeddingMatrix):
        self.matrix = matrix

    def __call__(self, texts: list[str]) -> np.ndarray:
        try:
            return np.stack([self.matrix.row_for(t) for t in texts])
        except KeyError as exc:
            raise EmbeddingError(f"provider has no vector for token {exc.args[0]!r}") from exc


class HttpEmbeddingProvider:
    """Remote provider: POST {"texts": [...]} -> {"vectors": [[...]]}."""

    def __init__(self, url: str, timeout: float = 30.0):
        self.url = url
        self.timeout = timeout

    def __call__(self, texts: list[str]) -> np.ndarray:
        payload = json.dumps({"texts": texts}).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=payload, headers={"Content-Type": "application/json"}
        )
        with urllib.request.urlopen(request, timeout=self.timeout) as response:
            body = json.loads(response.read().decode("utf-8"))
        vectors = np.asarray(body["vectors"], dtype=np.float64)
        if vectors.shape[0] != len(texts):
            raise EmbeddingError(
                f"provider returned {vectors.shape[0]} vectors for {len(texts)} texts"
            )
        return vectors


def embed_vocabulary(
    corpus: Corpus,
    docs_emb: EmbeddingMatrix,
    provider,
    min_word_count: int = 3,
) -> JointEmbedding:
    """Bind vocabulary words to vectors in the documents' embedding space.

    Only non-stopword tokens occurring at least ``min_word_count`` times
    become word vectors; rarer tokens are noise for topic-word purposes.

    Raises:
        EmbeddingError: if the provider's dimension differs from the
            documents' dimension.
    """
    tokens = [w for w in corpus.vocabulary if corpus.occurrences(w) >= min_word_count]
    if not tokens:
        raise EmbeddingError("no vocabulary tokens meet min_word_count")
    vectors = np.asarray(provider(tokens), dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != docs_emb.dim:
        raise EmbeddingError(
            f"provider dim {vectors.shape[-1]} != docs dim {docs_emb.dim}"
        )
    words = EmbeddingMatrix(item_ids=tokens, dim=docs_emb.dim, rows=vectors)
    words.validate()
    return JointEmbedding(docs=docs_emb, words=words)


# --------------------------------------------------------------------------
# Manifest sidecars
# --------------------------------------------------------------------------

def manifest_path(emb_path: str | Path) -> Path:
    return Path(str(emb_path) + ".manifest.json")


def read_manifest(emb_path: str | Path) -> dict | None:
    """Read the encoder manifest next to an embedding file, if present."""
    path = manifest_path(emb_path)
    if not path.exists():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def write_manifest(emb_path: str | Path, model_id: str, dim: int, digest: str) -> None:
    manifest_path(emb_path).write_text(
        json.dumps({"model_id": model_id, "dim": dim, "digest": digest}, indent=2) + "\n",
        encoding="utf-8",
    )
