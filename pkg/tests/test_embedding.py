"""EMB1 interchange, normalization, vocabulary embedding, providers."""

import json
import struct
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from versetopics.corpus import Document, build_corpus
from versetopics.embedding import (
    EmbeddingError,
    EmbeddingMatrix,
    HttpEmbeddingProvider,
    PrecomputedProvider,
    embed_vocabulary,
    normalize,
    read_embeddings,
    read_manifest,
    write_embeddings,
    write_manifest,
)


def make_matrix(ids, rows, normalized=False):
    rows = np.asarray(rows, dtype=np.float64)
    return EmbeddingMatrix(item_ids=list(ids), dim=rows.shape[1], rows=rows, normalized=normalized)


class TestEmb1Format:
    def test_read_two_unit_rows(self, tmp_path):
        path = tmp_path / "a.emb"
        write_embeddings(make_matrix(["x", "y"], [[1, 0, 0], [0, 1, 0]]), path)
        m = read_embeddings(path)
        assert m.item_ids == ["x", "y"]
        assert m.dim == 3
        assert m.normalized  # unit rows detected
        np.testing.assert_array_equal(m.rows, [[1, 0, 0], [0, 1, 0]])

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "bad.emb"
        blob = b"EMB1" + struct.pack("<II", 2, 3)
        blob += struct.pack("<H", 1) + b"x" + struct.pack("<3f", 1, 0, 0)
        # declared count 2, only one row present
        path.write_bytes(blob)
        with pytest.raises(EmbeddingError, match="truncated payload"):
            read_embeddings(path)

    def test_magic_mismatch_falls_back_to_jsonl_then_errors(self, tmp_path):
        path = tmp_path / "bad.emb"
        path.write_bytes(b"NOPE" + b"\x00" * 20)
        with pytest.raises(Exception):
            read_embeddings(path)

    def test_trailing_bytes_rejected(self, tmp_path):
        path = tmp_path / "trail.emb"
        write_embeddings(make_matrix(["x"], [[1.0, 2.0]]), path)
        path.write_bytes(path.read_bytes() + b"junk")
        with pytest.raises(EmbeddingError, match="trailing"):
            read_embeddings(path)

    def test_nan_row_named(self, tmp_path):
        path = tmp_path / "nan.emb"
        blob = b"EMB1" + struct.pack("<II", 2, 2)
        blob += struct.pack("<H", 1) + b"a" + struct.pack("<2f", 1, 2)
        blob += struct.pack("<H", 1) + b"b" + struct.pack("<2f", float("nan"), 1)
        path.write_bytes(blob)
        with pytest.raises(EmbeddingError, match="row 1"):
            read_embeddings(path)

    def test_round_trip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(42)
        rows = rng.standard_normal((17, 9)).astype(np.float32).astype(np.float64)
        ids = [f"item-{i}" for i in range(17)]
        p1, p2 = tmp_path / "a.emb", tmp_path / "b.emb"
        write_embeddings(make_matrix(ids, rows), p1)
        m = read_embeddings(p1)
        write_embeddings(m, p2)
        assert p1.read_bytes() == p2.read_bytes()
        np.testing.assert_array_equal(m.rows, rows)

    def test_jsonl_fallback(self, tmp_path):
        path = tmp_path / "vecs.jsonl"
        with open(path, "w") as fh:
            fh.write(json.dumps({"id": "a", "vector": [1.0, 2.0]}) + "\n")
            fh.write(json.dumps({"id": "b", "vector": [3.0, 4.0]}) + "\n")
        m = read_embeddings(path)
        assert m.item_ids == ["a", "b"]
        np.testing.assert_array_equal(m.rows, [[1, 2], [3, 4]])

    def test_jsonl_dim_mismatch_names_row(self, tmp_path):
        path = tmp_path / "vecs.jsonl"
        with open(path, "w") as fh:
            fh.write(json.dumps({"id": "a", "vector": [1.0, 2.0]}) + "\n")
            fh.write(json.dumps({"id": "b", "vector": [3.0]}) + "\n")
        with pytest.raises(EmbeddingError, match="row 1"):
            read_embeddings(path)

    def test_unicode_ids(self, tmp_path):
        path = tmp_path / "u.emb"
        write_embeddings(make_matrix(["versé-1"], [[0.5, 0.5]]), path)
        assert read_embeddings(path).item_ids == ["versé-1"]


class TestNormalize:
    def test_three_four_five(self):
        m = normalize(make_matrix(["a"], [[3.0, 4.0]]))
        np.testing.assert_allclose(m.rows, [[0.6, 0.8]], atol=1e-12)
        assert m.normalized

    def test_idempotent(self):
        m = normalize(make_matrix(["a", "b"], [[3.0, 4.0], [1.0, 1.0]]))
        again = normalize(m)
        np.testing.assert_allclose(again.rows, m.rows, atol=1e-12)

    def test_random_norms(self):
        rng = np.random.default_rng(0)
        m = normalize(make_matrix([str(i) for i in range(50)], rng.standard_normal((50, 8))))
        np.testing.assert_allclose(np.linalg.norm(m.rows, axis=1), 1.0, atol=1e-9)

    def test_zero_row_error_names_id(self):
        with pytest.raises(EmbeddingError, match="'zed'"):
            normalize(make_matrix(["ok", "zed"], [[1.0, 0.0], [0.0, 0.0]]))

    def test_preserves_cosine_argmax(self):
        rng = np.random.default_rng(3)
        rows = rng.standard_normal((20, 6))
        m = make_matrix([str(i) for i in range(20)], rows)
        query = rng.standard_normal(6)
        sims_before = rows @ query / (np.linalg.norm(rows, axis=1) * np.linalg.norm(query))
        normed = normalize(m)
        sims_after = normed.rows @ query / np.linalg.norm(query)
        assert int(np.argmax(sims_before)) == int(np.argmax(sims_after))


class TestEmbedVocabulary:
    def _corpus(self):
        docs = [
            Document(id="d1", text="self mind self mind self", token_count=5),
            Document(id="d2", text="mind light mind rare", token_count=4),
            Document(id="d3", text="self light light", token_count=3),
        ]
        return build_corpus(docs, "v", stopwords=frozenset())

    def test_shape_and_threshold(self):
        corpus = self._corpus()
        docs_emb = make_matrix(["d1", "d2", "d3"], np.eye(3))
        provider = PrecomputedProvider(
            make_matrix(["self", "mind", "light", "rare"], np.eye(4)[:, :3])
        )
        joint = embed_vocabulary(corpus, docs_emb, provider, min_word_count=3)
        # "rare" occurs once -> excluded; others occur >= 3 times
        assert joint.words.item_ids == ["self", "mind", "light"]
        assert joint.words.dim == 3

    def test_dim_mismatch(self):
        corpus = self._corpus()
        docs_emb = make_matrix(["d1", "d2", "d3"], np.eye(3))
        provider = PrecomputedProvider(
            make_matrix(["self", "mind", "light", "rare"], np.eye(4)[:, :2])
        )
        with pytest.raises(EmbeddingError, match="dim"):
            embed_vocabulary(corpus, docs_emb, provider, min_word_count=1)

    def test_joint_space_nearest_document_contains_word(self):
        # synthetic provider: word vector = mean of documents containing it
        rng = np.random.default_rng(9)
        doc_rows = rng.standard_normal((20, 32))
        doc_ids = [f"d{i}" for i in range(20)]
        vocab = [f"word{j}" for j in range(8)]
        member_docs = {w: rng.choice(20, size=3, replace=False) for w in vocab}
        docs = [
            Document(
                id=doc_ids[i],
                text=" ".join(w for w in vocab if i in member_docs[w]) or "fillertoken",
                token_count=1,
            )
            for i in range(20)
        ]
        texts = []
        for w in vocab:
            texts.extend([w] * 3)  # three occurrences so min_word_count=3 keeps it
        docs.append(Document(id="dx", text=" ".join(texts), token_count=len(texts)))
        doc_rows = np.vstack([doc_rows, rng.standard_normal(32)])
        corpus = build_corpus(docs, "j", stopwords=frozenset())
        docs_emb = make_matrix(doc_ids + ["dx"], doc_rows)

        class MeanProvider:
            def __call__(self, tokens):
                out = []
                for tok in tokens:
                    if tok in member_docs:
                        out.append(doc_rows[member_docs[tok]].mean(axis=0))
                    else:
                        out.append(doc_rows.mean(axis=0))
                return np.stack(out)

        joint = embed_vocabulary(corpus, docs_emb, MeanProvider(), min_word_count=3)
        for w in vocab:
            wv = joint.words.row_for(w)
            sims = doc_rows[:20] @ wv / (
                np.linalg.norm(doc_rows[:20], axis=1) * np.linalg.norm(wv)
            )
            nearest = int(np.argmax(sims))
            assert nearest in member_docs[w]


class _Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        vectors = [[float(len(t)), 1.0] for t in body["texts"]]
        payload = json.dumps({"vectors": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


class TestHttpProvider:
    def test_round_trip(self):
        server = HTTPServer(("127.0.0.1", 0), _Handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            provider = HttpEmbeddingProvider(f"http://127.0.0.1:{server.server_port}/")
            vectors = provider(["ab", "xyz"])
            np.testing.assert_array_equal(vectors, [[2.0, 1.0], [3.0, 1.0]])
        finally:
            server.shutdown()


class TestManifest:
    def test_round_trip(self, tmp_path):
        emb = tmp_path / "x.emb"
        write_embeddings(make_matrix(["a"], [[1.0, 0.0]]), emb)
        write_manifest(emb, "enc-v1", 2, "abc123")
        manifest = read_manifest(emb)
        assert manifest == {"model_id": "enc-v1", "dim": 2, "digest": "abc123"}

    def test_absent(self, tmp_path):
        emb = tmp_path / "y.emb"
        write_embeddings(make_matrix(["a"], [[1.0, 0.0]]), emb)
        assert read_manifest(emb) is None
