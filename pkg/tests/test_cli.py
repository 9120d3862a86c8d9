"""CLI subcommands: artifacts, schemas, exit codes, config handling."""

import json
from pathlib import Path

import numpy as np
import pytest

from versetopics.cli import main
from versetopics.corpus import Document, build_corpus, write_corpus_jsonl
from versetopics.embedding import EmbeddingMatrix, write_embeddings, write_manifest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def make_pipeline_inputs(tmp_path, name="tiny", n_topics=3, docs_per=30, embedder="enc-t"):
    """Small planted corpus + EMB1 files for fast pipeline runs."""
    tmp_path.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(31)
    dim = 16
    centers = np.zeros((n_topics, dim))
    for t in range(n_topics):
        centers[t, t] = 6.0
    pools = [[f"theme{t}word{j}" for j in range(8)] for t in range(n_topics)]
    docs, rows = [], []
    for t in range(n_topics):
        for i in range(docs_per):
            text = " ".join(rng.choice(pools[t], size=6, replace=False))
            docs.append(Document(id=f"d{t}-{i}", text=text, source=name, token_count=6))
            rows.append(centers[t] + rng.standard_normal(dim) * 0.3)
    corpus = build_corpus(docs, name, stopwords=frozenset())
    corpus_path = tmp_path / f"{name}.corpus.jsonl"
    write_corpus_jsonl(corpus, corpus_path)

    demb_path = tmp_path / f"{name}.docs.emb"
    write_embeddings(
        EmbeddingMatrix(item_ids=[d.id for d in docs], dim=dim, rows=np.array(rows)), demb_path
    )
    write_manifest(demb_path, embedder, dim, "t")

    word_ids = [w for pool in pools for w in pool]
    word_rows = np.array(
        [centers[t] + rng.standard_normal(dim) * 0.25 for t in range(n_topics) for _ in range(8)]
    )
    wemb_path = tmp_path / f"{name}.words.emb"
    write_embeddings(EmbeddingMatrix(item_ids=word_ids, dim=dim, rows=word_rows), wemb_path)
    write_manifest(wemb_path, embedder, dim, "t")
    return corpus_path, demb_path, wemb_path


def run_topics(tmp_path, out, corpus_path, demb_path, wemb_path, *extra):
    code = main(
        [
            "topics",
            "--corpus", str(corpus_path),
            "--embeddings", str(demb_path),
            "--word-embeddings", str(wemb_path),
            "--umap.n_neighbors", "8",
            "--topn", "8",
            "--out", str(out),
            *extra,
        ]
    )
    assert code == 0
    return out


class TestIngest:
    def test_fixture_text_matches_bundled_corpus(self, tmp_path):
        code = main(
            [
                "ingest",
                "--corpus", str(FIXTURES / "meadow.txt"),
                "--name", "meadow",
                "--out", str(tmp_path),
            ]
        )
        assert code == 0
        stats = json.loads((tmp_path / "meadow.stats.json").read_text())
        assert stats["documents"] == 700
        assert stats["verses"] == 700
        assert stats["words"] == 20299
        assert round(stats["avg_words"], 1) == 29.0
        produced = (tmp_path / "meadow.corpus.jsonl").read_bytes()
        assert produced == (FIXTURES / "meadow.corpus.jsonl").read_bytes()

    def test_parenthesized_markers_corpus(self, tmp_path):
        code = main(
            [
                "ingest",
                "--corpus", str(FIXTURES / "orchard.txt"),
                "--name", "orchard",
                "--out", str(tmp_path),
            ]
        )
        assert code == 0
        stats = json.loads((tmp_path / "orchard.stats.json").read_text())
        assert stats["documents"] == 600
        assert stats["verses"] == 600

    def test_jsonl_ingest_cleans_text(self, tmp_path):
        src = tmp_path / "in.jsonl"
        src.write_text(json.dumps({"id": "v1", "text": "Thy Light!"}) + "\n")
        code = main(["ingest", "--corpus", str(src), "--name", "mini", "--out", str(tmp_path)])
        assert code == 0
        doc = json.loads((tmp_path / "mini.corpus.jsonl").read_text().splitlines()[0])
        assert doc["text"] == "your light"

    def test_missing_input_exit_3(self, tmp_path, capsys):
        code = main(["ingest", "--corpus", str(tmp_path / "nope.txt"), "--out", str(tmp_path)])
        assert code == 3
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"]["code"] == 3


class TestNgrams:
    def test_fixture_top_unigrams(self, tmp_path):
        code = main(
            [
                "ngrams",
                "--corpus", str(FIXTURES / "meadow.corpus.jsonl"),
                "--n", "1",
                "--top", "5",
                "--out", str(tmp_path),
            ]
        )
        assert code == 0
        payload = json.loads((tmp_path / "meadow.ngrams-1.json").read_text())
        words = [e["tokens"][0] for e in payload["entries"]]
        # the corpus plants these as its dominant cross-theme words
        assert words[0] == "self"
        assert "mind" in words and "action" in words

    def test_invalid_n_exit_2(self, tmp_path, capsys):
        code = main(
            [
                "ngrams",
                "--corpus", str(FIXTURES / "meadow.corpus.jsonl"),
                "--n", "7",
                "--out", str(tmp_path),
            ]
        )
        assert code == 2
        assert json.loads(capsys.readouterr().err.strip())["error"]["code"] == 2


class TestTopicsCommand:
    def test_hdbscan_pipeline_artifacts(self, tmp_path):
        inputs = make_pipeline_inputs(tmp_path)
        out = run_topics(tmp_path, tmp_path / "out", *inputs)
        payload = json.loads((out / "tiny.topics.json").read_text())
        assert len(payload["topics"]) == 3
        assert payload["provenance"]["embedder"] == "enc-t"
        assert payload["provenance"]["clusterer"] == "hdbscan"
        assert (out / "tiny.topics.json.vectors.emb").exists()
        assert (out / "tiny.assignment.csv").exists()
        top0 = [w for w, _ in payload["topics"][0]["top_words"]]
        assert len(top0) == 8 and len(set(top0)) == 8

    def test_kmeans_requires_k(self, tmp_path, capsys):
        corpus_path, demb, wemb = make_pipeline_inputs(tmp_path)
        code = main(
            [
                "topics",
                "--corpus", str(corpus_path),
                "--embeddings", str(demb),
                "--word-embeddings", str(wemb),
                "--clusterer", "kmeans",
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 2
        assert json.loads(capsys.readouterr().err.strip())["error"]["code"] == 2

    def test_kmeans_pipeline(self, tmp_path):
        inputs = make_pipeline_inputs(tmp_path)
        out = run_topics(
            tmp_path, tmp_path / "out", *inputs, "--clusterer", "kmeans", "--k", "3"
        )
        payload = json.loads((out / "tiny.topics.json").read_text())
        assert len(payload["topics"]) == 3
        assert payload["noise"] == 0

    def test_reduce_to(self, tmp_path):
        inputs = make_pipeline_inputs(tmp_path, n_topics=4)
        out = run_topics(tmp_path, tmp_path / "out", *inputs, "--reduce-to", "2")
        payload = json.loads((out / "tiny.topics.json").read_text())
        assert len(payload["topics"]) == 2
        assert "merge_groups" in payload["provenance"]

    def test_corrupt_embeddings_exit_4(self, tmp_path, capsys):
        corpus_path, demb, wemb = make_pipeline_inputs(tmp_path)
        bad = tmp_path / "bad.emb"
        bad.write_bytes(b"EMB1" + b"\x02\x00\x00\x00\x03\x00\x00\x00" + b"\x00")
        code = main(
            [
                "topics",
                "--corpus", str(corpus_path),
                "--embeddings", str(bad),
                "--word-embeddings", str(wemb),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 4
        assert json.loads(capsys.readouterr().err.strip())["error"]["code"] == 4


class TestCompareCommand:
    def test_self_comparison_avg_sim_one(self, tmp_path):
        inputs = make_pipeline_inputs(tmp_path)
        out = run_topics(tmp_path, tmp_path / "out", *inputs)
        model = out / "tiny.topics.json"
        code = main(
            ["compare", "--model-a", str(model), "--model-b", str(model), "--out", str(out)]
        )
        assert code == 0
        sim = json.loads((out / "tiny-vs-tiny.similarity.json").read_text())
        assert sim["avg_sim"] == 1.0
        assert all(b["score"] == 1.0 and b["a_topic"] == b["b_topic"] for b in sim["best_match"])
        assert (out / "tiny-vs-tiny.heatmap.svg").exists()
        assert (out / "tiny-vs-tiny.similarity.csv").exists()

    def test_embedder_mismatch_exit_5(self, tmp_path, capsys):
        in1 = make_pipeline_inputs(tmp_path / "a", embedder="enc-one")
        in2 = make_pipeline_inputs(tmp_path / "b", embedder="enc-two")
        out1 = run_topics(tmp_path, tmp_path / "oa", *in1)
        out2 = run_topics(tmp_path, tmp_path / "ob", *in2)
        code = main(
            [
                "compare",
                "--model-a", str(out1 / "tiny.topics.json"),
                "--model-b", str(out2 / "tiny.topics.json"),
                "--out", str(tmp_path / "oc"),
            ]
        )
        assert code == 5
        err = json.loads(capsys.readouterr().err.strip())
        assert "enc-one" in err["error"]["message"] and "enc-two" in err["error"]["message"]


class TestCoherenceAndLda:
    def test_coherence_on_topic_model(self, tmp_path):
        inputs = make_pipeline_inputs(tmp_path)
        out = run_topics(tmp_path, tmp_path / "out", *inputs)
        code = main(
            [
                "coherence",
                "--corpus", str(inputs[0]),
                "--model", str(out / "tiny.topics.json"),
                "--topn", "6",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "tiny.coherence.json").read_text())
        assert payload["n"] == 6
        assert payload["mean"] > 0.4  # planted topics are highly coherent

    def test_lda_then_coherence(self, tmp_path):
        corpus_path, _, _ = make_pipeline_inputs(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "lda",
                "--corpus", str(corpus_path),
                "--k", "3",
                "--iters", "40",
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "tiny.lda.json").read_text())
        assert payload["K"] == 3
        trace = payload["elbo_trace"]
        assert all(b >= a - 1e-6 * max(1.0, abs(a)) for a, b in zip(trace, trace[1:]))

        code = main(
            [
                "coherence",
                "--corpus", str(corpus_path),
                "--model", str(out / "tiny.lda.json"),
                "--out", str(out),
            ]
        )
        assert code == 0


class TestProjectCommand:
    def test_projection_csv_and_svg(self, tmp_path):
        corpus_path, demb, _ = make_pipeline_inputs(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "project",
                "--corpus", str(corpus_path),
                "--embeddings", str(demb),
                "--reducer", "pca",
                "--out", str(out),
            ]
        )
        assert code == 0
        lines = (out / "tiny.projection-pca.csv").read_text().splitlines()
        assert lines[0] == "id,x,y,label"
        assert len(lines) == 91
        assert (out / "tiny.projection-pca.svg").exists()


class TestSweepCommand:
    def test_sweep_with_config_grid(self, tmp_path):
        corpus_path, demb, wemb = make_pipeline_inputs(tmp_path)
        config = tmp_path / "run.conf"
        config.write_text(
            "sweep.min_cluster_sizes = 10,15\n"
            "sweep.min_samples = 5\n"
            "umap.n_neighbors = 8  # keep the graph small\n"
            "topn = 8\n"
            "coherence-n = 4\n"
        )
        out = tmp_path / "out"
        code = main(
            [
                "sweep",
                "--config", str(config),
                "--corpus", str(corpus_path),
                "--embeddings", str(demb),
                "--word-embeddings", str(wemb),
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads((out / "tiny.sweep.json").read_text())
        assert len(payload["grid"]) == 2
        best = payload["grid"][payload["best"]]
        assert best["n_topics"] == 3


class TestRemoteWordProvider:
    def test_topics_with_embed_url(self, tmp_path):
        import threading
        from http.server import BaseHTTPRequestHandler, HTTPServer

        corpus_path, demb, _ = make_pipeline_inputs(tmp_path)

        # provider returns each token's planted 16-dim vector: theme{t}word{j}
        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
                vectors = []
                for token in body["texts"]:
                    t = int(token.split("word")[0].replace("theme", ""))
                    vec = [0.0] * 16
                    vec[t] = 6.0
                    vectors.append(vec)
                payload = json.dumps({"vectors": vectors}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        server = HTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        try:
            config = tmp_path / "remote.conf"
            config.write_text(f"embed.url = http://127.0.0.1:{server.server_port}/\n")
            out = tmp_path / "out"
            code = main(
                [
                    "topics",
                    "--config", str(config),
                    "--corpus", str(corpus_path),
                    "--embeddings", str(demb),
                    "--umap.n_neighbors", "8",
                    "--topn", "8",
                    "--out", str(out),
                ]
            )
            assert code == 0
            payload = json.loads((out / "tiny.topics.json").read_text())
            assert len(payload["topics"]) == 3
            assert payload["provenance"]["inputs"]["word_embeddings"].startswith("remote:")
        finally:
            server.shutdown()

    def test_missing_words_and_no_url_exit_2(self, tmp_path, capsys):
        corpus_path, demb, _ = make_pipeline_inputs(tmp_path)
        code = main(
            [
                "topics",
                "--corpus", str(corpus_path),
                "--embeddings", str(demb),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 2
        capsys.readouterr()


class TestConfigPrecedence:
    def test_flag_overrides_config(self, tmp_path, capsys):
        config = tmp_path / "c.conf"
        config.write_text("n = 1\n")
        code = main(
            [
                "ngrams",
                "--config", str(config),
                "--corpus", str(FIXTURES / "meadow.corpus.jsonl"),
                "--n", "7",  # flag wins and is invalid -> exit 2
                "--out", str(tmp_path),
            ]
        )
        assert code == 2
        capsys.readouterr()

    def test_bad_config_line_exit_4(self, tmp_path, capsys):
        config = tmp_path / "c.conf"
        config.write_text("not a key value line\n")
        code = main(
            ["ngrams", "--config", str(config), "--corpus", "x", "--out", str(tmp_path)]
        )
        assert code == 4
        capsys.readouterr()
