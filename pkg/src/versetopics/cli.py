"""Command-line pipeline runner.

Subcommands mirror the pipeline stages:

    ingest     raw text / JSONL -> corpus JSONL + stats JSON
    ngrams     corpus JSONL -> top n-gram table JSON
    topics     corpus + embeddings -> topic model JSON (+ vectors sidecar,
               assignment CSV)
    sweep      corpus + embeddings -> clustering-parameter sweep JSON
    coherence  topic/LDA model + corpus -> TC-NPMI report JSON
    lda        corpus -> LDA baseline model JSON
    compare    two topic models -> similarity JSON + matrix CSV + heatmap SVG
    project    corpus + embeddings -> 2-D projection CSV + scatter SVG

Options may come from a ``key = value`` config file (``--config``); a flag
given on the command line overrides the config.  Every artifact embeds
provenance: the parameters, the seed, and SHA-256 digests of the inputs.
Outputs are byte-identical across runs with the same config and inputs.

Exit codes: 0 success, 2 invalid parameters, 3 missing input,
4 malformed input / failed validation, 5 provenance mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .cluster import ClusterError, HdbscanParams, hdbscan, kmeans
from .coherence import CoherenceError, build_window_index, coherence
from .compare import CompareError, similarity_matrix
from .corpus import (
    CorpusError,
    build_corpus,
    ngrams,
    read_documents_jsonl,
    segment,
    stats_dict,
    write_corpus_jsonl,
)
from .embedding import EmbeddingError, normalize, read_embeddings, read_manifest
from .lda import LdaError, lda_fit
from .reduce import ReduceError, UmapParams, pca, project_2d, umap
from .report import (
    ReportError,
    heatmap_svg,
    scatter_svg,
    write_assignment_csv,
    write_json,
    write_matrix_csv,
    write_projection_csv,
)
from .serialize import (
    lda_payload,
    load_topic_model,
    save_topic_model,
    similarity_payload,
    sweep_payload,
)
from .topics import (
    DEFAULT_SWEEP_GRID,
    TopicsError,
    build_topic_model,
    reduce_topics,
    sweep,
)

EXIT_OK = 0
EXIT_PARAMS = 2
EXIT_MISSING = 3
EXIT_FORMAT = 4
EXIT_PROVENANCE = 5


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code = code
        self.kind = kind


def _fail(code: int, kind: str, message: str) -> CliError:
    return CliError(code, kind, message)


def load_config(path: str) -> dict[str, str]:
    """Parse a ``key = value`` config file; '#' starts a comment."""
    config: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(EXIT_MISSING, "missing-config", f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _fail(EXIT_FORMAT, "bad-config", f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


class Options:
    """Merged view of config-file values and command-line flags."""

    def __init__(self, config: dict[str, str], args: argparse.Namespace):
        self.config = config
        self.args = args

    def get(self, key: str, default=None, cast=None):
        attr = key.replace(".", "_").replace("-", "_")
        value = getattr(self.args, attr, None)
        if value is None:
            value = self.config.get(key)
        if value is None:
            return default
        if cast is not None and isinstance(value, str):
            if cast is bool:
                return value.lower() in ("1", "true", "yes", "on")
            try:
                return cast(value)
            except (TypeError, ValueError):
                raise _fail(EXIT_PARAMS, "bad-param", f"invalid value for {key}: {value!r}")
        return value

    def require(self, key: str, cast=None):
        value = self.get(key, cast=cast)
        if value is None:
            raise _fail(EXIT_PARAMS, "missing-param", f"required option {key} not given")
        return value


def _digest(path: str | Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
    except OSError as exc:
        raise _fail(EXIT_MISSING, "missing-input", f"cannot read {path}: {exc}")


def _check_exists(path: str | Path) -> Path:
    p = Path(path)
    if not p.exists():
        raise _fail(EXIT_MISSING, "missing-input", f"input not found: {p}")
    return p


def _out_dir(opts: Options) -> Path:
    out = Path(opts.get("out", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_corpus(opts: Options, key: str = "corpus"):
    path = _check_exists(opts.require(key))
    try:
        docs = read_documents_jsonl(path)
    except CorpusError as exc:
        raise _fail(EXIT_FORMAT, "bad-corpus", str(exc))
    name = docs[0].source or Path(path).stem.replace(".corpus", "")
    return build_corpus(docs, name), path


def _load_embeddings(opts: Options, key: str = "embeddings"):
    path = _check_exists(opts.require(key))
    try:
        matrix = read_embeddings(path)
    except EmbeddingError as exc:
        raise _fail(EXIT_FORMAT, "bad-embeddings", str(exc))
    return matrix, path


def _embedder_id(opts: Options, emb_path: Path) -> str:
    explicit = opts.get("embedder-id")
    if explicit:
        return explicit
    manifest = read_manifest(emb_path)
    if manifest and "model_id" in manifest:
        return str(manifest["model_id"])
    return "unknown:" + _digest(emb_path)


def _umap_params(opts: Options) -> UmapParams:
    return UmapParams(
        n_neighbors=opts.get("umap.n_neighbors", 10, int),
        min_dist=opts.get("umap.min_dist", 0.1, float),
        n_components=opts.get("umap.n_components", 5, int),
        metric=opts.get("umap.metric", "cosine"),
        seed=opts.get("seed", 42, int),
        n_epochs=opts.get("umap.epochs", 200, int),
        negative_sample_rate=opts.get("umap.negative_sample_rate", 5, int),
    )


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_ingest(opts: Options) -> int:
    path = _check_exists(opts.require("corpus"))
    name = opts.get("name") or path.stem
    out = _out_dir(opts)

    if path.suffix == ".jsonl":
        docs = read_documents_jsonl(path, clean=True)
    else:
        raw = path.read_text(encoding="utf-8")
        mode = opts.get("mode", "verse-numbered")
        try:
            docs = segment(raw, mode, source=name, max_tokens=opts.get("max-tokens", 120, int))
        except CorpusError as exc:
            raise _fail(EXIT_FORMAT, "segmentation", str(exc))
    corpus = build_corpus(docs, name)
    write_corpus_jsonl(corpus, out / f"{name}.corpus.jsonl")
    write_json(stats_dict(corpus), out / f"{name}.stats.json", schema_name="stats")
    return EXIT_OK


def cmd_ngrams(opts: Options) -> int:
    corpus, path = _load_corpus(opts)
    n = opts.get("n", 1, int)
    top_k = opts.get("top", 10, int)
    try:
        table = ngrams(corpus, n, top_k, drop_stopwords=not opts.get("keep-stopwords", False, bool))
    except CorpusError as exc:
        raise _fail(EXIT_PARAMS, "bad-param", str(exc))
    out = _out_dir(opts)
    payload = {
        "n": table.n,
        "entries": [{"tokens": list(toks), "count": count} for toks, count in table.entries],
        "provenance": {"corpus": _digest(path), "top": top_k},
    }
    write_json(payload, out / f"{corpus.name}.ngrams-{n}.json", schema_name="ngrams")
    return EXIT_OK


def _load_word_embeddings(opts: Options, corpus, docs_emb):
    """Word vectors from a file, or from the remote provider (embed.url)
    when no file is given."""
    if opts.get("word-embeddings") is not None:
        words_emb, words_path = _load_embeddings(opts, "word-embeddings")
        if docs_emb.dim != words_emb.dim:
            raise _fail(
                EXIT_FORMAT, "dim-mismatch",
                f"document dim {docs_emb.dim} != word dim {words_emb.dim}",
            )
        return words_emb, _digest(words_path)
    url = opts.get("embed.url")
    if not url:
        raise _fail(
            EXIT_PARAMS, "missing-param",
            "word vectors required: give --word-embeddings or config key embed.url",
        )
    from .embedding import HttpEmbeddingProvider, embed_vocabulary

    joint = embed_vocabulary(
        corpus, docs_emb, HttpEmbeddingProvider(url),
        min_word_count=opts.get("min-word-count", 3, int),
    )
    return joint.words, f"remote:{url}"


def _run_pipeline(opts: Options):
    """Shared corpus+embeddings -> reduced -> assignment -> model path."""
    corpus, corpus_path = _load_corpus(opts)
    docs_emb, docs_path = _load_embeddings(opts, "embeddings")
    words_emb, words_digest = _load_word_embeddings(opts, corpus, docs_emb)

    do_normalize = opts.get("normalize", True, bool)
    working = normalize(docs_emb) if do_normalize else docs_emb

    reducer = opts.get("reducer", "umap")
    seed = opts.get("seed", 42, int)
    if reducer == "umap":
        params = _umap_params(opts)
        reduced = umap(working, params)
        reducer_params = {
            "n_neighbors": params.n_neighbors, "min_dist": params.min_dist,
            "n_components": params.n_components, "metric": params.metric,
            "n_epochs": params.n_epochs,
            "negative_sample_rate": params.negative_sample_rate,
        }
    elif reducer == "pca":
        reduced = pca(working, opts.get("umap.n_components", 5, int))
        reducer_params = {"n_components": reduced.dim}
    else:
        raise _fail(EXIT_PARAMS, "bad-param", f"unknown reducer {reducer!r}")

    clusterer = opts.get("clusterer", "hdbscan")
    if clusterer == "hdbscan":
        h = HdbscanParams(
            min_cluster_size=opts.get("hdbscan.min_cluster_size", 10, int),
            min_samples=opts.get("hdbscan.min_samples", 5, int),
        )
        assignment = hdbscan(reduced, h)
        clusterer_params = {"min_cluster_size": h.min_cluster_size, "min_samples": h.min_samples}
    elif clusterer == "kmeans":
        k = opts.get("k", None, int)
        if k is None:
            raise _fail(EXIT_PARAMS, "missing-param", "kmeans requires --k")
        assignment = kmeans(reduced, k, iters=opts.get("kmeans.iters", 300, int), seed=seed)
        clusterer_params = {"k": k, "iters": opts.get("kmeans.iters", 300, int)}
    else:
        raise _fail(EXIT_PARAMS, "bad-param", f"unknown clusterer {clusterer!r}")

    provenance = {
        "engine": f"versetopics {__version__}",
        "embedder": _embedder_id(opts, docs_path),
        "reducer": reducer,
        "clusterer": clusterer,
        "params": {"reducer": reducer_params, "clusterer": clusterer_params},
        "seed": seed,
        "normalized": bool(do_normalize),
        "inputs": {
            "corpus": _digest(corpus_path),
            "embeddings": _digest(docs_path),
            "word_embeddings": words_digest,
        },
    }
    model = build_topic_model(
        working, words_emb, assignment, n=opts.get("topn", 50, int), provenance=provenance
    )
    return corpus, working, words_emb, model


def cmd_topics(opts: Options) -> int:
    corpus, working, _, model = _run_pipeline(opts)

    target = opts.get("reduce-to", None, int)
    if target is not None:
        if target >= model.k:
            raise _fail(
                EXIT_PARAMS, "bad-param",
                f"--reduce-to {target} must be below the {model.k} topics found",
            )
        model = reduce_topics(model, working, target)

    out = _out_dir(opts)
    save_topic_model(model, out / f"{corpus.name}.topics.json")
    write_assignment_csv(
        model.assignment.item_ids, model.assignment.labels, out / f"{corpus.name}.assignment.csv"
    )
    return EXIT_OK


def cmd_sweep(opts: Options) -> int:
    corpus, corpus_path = _load_corpus(opts)
    docs_emb, docs_path = _load_embeddings(opts, "embeddings")
    words_emb, _ = _load_word_embeddings(opts, corpus, docs_emb)
    working = normalize(docs_emb) if opts.get("normalize", True, bool) else docs_emb

    grid = DEFAULT_SWEEP_GRID
    sizes = opts.get("sweep.min_cluster_sizes")
    samples = opts.get("sweep.min_samples")
    if sizes or samples:
        try:
            size_list = [int(v) for v in str(sizes or "5,10,15,20,25").split(",")]
            sample_list = [int(v) for v in str(samples or "3,5,8").split(",")]
        except ValueError:
            raise _fail(EXIT_PARAMS, "bad-param", "sweep grid lists must be comma-separated ints")
        grid = tuple(
            HdbscanParams(min_cluster_size=mcs, min_samples=ms)
            for mcs in size_list
            for ms in sample_list
        )
    result = sweep(
        working,
        words_emb,
        corpus,
        _umap_params(opts),
        grid,
        top_n=opts.get("topn", 50, int),
        coherence_n=opts.get("coherence-n", 10, int),
        window=opts.get("window", 110, int),
    )
    out = _out_dir(opts)
    provenance = {
        "seed": opts.get("seed", 42, int),
        "inputs": {"corpus": _digest(corpus_path), "embeddings": _digest(docs_path)},
    }
    write_json(sweep_payload(result, provenance), out / f"{corpus.name}.sweep.json", schema_name="sweep")
    return EXIT_OK


def cmd_coherence(opts: Options) -> int:
    corpus, corpus_path = _load_corpus(opts)
    model_path = _check_exists(opts.require("model"))
    payload = json.loads(model_path.read_text(encoding="utf-8"))
    if "topics" in payload and payload.get("topics") and isinstance(payload["topics"][0], dict):
        word_lists = [[w for w, _ in t["top_words"]] for t in payload["topics"]]
    elif "topics" in payload:  # LDA layout: topics is a list of [word, prob] lists
        word_lists = [[w for w, _ in topic] for topic in payload["topics"]]
    else:
        raise _fail(EXIT_FORMAT, "bad-model", f"{model_path} has no topics field")

    n = opts.get("topn", None, int)
    max_n = min(len(words) for words in word_lists)
    n = max_n if n is None else min(n, max_n)
    index = build_window_index(corpus, opts.get("window", 110, int))
    try:
        report = coherence(word_lists, index, n)
    except CoherenceError as exc:
        raise _fail(EXIT_PARAMS, "bad-param", str(exc))

    out = _out_dir(opts)
    write_json(
        {
            "mean": report.mean,
            "per_topic": report.per_topic,
            "n": report.n,
            "epsilon": report.epsilon,
            "skipped_words": report.skipped_words,
        },
        out / f"{corpus.name}.coherence.json",
        schema_name="coherence",
    )
    return EXIT_OK


def cmd_lda(opts: Options) -> int:
    corpus, corpus_path = _load_corpus(opts)
    k = opts.require("k", int)
    try:
        model = lda_fit(corpus, k, iters=opts.get("iters", 200, int), seed=opts.get("seed", 42, int))
    except LdaError as exc:
        raise _fail(EXIT_PARAMS, "bad-param", str(exc))
    out = _out_dir(opts)
    provenance = {"corpus": _digest(corpus_path), "seed": opts.get("seed", 42, int)}
    write_json(
        lda_payload(model, n_words=opts.get("topn", 10, int), provenance=provenance),
        out / f"{corpus.name}.lda.json",
        schema_name="lda_model",
    )
    return EXIT_OK


def cmd_compare(opts: Options) -> int:
    path_a = _check_exists(opts.require("model-a"))
    path_b = _check_exists(opts.require("model-b"))
    try:
        model_a = load_topic_model(path_a)
        model_b = load_topic_model(path_b)
    except (EmbeddingError, OSError, KeyError, json.JSONDecodeError) as exc:
        raise _fail(EXIT_FORMAT, "bad-model", f"cannot load model: {exc}")
    try:
        report = similarity_matrix(model_a, model_b)
    except CompareError as exc:
        raise _fail(EXIT_PROVENANCE, "provenance-mismatch", str(exc))

    out = _out_dir(opts)
    stem = opts.get("name") or f"{path_a.stem.split('.')[0]}-vs-{path_b.stem.split('.')[0]}"
    provenance = {
        "model_a": _digest(path_a),
        "model_b": _digest(path_b),
        "embedder": model_a.provenance.get("embedder"),
    }
    write_json(
        similarity_payload(report, provenance), out / f"{stem}.similarity.json",
        schema_name="similarity",
    )
    row_labels = [f"A{i}" for i in range(report.matrix.shape[0])]
    col_labels = [f"B{j}" for j in range(report.matrix.shape[1])]
    write_matrix_csv(report.matrix, row_labels, col_labels, out / f"{stem}.similarity.csv")
    heatmap_svg(report.matrix, row_labels, col_labels, out / f"{stem}.heatmap.svg", title=stem)
    return EXIT_OK


def cmd_project(opts: Options) -> int:
    corpus, _ = _load_corpus(opts)
    docs_emb, _ = _load_embeddings(opts, "embeddings")
    working = normalize(docs_emb) if opts.get("normalize", True, bool) else docs_emb
    method = opts.get("reducer", "pca")
    if method not in ("pca", "umap"):
        raise _fail(EXIT_PARAMS, "bad-param", f"unknown reducer {method!r}")
    proj = project_2d(working, method, seed=opts.get("seed", 42, int))

    model_path = opts.get("model")
    if model_path:
        from .topics import nearest_topic_labels

        model = load_topic_model(_check_exists(model_path))
        # label by nearest topic vector; display labels carry top-3 words
        names = [f"{t}: " + " ".join(w for w, _ in model.top_words[t][:3]) for t in range(model.k)]
        nearest = nearest_topic_labels(model.topic_vectors, working)
        labels = [names[t] for t in nearest]
    else:
        by_id = {doc.id: doc.source or corpus.name for doc in corpus.documents}
        labels = [by_id.get(i, corpus.name) for i in proj.item_ids]

    out = _out_dir(opts)
    write_projection_csv(proj, labels, out / f"{corpus.name}.projection-{method}.csv")
    scatter_svg(proj, labels, out / f"{corpus.name}.projection-{method}.svg", title=corpus.name)
    return EXIT_OK


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

COMMANDS = {
    "ingest": cmd_ingest,
    "ngrams": cmd_ngrams,
    "topics": cmd_topics,
    "sweep": cmd_sweep,
    "coherence": cmd_coherence,
    "lda": cmd_lda,
    "compare": cmd_compare,
    "project": cmd_project,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="versetopics", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, *flags: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--out")
        for flag in flags:
            dest = flag.lstrip("-").replace(".", "_").replace("-", "_")
            if flag in ("--keep-stopwords", "--no-normalize"):
                p.add_argument(flag, dest=dest, action="store_true", default=None)
            else:
                p.add_argument(flag, dest=dest)
        return p

    add("ingest", "--corpus", "--name", "--mode", "--max-tokens")
    add("ngrams", "--corpus", "--n", "--top", "--keep-stopwords")
    add(
        "topics", "--corpus", "--embeddings", "--word-embeddings", "--reducer",
        "--clusterer", "--k", "--topn", "--seed", "--embedder-id", "--reduce-to",
        "--umap.n_neighbors", "--umap.min_dist", "--umap.n_components",
        "--umap.epochs", "--hdbscan.min_cluster_size", "--hdbscan.min_samples",
        "--kmeans.iters", "--no-normalize",
    )
    add(
        "sweep", "--corpus", "--embeddings", "--word-embeddings", "--topn",
        "--coherence-n", "--window", "--seed", "--umap.n_neighbors",
        "--umap.min_dist", "--umap.n_components", "--umap.epochs",
        "--sweep.min_cluster_sizes", "--sweep.min_samples", "--no-normalize",
    )
    add("coherence", "--corpus", "--model", "--topn", "--window")
    add("lda", "--corpus", "--k", "--iters", "--seed", "--topn")
    add("compare", "--model-a", "--model-b", "--name")
    add("project", "--corpus", "--embeddings", "--reducer", "--seed", "--model", "--no-normalize")
    return parser


_ERROR_CODES = {
    CorpusError: (EXIT_FORMAT, "corpus"),
    EmbeddingError: (EXIT_FORMAT, "embeddings"),
    ReduceError: (EXIT_PARAMS, "reduce"),
    ClusterError: (EXIT_PARAMS, "cluster"),
    TopicsError: (EXIT_PARAMS, "topics"),
    CoherenceError: (EXIT_PARAMS, "coherence"),
    LdaError: (EXIT_PARAMS, "lda"),
    CompareError: (EXIT_PROVENANCE, "compare"),
    ReportError: (EXIT_FORMAT, "report"),
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "no_normalize", None):
        args.normalize = False
    try:
        config = load_config(args.config) if args.config else {}
        opts = Options(config, args)
        return COMMANDS[args.command](opts)
    except CliError as exc:
        print(
            json.dumps({"error": {"code": exc.code, "kind": exc.kind, "message": str(exc)}}),
            file=sys.stderr,
        )
        return exc.code
    except tuple(_ERROR_CODES) as exc:
        code, kind = _ERROR_CODES[type(exc)]
        print(
            json.dumps({"error": {"code": code, "kind": kind, "message": str(exc)}}),
            file=sys.stderr,
        )
        return code


if __name__ == "__main__":
    sys.exit(main())
