"""Export embeddings for a corpus into the EMB1 interchange format.

    embexport export --corpus verses.corpus.jsonl --model hash-mean-512-v1 \
        --target documents --out verses.docs.emb

``--target documents`` encodes each document's text, one row per corpus
line in file order.  ``--target vocabulary`` encodes each unique token
(first-occurrence order) with at least ``--min-count`` occurrences.  A
manifest JSON next to the output records the model id and digest.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .emb1 import write_emb1, write_manifest
from .encoders import EncoderError, load_encoder


def read_corpus(path: Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "id" not in record or "text" not in record:
                raise ValueError(f"{path}:{lineno}: missing id/text field")
            records.append(record)
    if not records:
        raise ValueError(f"{path}: empty corpus")
    return records


def vocabulary_of(records: list[dict], min_count: int) -> list[str]:
    counts: dict[str, int] = {}
    order: list[str] = []
    for record in records:
        for token in str(record["text"]).split():
            if token not in counts:
                order.append(token)
                counts[token] = 0
            counts[token] += 1
    return [t for t in order if counts[t] >= min_count]


def cmd_export(args: argparse.Namespace) -> int:
    corpus_path = Path(args.corpus)
    if not corpus_path.exists():
        print(f"error: corpus not found: {corpus_path}", file=sys.stderr)
        return 3
    try:
        records = read_corpus(corpus_path)
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4

    try:
        encoder = load_encoder(args.model, batch_size=args.batch_size)
    except EncoderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5

    if args.target == "documents":
        ids = [str(r["id"]) for r in records]
        texts = [str(r["text"]) for r in records]
    else:
        ids = vocabulary_of(records, args.min_count)
        if not ids:
            print("error: no vocabulary tokens meet --min-count", file=sys.stderr)
            return 4
        texts = list(ids)

    vectors = encoder.encode(texts)
    if vectors.shape != (len(ids), encoder.dim):
        print(
            f"error: encoder returned shape {vectors.shape}, "
            f"expected ({len(ids)}, {encoder.dim})",
            file=sys.stderr,
        )
        return 5

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    digest = write_emb1(ids, vectors, out_path)
    write_manifest(out_path, encoder.model_id, encoder.dim, digest)
    print(f"wrote {out_path} ({len(ids)} rows, dim {encoder.dim}, sha256 {digest[:16]})")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="embexport", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    export = sub.add_parser("export", help="encode a corpus and write an EMB1 file")
    export.add_argument("--corpus", required=True, help="corpus JSONL ({id, text, ...} per line)")
    export.add_argument("--model", default="hash-mean-512-v1", help="encoder model id")
    export.add_argument(
        "--target", choices=("documents", "vocabulary"), default="documents"
    )
    export.add_argument("--out", required=True, help="output EMB1 path")
    export.add_argument("--min-count", type=int, default=1, help="vocabulary frequency floor")
    export.add_argument("--batch-size", type=int, default=32)
    args = parser.parse_args(argv)
    if args.command == "export":
        return cmd_export(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
