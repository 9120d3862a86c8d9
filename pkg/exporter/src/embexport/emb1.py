"""EMB1 interchange writer.

Layout (little-endian): magic b"EMB1", u32 item count, u32 dimension,
then per item a u16 id length, the UTF-8 id bytes, and dim float32
values.  Files are written atomically (temp file in the target directory,
then rename) so a crashed export never leaves a truncated file behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np


def write_emb1(item_ids: list[str], rows: np.ndarray, path: str | Path) -> str:
    """Write vectors to an EMB1 file; returns the file's sha256 digest."""
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[0] != len(item_ids):
        raise ValueError(f"rows shape {rows.shape} does not match {len(item_ids)} ids")
    parts = [b"EMB1", struct.pack("<II", len(item_ids), rows.shape[1])]
    rows32 = rows.astype("<f4")
    for i, item_id in enumerate(item_ids):
        id_bytes = item_id.encode("utf-8")
        parts.append(struct.pack("<H", len(id_bytes)))
        parts.append(id_bytes)
        parts.append(rows32[i].tobytes())
    blob = b"".join(parts)

    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return hashlib.sha256(blob).hexdigest()


def write_manifest(emb_path: str | Path, model_id: str, dim: int, digest: str) -> None:
    """Companion manifest the consuming engine reads for provenance."""
    manifest = {"model_id": model_id, "dim": dim, "digest": digest[:16]}
    path = Path(str(emb_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
