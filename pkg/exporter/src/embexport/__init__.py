"""Offline embedding exporter producing EMB1 interchange files."""

__version__ = "0.1.0"

from .emb1 import write_emb1, write_manifest
from .encoders import EncoderError, HashedMeanEncoder, SbertEncoder, load_encoder

__all__ = [
    "__version__",
    "write_emb1",
    "write_manifest",
    "EncoderError",
    "HashedMeanEncoder",
    "SbertEncoder",
    "load_encoder",
]
