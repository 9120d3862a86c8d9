"""Cross-corpus topic modelling for verse-structured texts.

Pipeline: embed (precomputed vectors in) -> reduce (PCA / UMAP) ->
cluster (KMeans / HDBSCAN) -> centroid topic vectors and nearest-word
topics -> TC-NPMI coherence -> cross-corpus cosine comparison.
"""

__version__ = "0.1.0"

from .cluster import ClusterAssignment, HdbscanParams, core_distance, hdbscan, kmeans, mutual_reachability
from .coherence import CoherenceReport, WindowIndex, build_window_index, coherence, npmi
from .compare import SimilarityReport, cosine, similarity_matrix
from .corpus import (
    Corpus,
    CorpusStats,
    Document,
    NgramTable,
    build_corpus,
    clean_text,
    load_stopwords,
    ngrams,
    segment,
)
from .embedding import (
    EmbeddingMatrix,
    JointEmbedding,
    embed_vocabulary,
    normalize,
    read_embeddings,
    write_embeddings,
)
from .lda import LdaModel, document_log_likelihood, lda_fit, lda_topics
from .reduce import ReducedMatrix, UmapParams, pca, project_2d, umap
from .topics import (
    SweepResult,
    TopicModel,
    build_topic_model,
    reduce_topics,
    sweep,
    top_words,
    topic_vectors,
)

__all__ = [
    "__version__",
    "ClusterAssignment", "HdbscanParams", "core_distance", "hdbscan", "kmeans",
    "mutual_reachability",
    "CoherenceReport", "WindowIndex", "build_window_index", "coherence", "npmi",
    "SimilarityReport", "cosine", "similarity_matrix",
    "Corpus", "CorpusStats", "Document", "NgramTable", "build_corpus",
    "clean_text", "load_stopwords", "ngrams", "segment",
    "EmbeddingMatrix", "JointEmbedding", "embed_vocabulary", "normalize",
    "read_embeddings", "write_embeddings",
    "LdaModel", "document_log_likelihood", "lda_fit", "lda_topics",
    "ReducedMatrix", "UmapParams", "pca", "project_2d", "umap",
    "SweepResult", "TopicModel", "build_topic_model", "reduce_topics",
    "sweep", "top_words", "topic_vectors",
]
