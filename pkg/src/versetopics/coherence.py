"""Topic coherence via normalized pointwise mutual information.

Probabilities come from "virtual documents": fixed-length token windows
slid (stride 1 by default) across each corpus document independently.  A
document shorter than the window contributes a single window.  Counting
is Boolean per window: a word occurring five times in one window counts
once.  For a pair of words drawn from a topic's top-N list,

    NPMI(wi, wj) = log((P(wi, wj) + eps) / (P(wi) P(wj))) / -log(P(wi, wj) + eps)

and a topic's score is the mean over all unordered pairs of its top-N
words; the corpus-level score is the mean over topics.

The formula is applied exactly as written.  One degenerate corner falls
out of it: a pair present in every single window (joint probability 1)
scores -1, because both logs collapse to log(1 + eps).  Real reference
corpora never hit this; it would require every window of the corpus to
contain both words.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import Corpus


class CoherenceError(ValueError):
    """Raised for invalid coherence parameters."""


DEFAULT_WINDOW = 110
DEFAULT_EPSILON = 1e-12


@dataclass
class WindowIndex:
    """Boolean sliding-window occurrence index over a corpus.

    Attributes:
        window_size: Maximum tokens per virtual document.
        stride: Step between window starts within a document.
        virtual_doc_count: Total number of windows.
        occurrences: word -> set of window ids containing it.
    """

    window_size: int
    stride: int
    virtual_doc_count: int
    occurrences: dict[str, set[int]]
    _pair_cache: dict[tuple[str, str], int] = field(default_factory=dict, repr=False)

    def probability(self, word: str) -> float:
        """P(w): fraction of windows containing the word."""
        return len(self.occurrences.get(word, ())) / self.virtual_doc_count

    def joint_probability(self, wi: str, wj: str) -> float:
        """P(wi, wj): fraction of windows containing both words."""
        key = (wi, wj) if wi <= wj else (wj, wi)
        count = self._pair_cache.get(key)
        if count is None:
            count = len(
                self.occurrences.get(wi, set()) & self.occurrences.get(wj, set())
            )
            self._pair_cache[key] = count
        return count / self.virtual_doc_count

    def contains(self, word: str) -> bool:
        return word in self.occurrences


@dataclass(frozen=True)
class CoherenceReport:
    """Per-topic and mean TC-NPMI for a (topic model, reference corpus) pair."""

    per_topic: list[float]
    mean: float
    n: int
    epsilon: float
    skipped_words: int


def build_window_index(
    corpus: Corpus, s: int = DEFAULT_WINDOW, stride: int = 1
) -> WindowIndex:
    """Slide windows of length ``s`` over each document and index words.

    Raises:
        CoherenceError: if s < 2 or stride < 1.
    """
    if s < 2:
        raise CoherenceError("window size must be >= 2")
    if stride < 1:
        raise CoherenceError("stride must be >= 1")

    occurrences: dict[str, set[int]] = {}
    window_id = 0
    for doc in corpus.documents:
        tokens = doc.tokens()
        if not tokens:
            continue
        if len(tokens) <= s:
            starts = [0]
        else:
            starts = list(range(0, len(tokens) - s + 1, stride))
        for start in starts:
            for word in set(tokens[start : start + s]):
                occurrences.setdefault(word, set()).add(window_id)
            window_id += 1

    if window_id == 0:
        raise CoherenceError("corpus has no tokens to index")
    return WindowIndex(
        window_size=s, stride=stride, virtual_doc_count=window_id, occurrences=occurrences
    )


def npmi(wi: str, wj: str, idx: WindowIndex, eps: float = DEFAULT_EPSILON) -> float:
    """NPMI of a word pair under a window index.

    A zero marginal (word absent from the reference corpus) is smoothed
    with ``eps`` so the value stays defined; callers that need to treat
    absent words specially should check ``idx.contains`` first.

    Raises:
        CoherenceError: if eps <= 0.
    """
    if eps <= 0:
        raise CoherenceError("eps must be positive")
    p_i = idx.probability(wi) or eps
    p_j = idx.probability(wj) or eps
    joint = idx.joint_probability(wi, wj) + eps
    return math.log(joint / (p_i * p_j)) / -math.log(joint)


def coherence(
    topics,
    corpus_or_index: Corpus | WindowIndex,
    n: int,
    eps: float = DEFAULT_EPSILON,
) -> CoherenceReport:
    """Mean pairwise NPMI over each topic's top-n words.

    ``topics`` is either a topic model (anything with a ``top_words``
    attribute of ranked (word, score) lists) or a bare list of ranked
    word lists.  Words absent from the reference corpus are skipped; the
    count of skips is reported.  A topic with fewer than two present
    words scores 0.

    Raises:
        CoherenceError: if n exceeds the shortest provided word list.
    """
    if hasattr(topics, "top_words"):
        top_words = [[w for w, _ in topic] for topic in topics.top_words]
    else:
        top_words = [list(words) for words in topics]
    idx = (
        corpus_or_index
        if isinstance(corpus_or_index, WindowIndex)
        else build_window_index(corpus_or_index)
    )
    if any(len(words) < n for words in top_words):
        raise CoherenceError("n exceeds the provided top-word list length")

    per_topic: list[float] = []
    skipped = 0
    for words in top_words:
        present = [w for w in words[:n] if idx.contains(w)]
        skipped += n - len(present)
        if len(present) < 2:
            per_topic.append(0.0)
            continue
        values = [
            npmi(present[i], present[j], idx, eps)
            for i in range(len(present))
            for j in range(i + 1, len(present))
        ]
        per_topic.append(sum(values) / len(values))

    return CoherenceReport(
        per_topic=per_topic,
        mean=sum(per_topic) / len(per_topic),
        n=n,
        epsilon=eps,
        skipped_words=skipped,
    )
