"""Latent Dirichlet Allocation baseline, fit by mean-field variational EM.

Documents are bags of vocabulary words (stopwords excluded).  The
variational family is the standard mean-field one: a Dirichlet posterior
gamma per document over topics and a per-token multinomial phi over
topics.  The E-step iterates the (gamma, phi) fixed point per document
(warm-started across outer iterations so the evidence bound is monotone);
the M-step sets each topic's word distribution proportional to expected
topic-word counts with a 1e-9 floor.  The bound is recorded once per
outer iteration.

Priors are symmetric with alpha = 1/K and are not learned.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gammaln

from .corpus import Corpus


class LdaError(ValueError):
    """Raised for invalid LDA inputs."""


@dataclass
class LdaModel:
    """A fitted LDA model.

    Attributes:
        K: Topic count.
        alpha: Symmetric per-topic Dirichlet prior.
        beta: K x V topic-word probabilities; rows sum to 1.
        gamma: M x K variational Dirichlet parameters per document.
        elbo_trace: Evidence lower bound after each outer iteration.
        vocabulary: Word for each beta column.
    """

    K: int
    alpha: float
    beta: np.ndarray
    gamma: np.ndarray
    elbo_trace: list[float]
    vocabulary: list[str]


def _bag_of_words(corpus: Corpus) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per document: (term id array, count array) over the corpus vocabulary."""
    index = {w: i for i, w in enumerate(corpus.vocabulary)}
    term_ids, term_counts = [], []
    for doc in corpus.documents:
        counts: dict[int, int] = {}
        for tok in doc.tokens():
            t = index.get(tok)
            if t is not None:
                counts[t] = counts.get(t, 0) + 1
        items = sorted(counts.items())
        term_ids.append(np.array([t for t, _ in items], dtype=np.int64))
        term_counts.append(np.array([c for _, c in items], dtype=np.float64))
    return term_ids, term_counts


def lda_fit(corpus: Corpus, K: int, iters: int = 200, seed: int = 42) -> LdaModel:
    """Fit LDA by variational EM.

    Raises:
        LdaError: empty vocabulary, K < 1, or iters < 1.
    """
    V = len(corpus.vocabulary)
    if V == 0:
        raise LdaError("corpus vocabulary is empty")
    if K < 1 or iters < 1:
        raise LdaError("K and iters must be positive")

    term_ids, term_counts = _bag_of_words(corpus)
    M = len(term_ids)
    alpha = 1.0 / K

    rng = np.random.default_rng(seed)
    beta = rng.random((K, V)) + 1.0 / V
    beta /= beta.sum(axis=1, keepdims=True)

    gamma = np.full((M, K), alpha, dtype=np.float64)
    for d in range(M):
        if term_ids[d].size:
            gamma[d] += term_counts[d].sum() / K

    elbo_trace: list[float] = []
    log_prior_const = gammaln(K * alpha) - K * gammaln(alpha)

    for _ in range(iters):
        expected_counts = np.zeros((K, V))
        elbo = 0.0
        log_beta = np.log(beta)

        for d in range(M):
            ids, counts = term_ids[d], term_counts[d]
            if ids.size == 0:
                continue  # bound contribution is exactly zero at gamma = alpha
            g = gamma[d]
            log_beta_d = log_beta[:, ids]
            for _inner in range(100):
                e_log_theta = digamma(g) - digamma(g.sum())
                log_phi = log_beta_d + e_log_theta[:, None]
                log_phi -= log_phi.max(axis=0, keepdims=True)
                phi = np.exp(log_phi)
                phi /= phi.sum(axis=0, keepdims=True)
                g_new = alpha + phi @ counts
                delta = float(np.abs(g_new - g).mean())
                g = g_new
                if delta < 1e-3:
                    break
            gamma[d] = g
            expected_counts[:, ids] += phi * counts

            e_log_theta = digamma(g) - digamma(g.sum())
            elbo += log_prior_const + float(((alpha - 1.0) * e_log_theta).sum())
            elbo += float((counts * (phi * e_log_theta[:, None]).sum(axis=0)).sum())
            elbo += float((counts * (phi * log_beta_d).sum(axis=0)).sum())
            elbo -= float(
                gammaln(g.sum()) - gammaln(g).sum() + ((g - 1.0) * e_log_theta).sum()
            )
            with np.errstate(divide="ignore", invalid="ignore"):
                phi_entropy = np.where(phi > 0, phi * np.log(phi), 0.0)
            elbo -= float((counts * phi_entropy.sum(axis=0)).sum())

        elbo_trace.append(elbo)
        floored = np.maximum(expected_counts, 1e-9)
        beta = floored / floored.sum(axis=1, keepdims=True)

    return LdaModel(
        K=K,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        elbo_trace=elbo_trace,
        vocabulary=list(corpus.vocabulary),
    )


def lda_topics(model: LdaModel, vocab: list[str] | None = None, n: int = 10) -> list[list[tuple[str, float]]]:
    """Per topic, the top-n words by probability (ties keep vocab order).

    Raises:
        LdaError: if n exceeds the vocabulary size.
    """
    vocab = vocab if vocab is not None else model.vocabulary
    V = model.beta.shape[1]
    if n > V:
        raise LdaError(f"n={n} exceeds vocabulary size {V}")
    out = []
    for k in range(model.K):
        order = np.lexsort((np.arange(V), -model.beta[k]))[:n]
        out.append([(vocab[j], float(model.beta[k, j])) for j in order])
    return out


def document_log_likelihood(model: LdaModel, tokens: list[str]) -> float:
    """Exact log p(w) of a short document under the fitted model.

    Sums over all K^N topic assignments, integrating the topic proportions
    against the Dirichlet prior in closed form (ratios of multivariate
    Beta functions).  Cost is K**N; intended for tiny documents.

    Raises:
        LdaError: for unknown tokens or documents longer than 12 tokens.
    """
    if len(tokens) > 12:
        raise LdaError("exact likelihood is exponential in length; max 12 tokens")
    index = {w: i for i, w in enumerate(model.vocabulary)}
    try:
        word_ids = [index[t] for t in tokens]
    except KeyError as exc:
        raise LdaError(f"token not in model vocabulary: {exc.args[0]!r}") from exc

    K, alpha = model.K, model.alpha
    log_beta = np.log(model.beta)
    log_b_prior = float(gammaln(alpha) * K - gammaln(alpha * K))

    total = -math.inf
    for assignment in itertools.product(range(K), repeat=len(word_ids)):
        counts = np.zeros(K)
        log_word_terms = 0.0
        for z, w in zip(assignment, word_ids):
            counts[z] += 1.0
            log_word_terms += float(log_beta[z, w])
        log_moment = float(
            gammaln(alpha + counts).sum() - gammaln(alpha * K + counts.sum())
        ) - log_b_prior
        total = np.logaddexp(total, log_word_terms + log_moment)
    return float(total)
