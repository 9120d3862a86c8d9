"""Variational EM: bound monotonicity, degenerate cases, generative recovery."""

import itertools

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from versetopics.corpus import Document, build_corpus
from versetopics.lda import LdaError, document_log_likelihood, lda_fit, lda_topics


def corpus_of(texts, name="c"):
    docs = [
        Document(id=f"d{i}", text=t, token_count=len(t.split())) for i, t in enumerate(texts)
    ]
    return build_corpus(docs, name, stopwords=frozenset())


def elbo_nondecreasing(trace, slack=1e-6):
    return all(
        later >= earlier - slack * max(1.0, abs(earlier))
        for earlier, later in zip(trace, trace[1:])
    )


def generative_corpus(seed=42, K=3, V=50, M=200):
    rng = np.random.default_rng(seed)
    true_beta = rng.dirichlet([0.08] * V, size=K)
    vocab = [f"w{v}" for v in range(V)]
    texts = []
    for _ in range(M):
        theta = rng.dirichlet([0.3] * K)
        n = int(rng.integers(20, 60))
        zs = rng.choice(K, size=n, p=theta)
        texts.append(" ".join(vocab[rng.choice(V, p=true_beta[z])] for z in zs))
    return corpus_of(texts, "gen"), true_beta, vocab


class TestLdaFit:
    def test_k1_beta_is_unigram_distribution(self):
        corpus = corpus_of(["a a b"])
        model = lda_fit(corpus, 1, iters=10, seed=0)
        vocab_order = {w: i for i, w in enumerate(corpus.vocabulary)}
        np.testing.assert_allclose(model.beta[0, vocab_order["a"]], 2 / 3, atol=1e-9)
        np.testing.assert_allclose(model.beta[0, vocab_order["b"]], 1 / 3, atol=1e-9)

    def test_disjoint_documents_separate(self):
        corpus = corpus_of(["sun moon sun star", "river stone river weed"])
        model = lda_fit(corpus, 2, iters=50, seed=1)
        dominant = model.gamma.argmax(axis=1)
        assert dominant[0] != dominant[1]
        # each topic's mass concentrates on one document's words
        top = lda_topics(model, n=2)
        words0 = {w for w, _ in top[0]}
        words1 = {w for w, _ in top[1]}
        assert not (words0 & words1)

    def test_beta_rows_are_distributions(self):
        corpus, _, _ = generative_corpus(M=40)
        model = lda_fit(corpus, 3, iters=20, seed=2)
        np.testing.assert_allclose(model.beta.sum(axis=1), 1.0, atol=1e-9)
        assert (model.beta >= 0).all()
        assert (model.gamma > 0).all()

    def test_elbo_nondecreasing_200_iterations(self):
        corpus, _, _ = generative_corpus(M=60)
        model = lda_fit(corpus, 3, iters=200, seed=3)
        assert len(model.elbo_trace) == 200
        assert elbo_nondecreasing(model.elbo_trace)

    def test_fixed_seed_identical(self):
        corpus, _, _ = generative_corpus(M=30)
        m1 = lda_fit(corpus, 3, iters=15, seed=11)
        m2 = lda_fit(corpus, 3, iters=15, seed=11)
        np.testing.assert_array_equal(m1.beta, m2.beta)
        np.testing.assert_array_equal(m1.gamma, m2.gamma)

    def test_generative_recovery(self):
        corpus, true_beta, vocab = generative_corpus(seed=42, K=3, V=50, M=200)
        model = lda_fit(corpus, 3, iters=200, seed=7)
        assert elbo_nondecreasing(model.elbo_trace)

        vidx = {w: i for i, w in enumerate(vocab)}
        learned = np.zeros_like(true_beta)
        for j, w in enumerate(corpus.vocabulary):
            learned[:, vidx[w]] = model.beta[:, j]

        def perm_score(perm):
            return [
                float(
                    learned[perm[k]] @ true_beta[k]
                    / (np.linalg.norm(learned[perm[k]]) * np.linalg.norm(true_beta[k]))
                )
                for k in range(3)
            ]

        best = max(
            (perm_score(perm) for perm in itertools.permutations(range(3))),
            key=lambda cos: sum(cos),
        )
        assert min(best) >= 0.8

    def test_empty_vocabulary_error(self):
        docs = [Document(id="1", text="the of and", token_count=3)]
        corpus = build_corpus(docs, "x")  # default stopwords consume everything
        with pytest.raises(LdaError):
            lda_fit(corpus, 2)


class TestLdaTopics:
    def test_k1_top_word(self):
        corpus = corpus_of(["a a b"])
        model = lda_fit(corpus, 1, iters=5, seed=0)
        assert lda_topics(model, n=1)[0][0][0] == "a"

    def test_one_hot_beta(self):
        corpus = corpus_of(["x y z"])
        model = lda_fit(corpus, 1, iters=5, seed=0)
        model.beta = np.array([[1.0 - 2e-9, 1e-9, 1e-9]])
        top = lda_topics(model, n=3)[0]
        assert top[0][0] == corpus.vocabulary[0]

    def test_matches_argsort_oracle(self):
        rng = np.random.default_rng(5)
        corpus = corpus_of(["a b c d e f g h"])
        model = lda_fit(corpus, 2, iters=3, seed=1)
        model.beta = rng.dirichlet(np.ones(8), size=2)
        top = lda_topics(model, n=8)
        for k in range(2):
            expected = [
                corpus.vocabulary[j]
                for j in sorted(range(8), key=lambda j: (-model.beta[k, j], j))
            ]
            assert [w for w, _ in top[k]] == expected

    def test_n_exceeds_vocab(self):
        corpus = corpus_of(["a b"])
        model = lda_fit(corpus, 1, iters=2, seed=0)
        with pytest.raises(LdaError):
            lda_topics(model, n=3)


class TestExactLikelihood:
    def test_matches_enumeration_plus_quadrature(self):
        corpus = corpus_of(["x y x z", "y z z"])
        model = lda_fit(corpus, 2, iters=30, seed=3)
        engine = document_log_likelihood(model, ["x", "y", "z"])

        vmap = {w: i for i, w in enumerate(model.vocabulary)}
        word_ids = [vmap[w] for w in ["x", "y", "z"]]
        alpha = model.alpha

        def theta_pdf(t):
            return (
                gamma_fn(2 * alpha) / gamma_fn(alpha) ** 2 * t ** (alpha - 1) * (1 - t) ** (alpha - 1)
            )

        total = 0.0
        for zs in itertools.product(range(2), repeat=3):
            word_term = float(np.prod([model.beta[z, w] for z, w in zip(zs, word_ids)]))
            ones = sum(1 for z in zs if z == 0)
            moment, _ = quad(lambda t: t**ones * (1 - t) ** (3 - ones) * theta_pdf(t), 0.0, 1.0)
            total += word_term * moment
        assert engine == pytest.approx(float(np.log(total)), abs=1e-4)

    def test_unknown_token(self):
        corpus = corpus_of(["x y"])
        model = lda_fit(corpus, 1, iters=2, seed=0)
        with pytest.raises(LdaError):
            document_log_likelihood(model, ["zz"])

    def test_too_long_document(self):
        corpus = corpus_of(["x y"])
        model = lda_fit(corpus, 1, iters=2, seed=0)
        with pytest.raises(LdaError):
            document_log_likelihood(model, ["x"] * 13)
