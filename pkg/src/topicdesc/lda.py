"""Latent Dirichlet Allocation fitted by collapsed Gibbs sampling.

The sampler is a single sequential chain: per sweep, every token's topic is
resampled from the conditional

    p(z = k) ∝ (n_kw + β) / (n_k + Vβ) · (n_dk + α)

using one pre-drawn uniform per token. All randomness comes from
``numpy.random.default_rng(seed)``, so runs are reproducible for a fixed
seed. The sweep kernel is compiled with numba when available; the
pure-Python twin executes the identical arithmetic and produces bit-equal
results (the tests rely on that).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .preprocess import TokenList

try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _njit = None
    _HAVE_NUMBA = False


@dataclass(frozen=True)
class LdaConfig:
    n_topics: int = 10
    doc_topic_prior: float | None = None  # α, defaults to 1/K
    topic_word_prior: float | None = None  # β, defaults to 1/K
    n_iterations: int = 1000
    random_seed: int = 0
    top_n_tokens: int = 10

    @property
    def alpha(self) -> float:
        return (
            1.0 / self.n_topics
            if self.doc_topic_prior is None
            else self.doc_topic_prior
        )

    @property
    def beta(self) -> float:
        return (
            1.0 / self.n_topics
            if self.topic_word_prior is None
            else self.topic_word_prior
        )

    def validate(self) -> None:
        if self.n_topics < 1:
            raise ValueError("n_topics must be >= 1")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("priors must be strictly positive")
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if self.top_n_tokens < 1:
            raise ValueError("top_n_tokens must be >= 1")


@dataclass(frozen=True)
class TopicModel:
    phi: np.ndarray  # K x V topic-word probabilities
    theta: np.ndarray  # D x K document-topic probabilities
    vocabulary: tuple[str, ...]
    doc_ids: tuple[str, ...]
    config: LdaConfig

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]


@dataclass(frozen=True)
class TopicTokenList:
    topic_id: int
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class TopicAssignment:
    doc_id: str
    topic_id: int
    relevance: float


def _gibbs_sweep(doc_ids, word_ids, z, ndk, nkw, nk, alpha, beta, uniforms):
    n_tokens = word_ids.shape[0]
    n_topics = nk.shape[0]
    v = nkw.shape[1]
    for i in range(n_tokens):
        d = doc_ids[i]
        w = word_ids[i]
        k_old = z[i]
        ndk[d, k_old] -= 1
        nkw[k_old, w] -= 1
        nk[k_old] -= 1
        total = 0.0
        for k in range(n_topics):
            total += (
                (nkw[k, w] + beta) / (nk[k] + beta * v) * (ndk[d, k] + alpha)
            )
        r = uniforms[i] * total
        acc = 0.0
        k_new = n_topics - 1
        for k in range(n_topics):
            acc += (
                (nkw[k, w] + beta) / (nk[k] + beta * v) * (ndk[d, k] + alpha)
            )
            if acc > r:
                k_new = k
                break
        z[i] = k_new
        ndk[d, k_new] += 1
        nkw[k_new, w] += 1
        nk[k_new] += 1


if _HAVE_NUMBA:
    _gibbs_sweep_jit = _njit(cache=True)(_gibbs_sweep)
else:  # pragma: no cover
    _gibbs_sweep_jit = None


def fit(
    token_lists: Sequence[TokenList],
    config: LdaConfig,
    *,
    jit: bool | None = None,
) -> TopicModel:
    """Fit a topic model over the non-empty token lists.

    ``jit=None`` uses the compiled kernel when numba is importable; passing
    False forces the pure-Python twin (slow, test escape hatch). Both paths
    draw the same uniforms and produce identical models.
    """
    config.validate()
    non_empty = [tl for tl in token_lists if tl.tokens]
    if not non_empty:
        raise ValueError("corpus contains no non-empty documents")
    seen: set[str] = set()
    for tl in non_empty:
        if tl.doc_id in seen:
            raise ValueError(f"duplicate doc_id: {tl.doc_id!r}")
        seen.add(tl.doc_id)

    vocabulary = tuple(sorted({t for tl in non_empty for t in tl.tokens}))
    word_index = {w: i for i, w in enumerate(vocabulary)}
    n_docs = len(non_empty)
    n_topics = config.n_topics
    v = len(vocabulary)

    doc_ids = np.concatenate(
        [np.full(len(tl.tokens), d, dtype=np.int32) for d, tl in enumerate(non_empty)]
    )
    word_ids = np.fromiter(
        (word_index[t] for tl in non_empty for t in tl.tokens),
        dtype=np.int32,
        count=int(doc_ids.shape[0]),
    )
    n_tokens = word_ids.shape[0]

    rng = np.random.default_rng(config.random_seed)
    z = rng.integers(0, n_topics, size=n_tokens).astype(np.int32)

    ndk = np.zeros((n_docs, n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, v), dtype=np.int64)
    nk = np.zeros(n_topics, dtype=np.int64)
    np.add.at(ndk, (doc_ids, z), 1)
    np.add.at(nkw, (z, word_ids), 1)
    np.add.at(nk, z, 1)

    use_jit = _HAVE_NUMBA if jit is None else (jit and _HAVE_NUMBA)
    sweep = _gibbs_sweep_jit if use_jit else _gibbs_sweep
    alpha = config.alpha
    beta = config.beta
    for _ in range(config.n_iterations):
        uniforms = rng.random(n_tokens)
        sweep(doc_ids, word_ids, z, ndk, nkw, nk, alpha, beta, uniforms)
        if int(nk.sum()) != n_tokens:  # count conservation, cheap (K terms)
            raise RuntimeError("sampler lost tokens; counts out of balance")

    phi = (nkw + beta) / (nk + beta * v)[:, None]
    nd = ndk.sum(axis=1)
    theta = (ndk + alpha) / (nd + alpha * n_topics)[:, None]
    return TopicModel(
        phi=phi,
        theta=theta,
        vocabulary=vocabulary,
        doc_ids=tuple(tl.doc_id for tl in non_empty),
        config=config,
    )


def top_tokens(model: TopicModel, k: int) -> TopicTokenList:
    """Tokens of topic k by descending probability, ties lexicographic."""
    if not 0 <= k < model.n_topics:
        raise IndexError(f"topic index out of range: {k}")
    row = model.phi[k]
    order = sorted(range(len(model.vocabulary)), key=lambda w: (-row[w], model.vocabulary[w]))
    n = min(model.config.top_n_tokens, len(model.vocabulary))
    return TopicTokenList(
        topic_id=k, tokens=tuple(model.vocabulary[w] for w in order[:n])
    )


def all_top_tokens(model: TopicModel) -> list[TopicTokenList]:
    return [top_tokens(model, k) for k in range(model.n_topics)]


def assign(model: TopicModel) -> list[TopicAssignment]:
    """Dominant topic per document; ties go to the lowest topic index."""
    out = []
    for d, doc_id in enumerate(model.doc_ids):
        row = model.theta[d]
        topic_id = int(np.argmax(row))  # argmax returns the first maximum
        out.append(
            TopicAssignment(
                doc_id=doc_id, topic_id=topic_id, relevance=float(row[topic_id])
            )
        )
    return out


def perplexity(
    model: TopicModel, token_lists: Iterable[TokenList]
) -> float:
    """exp(− mean log p(token)) over in-vocabulary evaluation tokens.

    Out-of-vocabulary tokens are skipped (and tallied against the denominator
    they are excluded from); an evaluation set with no usable tokens is an
    error.
    """
    word_index = {w: i for i, w in enumerate(model.vocabulary)}
    doc_index = {doc_id: d for d, doc_id in enumerate(model.doc_ids)}
    log_lik = 0.0
    n_eval = 0
    n_oov = 0
    for tl in token_lists:
        if not tl.tokens:
            continue
        if tl.doc_id not in doc_index:
            raise ValueError(
                f"no fitted topic distribution for document {tl.doc_id!r}"
            )
        theta_row = model.theta[doc_index[tl.doc_id]]
        for token in tl.tokens:
            w = word_index.get(token)
            if w is None:
                n_oov += 1
                continue
            log_lik += float(np.log(theta_row @ model.phi[:, w]))
            n_eval += 1
    if n_eval == 0:
        raise ValueError(
            f"empty evaluation set (skipped {n_oov} out-of-vocabulary tokens)"
        )
    return float(np.exp(-log_lik / n_eval))
