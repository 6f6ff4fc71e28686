"""Extended topic descriptors: map RAKE keywords onto topic token lists.

For each topic, documents assigned to it (by dominant topic) contribute their
raw text to keyword extraction; each keyword phrase is stemmed with the same
chain as the corpus and scored by how many distinct stems it shares with the
topic's top tokens. The descriptor keeps every keyword that attains both the
maximum intersection and, within those, the maximum RAKE score. Topics with
no intersecting keyword at all fall back to "Miscellaneous".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .lda import TopicAssignment, TopicModel, TopicTokenList, assign, top_tokens
from .preprocess import (
    Document,
    Stoplist,
    normalize,
    remove_stopwords,
    stem,
    tokenize,
)
from .rake import KeywordCandidate, RakeConfig, extract_keywords

MISCELLANEOUS_LABEL = "Miscellaneous"

DEFAULT_MAX_PHRASE_WORDS = 10


@dataclass(frozen=True)
class TopicGroup:
    topic_id: int
    documents: tuple[Document, ...]


@dataclass(frozen=True)
class ScoredMapping:
    candidate: KeywordCandidate
    stemmed_tokens: frozenset[str]
    intersection_count: int


@dataclass(frozen=True)
class TopicDescriptor:
    topic_id: int
    label: str
    # (phrase, rake score, intersection count), best first
    contributing_keywords: tuple[tuple[str, float, int], ...]
    is_miscellaneous: bool


def group_by_topic(
    assignments: Sequence[TopicAssignment],
    documents: Sequence[Document],
    n_topics: int,
) -> list[TopicGroup]:
    """Partition assigned documents into one group per topic (may be empty)."""
    by_id = {doc.id: doc for doc in documents}
    buckets: list[list[Document]] = [[] for _ in range(n_topics)]
    for a in assignments:
        if not 0 <= a.topic_id < n_topics:
            raise ValueError(f"assignment topic {a.topic_id} out of range")
        doc = by_id.get(a.doc_id)
        if doc is None:
            raise ValueError(f"assignment references unknown document {a.doc_id!r}")
        buckets[a.topic_id].append(doc)
    return [
        TopicGroup(topic_id=k, documents=tuple(docs))
        for k, docs in enumerate(buckets)
    ]


def phrase_stems(words: Iterable[str], stoplist: Stoplist) -> frozenset[str]:
    """Stem a phrase's words with the corpus preprocessing chain."""
    cleaned = normalize(" ".join(words))
    return frozenset(stem(remove_stopwords(tokenize(cleaned), stoplist)))


def map_keywords(
    topic_tokens: TopicTokenList,
    candidates: Sequence[KeywordCandidate],
    stoplist: Stoplist,
) -> list[ScoredMapping]:
    """Score candidates by distinct-stem overlap with the topic's tokens."""
    token_set = set(topic_tokens.tokens)
    mappings = []
    for cand in candidates:
        stems = phrase_stems(cand.words, stoplist)
        mappings.append(
            ScoredMapping(
                candidate=cand,
                stemmed_tokens=stems,
                intersection_count=len(stems & token_set),
            )
        )
    mappings.sort(
        key=lambda m: (-m.intersection_count, -m.candidate.score, m.candidate.key)
    )
    return mappings


def _title_case(phrase: str) -> str:
    return " ".join(w[:1].upper() + w[1:] for w in phrase.split())


def select_descriptor(
    mappings: Sequence[ScoredMapping], topic_id: int
) -> TopicDescriptor:
    """Keep max-intersection candidates, then max score; join ties with '/'."""
    best_intersection = max((m.intersection_count for m in mappings), default=0)
    if best_intersection == 0:
        return TopicDescriptor(
            topic_id=topic_id,
            label=MISCELLANEOUS_LABEL,
            contributing_keywords=(),
            is_miscellaneous=True,
        )
    shortlist = [m for m in mappings if m.intersection_count == best_intersection]
    best_score = max(m.candidate.score for m in shortlist)
    winners = [m for m in shortlist if m.candidate.score == best_score]
    winners.sort(key=lambda m: (-m.candidate.score, m.candidate.key))
    return TopicDescriptor(
        topic_id=topic_id,
        label="/".join(_title_case(m.candidate.phrase) for m in winners),
        contributing_keywords=tuple(
            (m.candidate.phrase, m.candidate.score, m.intersection_count)
            for m in winners
        ),
        is_miscellaneous=False,
    )


def describe_all(
    model: TopicModel,
    documents: Sequence[Document],
    rake_config: RakeConfig,
    *,
    max_phrase_words: int = DEFAULT_MAX_PHRASE_WORDS,
) -> list[TopicDescriptor]:
    """Produce one descriptor per topic for a fitted model."""
    assignments = assign(model)
    groups = group_by_topic(
        assignments,
        [doc for doc in documents if doc.id in set(model.doc_ids)],
        model.n_topics,
    )
    descriptors = []
    for group in groups:
        texts = [doc.text for doc in group.documents]
        candidates = [
            c
            for c in extract_keywords(texts, rake_config)
            if len(c.words) <= max_phrase_words
        ]
        mappings = map_keywords(
            top_tokens(model, group.topic_id), candidates, rake_config.stoplist
        )
        descriptors.append(select_descriptor(mappings, group.topic_id))
    return descriptors
