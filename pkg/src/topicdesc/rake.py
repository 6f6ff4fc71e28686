"""Rapid Automatic Keyword Extraction over raw (unstemmed) text.

Candidate phrases are maximal runs of content words between phrase delimiters
and stopwords. Word scores come from co-occurrence statistics over candidate
occurrences (a word co-occurs with itself, so a length-L occurrence adds L to
the degree of each member word); phrase scores are the sum of member word
scores. Pairs of candidates that adjoin across interior stopwords at least
twice within one document are emitted as additional combined candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .preprocess import Stoplist

SCORING_MODES = ("degree", "frequency", "ratio")

DEFAULT_PHRASE_DELIMITERS = frozenset('.,;:!?()[]"\'–—/\n\t')


@dataclass(frozen=True)
class RakeConfig:
    stoplist: Stoplist
    scoring_mode: str = "ratio"
    phrase_delimiters: frozenset[str] = DEFAULT_PHRASE_DELIMITERS
    min_adjoin_count: int = 2

    def __post_init__(self) -> None:
        if self.scoring_mode not in SCORING_MODES:
            raise ValueError(f"unknown scoring_mode: {self.scoring_mode!r}")
        if not self.phrase_delimiters:
            raise ValueError("phrase_delimiters must not be empty")
        if self.min_adjoin_count < 1:
            raise ValueError("min_adjoin_count must be positive")


@dataclass(frozen=True)
class WordStats:
    word: str
    freq: int
    deg: int

    def score(self, scoring_mode: str) -> float:
        if scoring_mode == "degree":
            return float(self.deg)
        if scoring_mode == "frequency":
            return float(self.freq)
        return self.deg / self.freq


@dataclass(frozen=True)
class CandidateOccurrence:
    """One appearance of a candidate phrase inside one input text."""

    doc_index: int
    words: tuple[str, ...]

    @property
    def key(self) -> tuple[str, ...]:
        return tuple(w.lower() for w in self.words)


@dataclass(frozen=True)
class KeywordCandidate:
    words: tuple[str, ...]
    score: float
    occurrence_count: int

    @property
    def phrase(self) -> str:
        return " ".join(self.words)

    @property
    def key(self) -> str:
        return self.phrase.lower()


def _is_content_word(token: str, stoplist: Stoplist) -> bool:
    # A bare punctuation token ("&", "-") breaks a phrase just like a stopword.
    return any(c.isalnum() for c in token) and token.lower() not in stoplist


def _split_segments(text: str, delimiters: frozenset[str]) -> list[list[str]]:
    """Split a text at phrase delimiters, then whitespace-tokenize each part."""
    segments: list[list[str]] = []
    current: list[str] = []
    word = []
    for ch in text:
        if ch in delimiters:
            if word:
                current.append("".join(word))
                word = []
            if current:
                segments.append(current)
                current = []
        elif ch.isspace():
            if word:
                current.append("".join(word))
                word = []
        else:
            word.append(ch)
    if word:
        current.append("".join(word))
    if current:
        segments.append(current)
    return segments


def generate_candidates(
    texts: Sequence[str], config: RakeConfig
) -> list[CandidateOccurrence]:
    """Every maximal run of contiguous content words is one occurrence."""
    occurrences: list[CandidateOccurrence] = []
    for doc_index, text in enumerate(texts):
        for segment in _split_segments(text, config.phrase_delimiters):
            run: list[str] = []
            for token in segment:
                if _is_content_word(token, config.stoplist):
                    run.append(token)
                else:
                    if run:
                        occurrences.append(
                            CandidateOccurrence(doc_index, tuple(run))
                        )
                    run = []
            if run:
                occurrences.append(CandidateOccurrence(doc_index, tuple(run)))
    return occurrences


def score_words(
    occurrences: Iterable[CandidateOccurrence],
) -> dict[str, WordStats]:
    freq: dict[str, int] = {}
    deg: dict[str, int] = {}
    for occ in occurrences:
        length = len(occ.words)
        for word in occ.key:
            freq[word] = freq.get(word, 0) + 1
            deg[word] = deg.get(word, 0) + length
    return {w: WordStats(word=w, freq=freq[w], deg=deg[w]) for w in freq}


def _phrase_score(
    key: Sequence[str], stats: dict[str, WordStats], mode: str
) -> float:
    total = 0.0
    for word in key:  # slot order keeps float summation deterministic
        total += stats[word].score(mode)
    return total


def score_candidates(
    occurrences: Sequence[CandidateOccurrence],
    word_stats: dict[str, WordStats],
    config: RakeConfig,
) -> list[KeywordCandidate]:
    """Deduplicate occurrences case-insensitively and score each phrase."""
    first_form: dict[tuple[str, ...], tuple[str, ...]] = {}
    counts: dict[tuple[str, ...], int] = {}
    for occ in occurrences:
        key = occ.key
        if key not in first_form:
            first_form[key] = occ.words
        counts[key] = counts.get(key, 0) + 1
    candidates = [
        KeywordCandidate(
            words=first_form[key],
            score=_phrase_score(key, word_stats, config.scoring_mode),
            occurrence_count=counts[key],
        )
        for key in first_form
    ]
    candidates.sort(key=lambda c: (-c.score, c.key))
    return candidates


def adjoin_keywords(
    texts: Sequence[str],
    candidates: Sequence[KeywordCandidate],
    config: RakeConfig,
) -> list[KeywordCandidate]:
    """Combine candidate pairs that adjoin across interior stopwords.

    A pair qualifies when the exact word sequence (first keyword, the
    separating stopwords, second keyword) appears at least min_adjoin_count
    times within a single text, in the same order. The combined score is the
    sum of the two member keyword scores; interior stopwords add nothing.
    """
    by_key = {c.key: c for c in candidates}
    per_doc: dict[tuple[str, ...], dict[int, int]] = {}
    first_form: dict[tuple[str, ...], tuple[str, ...]] = {}
    splits: dict[tuple[str, ...], tuple[str, str]] = {}

    for doc_index, text in enumerate(texts):
        for segment in _split_segments(text, config.phrase_delimiters):
            flags = [_is_content_word(t, config.stoplist) for t in segment]
            # runs of content words with their positions
            runs: list[tuple[int, int]] = []  # [start, end) spans
            start = None
            for i, flag in enumerate(flags):
                if flag and start is None:
                    start = i
                elif not flag and start is not None:
                    runs.append((start, i))
                    start = None
            if start is not None:
                runs.append((start, len(segment)))
            for (s1, e1), (s2, e2) in zip(runs, runs[1:]):
                gap = segment[e1:s2]
                if not gap or not all(
                    g.lower() in config.stoplist for g in gap
                ):
                    # only pure-stopword gaps adjoin; bare punctuation breaks
                    continue
                words = tuple(segment[s1:e2])
                seq = tuple(w.lower() for w in words)
                per_doc.setdefault(seq, {})
                per_doc[seq][doc_index] = per_doc[seq].get(doc_index, 0) + 1
                if seq not in first_form:
                    first_form[seq] = words
                    left = " ".join(seq[: e1 - s1])
                    right = " ".join(seq[s2 - s1 :])
                    splits[seq] = (left, right)

    combined: list[KeywordCandidate] = []
    for seq, doc_counts in per_doc.items():
        if max(doc_counts.values()) < config.min_adjoin_count:
            continue
        left, right = splits[seq]
        score = by_key[left].score + by_key[right].score
        combined.append(
            KeywordCandidate(
                words=first_form[seq],
                score=score,
                occurrence_count=sum(doc_counts.values()),
            )
        )
    combined.sort(key=lambda c: (-c.score, c.key))
    return combined


def extract_keywords(
    texts: Sequence[str], config: RakeConfig
) -> list[KeywordCandidate]:
    """Full extraction: candidates, word scores, phrase scores, adjoins."""
    occurrences = generate_candidates(texts, config)
    stats = score_words(occurrences)
    simple = score_candidates(occurrences, stats, config)
    combined = adjoin_keywords(texts, simple, config)
    merged = list(simple) + combined
    merged.sort(key=lambda c: (-c.score, c.key))
    return merged
