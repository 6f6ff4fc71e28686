"""Text normalization chain for free-text survey responses.

The pipeline is fixed: lowercase -> strip every non-letter -> whitespace
tokenize -> stopword removal -> Porter stemming. Each stage is exposed on its
own so callers (and tests) can compose or inspect intermediate results.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

from .porter import stem as porter_stem

_NON_ALPHA = re.compile(r"[^a-z]+")

DEFAULT_STOPLIST_RESOURCE = "data/english_stopwords.txt"


@dataclass(frozen=True)
class Document:
    """A raw text response with a stable identifier."""

    id: str
    text: str
    dataset_id: str = ""


@dataclass(frozen=True)
class TokenList:
    """Stemmed lowercase tokens for one document, in source order."""

    doc_id: str
    tokens: tuple[str, ...]

    @property
    def is_empty(self) -> bool:
        return not self.tokens


@dataclass(frozen=True)
class Stoplist:
    words: frozenset[str]
    source_name: str = "custom"

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("stoplist must not be empty")
        for w in self.words:
            if not w or w != w.lower() or any(c.isspace() for c in w):
                raise ValueError(f"invalid stoplist entry: {w!r}")

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


def normalize(text: str) -> str:
    """Lowercase and reduce to [a-z] words separated by single spaces.

    Digits, punctuation, emoji and any other non-letter characters act as
    separators; runs of them collapse to one space.
    """
    return _NON_ALPHA.sub(" ", text.lower()).strip()


def tokenize(cleaned: str) -> list[str]:
    return cleaned.split()


def remove_stopwords(tokens: Iterable[str], stoplist: Stoplist) -> list[str]:
    return [t for t in tokens if t not in stoplist]


def stem(tokens: Iterable[str]) -> list[str]:
    return [porter_stem(t) for t in tokens]


def preprocess_document(doc: Document, stoplist: Stoplist) -> TokenList:
    """Run the full chain on one document.

    Documents whose content is entirely removed come back as an empty
    TokenList; downstream stages treat those as flagged and skip them.
    """
    words = remove_stopwords(tokenize(normalize(doc.text)), stoplist)
    return TokenList(doc_id=doc.id, tokens=tuple(stem(words)))


def preprocess_corpus(
    documents: Iterable[Document], stoplist: Stoplist
) -> list[TokenList]:
    return [preprocess_document(doc, stoplist) for doc in documents]


def build_display_map(
    documents: Iterable[Document], stoplist: Stoplist
) -> dict[str, str]:
    """Map each stem to a readable surface form.

    Picks the most frequent original (pre-stemming, lowercase) word that
    produced the stem, breaking ties lexicographically, so stemmed model
    output can be rendered back in plain English.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for doc in documents:
        for word in remove_stopwords(tokenize(normalize(doc.text)), stoplist):
            counts[(porter_stem(word), word)] += 1
    best: dict[str, tuple[int, str]] = {}
    for (stemmed, word), n in sorted(counts.items()):
        seen = best.get(stemmed)
        if seen is None or n > seen[0]:
            best[stemmed] = (n, word)
    return {stemmed: word for stemmed, (n, word) in best.items()}


def _parse_stoplist_text(text: str) -> frozenset[str]:
    words: set[str] = set()
    for line in text.splitlines():
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        # Run entries through the same character cleanup as document text so
        # "don't" covers the fragments ("don", "t") that tokenization yields.
        words.update(tokenize(normalize(entry)))
    return frozenset(words)


def load_stoplist(path=None) -> Stoplist:
    """Load a stoplist file (one word per line, '#' comments allowed).

    Without a path, returns the packaged English list.
    """
    if path is None:
        text = (
            resources.files(__package__)
            .joinpath(DEFAULT_STOPLIST_RESOURCE)
            .read_text(encoding="utf-8")
        )
        return Stoplist(words=_parse_stoplist_text(text), source_name="english")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return Stoplist(
        words=_parse_stoplist_text(text),
        source_name=os.path.basename(str(path)),
    )
