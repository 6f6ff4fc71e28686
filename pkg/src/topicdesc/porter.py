"""Classic Porter suffix-stripping stemmer.

Implements the 1980 algorithm as distributed by its author, i.e. including
the two long-standing corrections to the published rule table (step 2 maps
``bli -> ble`` and ``logi -> log``) and the guard that leaves one- and
two-letter words untouched. Within each step the longest matching suffix
claims the word even when its measure condition fails -- "agreement" keeps
its ``ement`` because m(agre) = 1, and the shorter ``ment``/``ent`` rules
are never consulted.
"""

from __future__ import annotations

_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        # y is a vowel when it follows a consonant ("sky"), else a consonant.
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel->consonant transitions: [C](VC){m}[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    n = len(word)
    return (
        _is_consonant(word, n - 3)
        and not _is_consonant(word, n - 2)
        and _is_consonant(word, n - 1)
        and word[-1] not in "wxy"
    )


def _m_greater(threshold: int):
    def cond(stem: str) -> bool:
        return _measure(stem) > threshold

    return cond


# (suffix, replacement, condition-on-stem), longest suffix first so the
# match-claiming scan below is well defined.
_STEP2_RULES = (
    ("ational", "ate", _m_greater(0)),
    ("ization", "ize", _m_greater(0)),
    ("iveness", "ive", _m_greater(0)),
    ("fulness", "ful", _m_greater(0)),
    ("ousness", "ous", _m_greater(0)),
    ("tional", "tion", _m_greater(0)),
    ("biliti", "ble", _m_greater(0)),
    ("entli", "ent", _m_greater(0)),
    ("ousli", "ous", _m_greater(0)),
    ("ation", "ate", _m_greater(0)),
    ("alism", "al", _m_greater(0)),
    ("aliti", "al", _m_greater(0)),
    ("iviti", "ive", _m_greater(0)),
    ("enci", "ence", _m_greater(0)),
    ("anci", "ance", _m_greater(0)),
    ("izer", "ize", _m_greater(0)),
    ("alli", "al", _m_greater(0)),
    ("ator", "ate", _m_greater(0)),
    ("logi", "log", _m_greater(0)),
    ("bli", "ble", _m_greater(0)),
    ("eli", "e", _m_greater(0)),
)

_STEP3_RULES = (
    ("icate", "ic", _m_greater(0)),
    ("ative", "", _m_greater(0)),
    ("alize", "al", _m_greater(0)),
    ("iciti", "ic", _m_greater(0)),
    ("ical", "ic", _m_greater(0)),
    ("ful", "", _m_greater(0)),
    ("ness", "", _m_greater(0)),
)


def _ion_condition(stem: str) -> bool:
    return _measure(stem) > 1 and stem[-1:] in ("s", "t")


_STEP4_RULES = (
    ("ement", "", _m_greater(1)),
    ("ance", "", _m_greater(1)),
    ("ence", "", _m_greater(1)),
    ("able", "", _m_greater(1)),
    ("ible", "", _m_greater(1)),
    ("ment", "", _m_greater(1)),
    ("ant", "", _m_greater(1)),
    ("ent", "", _m_greater(1)),
    ("ion", "", _ion_condition),
    ("ism", "", _m_greater(1)),
    ("ate", "", _m_greater(1)),
    ("iti", "", _m_greater(1)),
    ("ous", "", _m_greater(1)),
    ("ive", "", _m_greater(1)),
    ("ize", "", _m_greater(1)),
    ("al", "", _m_greater(1)),
    ("er", "", _m_greater(1)),
    ("ic", "", _m_greater(1)),
    ("ou", "", _m_greater(1)),
)


def _apply_rules(word: str, rules) -> str:
    for suffix, replacement, condition in rules:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if condition(stem):
                return stem + replacement
            return word  # suffix claimed the step; condition failed
    return word


def _step1a(word: str) -> str:
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith("ies"):
        return word[:-2]
    if word.endswith("ss"):
        return word
    if word.endswith("s"):
        return word[:-1]
    return word


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            return word[:-1]
        return word
    for suffix in ("ed", "ing"):
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if not _has_vowel(stem):
                return word
            if stem.endswith(("at", "bl", "iz")):
                return stem + "e"
            if _ends_double_consonant(stem) and stem[-1] not in "lsz":
                return stem[:-1]
            if _measure(stem) == 1 and _ends_cvc(stem):
                return stem + "e"
            return stem
    return word


def _step1c(word: str) -> str:
    if word.endswith("y") and _has_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


def _step5a(word: str) -> str:
    if not word.endswith("e"):
        return word
    stem = word[:-1]
    m = _measure(stem)
    if m > 1 or (m == 1 and not _ends_cvc(stem)):
        return stem
    return word


def _step5b(word: str) -> str:
    if word.endswith("l") and _ends_double_consonant(word) and _measure(word) > 1:
        return word[:-1]
    return word


def stem(word: str) -> str:
    """Return the Porter stem of a lowercase word."""
    if len(word) <= 2:
        return word
    word = _step1a(word)
    word = _step1b(word)
    word = _step1c(word)
    word = _apply_rules(word, _STEP2_RULES)
    word = _apply_rules(word, _STEP3_RULES)
    word = _apply_rules(word, _STEP4_RULES)
    word = _step5a(word)
    word = _step5b(word)
    return word
