"""Text normalization and n-gram tokenization."""

import re
import string
from collections import Counter

_PUNCT = re.compile("[" + re.escape(string.punctuation) + "]")
_NON_ASCII = re.compile(r"[^\x00-\x7f]+")
_WS = re.compile(r"\s+")


def preprocess(text: str) -> str:
    """Lowercase, drop non-ASCII, turn punctuation into spaces, squeeze whitespace.

    >>> preprocess("We  COLLECT your-data!")
    'we collect your data'
    >>> preprocess("Déjà vu")
    'dj vu'
    """
    text = _NON_ASCII.sub("", text.lower())
    text = _PUNCT.sub(" ", text)
    return _WS.sub(" ", text).strip()


def tokenize_ngrams(text: str) -> Counter:
    """Unigram and bigram counts of an already preprocessed string."""
    tokens = text.split()
    grams = Counter(tokens)
    grams.update(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    return grams


def contains_phrase(normalized: str, phrase: str) -> bool:
    """Whole-token phrase match on preprocessed text."""
    if not phrase:
        return False
    return f" {phrase} " in f" {normalized} "
