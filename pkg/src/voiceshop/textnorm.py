"""Text normalization and tokenization shared by the matcher and the evaluator.

All word-level comparisons in this package (keyword spotting, error-rate
scoring, product search) run on the token lists produced here, so both sides
of any comparison agree on what a "word" is.
"""

from __future__ import annotations

import re

# Anything that is not a word character, apostrophe or whitespace splits
# tokens. Underscores and hyphens split too ("e-mail" -> [e, mail]).
_SPLIT_RE = re.compile(r"[^\w\s']|_", flags=re.UNICODE)
_DIGITS_RE = re.compile(r"^[0-9]+$")

_NUMBER_WORDS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4,
    "five": 5, "six": 6, "seven": 7, "eight": 8, "nine": 9,
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19, "twenty": 20,
}

_ORDINAL_WORDS = {
    "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
    "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9, "tenth": 10,
}


def normalize(raw: str) -> list[str]:
    """Normalize arbitrary text into a list of lowercase word tokens.

    Lowercases, replaces punctuation with spaces (apostrophes interior to a
    token survive), collapses whitespace runs, and drops empty tokens.
    Total function: any input, including "", yields a (possibly empty) list.
    """
    lowered = _SPLIT_RE.sub(" ", raw.lower())
    tokens = []
    for piece in lowered.split():
        token = piece.strip("'")
        if token:
            tokens.append(token)
    return tokens


def tokens_with_confidences(
    raw: str, word_confidences: list[float] | None
) -> tuple[list[str], list[float]]:
    """Tokenize `raw` and carry per-word confidences over to the tokens.

    `word_confidences` aligns with the whitespace-split words of `raw`; each
    token inherits the confidence of the word it came from (a hyphenated word
    may fan out into several tokens). Absent confidences default to 1.0.
    """
    words = raw.split()
    if word_confidences is None:
        word_confidences = [1.0] * len(words)
    if len(word_confidences) != len(words):
        raise ValueError(
            f"word_confidences length {len(word_confidences)} does not match "
            f"word count {len(words)}"
        )
    tokens: list[str] = []
    confidences: list[float] = []
    for word, conf in zip(words, word_confidences):
        for token in normalize(word):
            tokens.append(token)
            confidences.append(conf)
    return tokens, confidences


def parse_quantity(token: str) -> int | None:
    """Parse a normalized token as a count.

    Digit strings parse numerically; the number words zero..twenty map via a
    fixed table; anything else is None. Larger counts must be spoken as
    digits.
    """
    if _DIGITS_RE.match(token):
        return int(token)
    return _NUMBER_WORDS.get(token)


def parse_ordinal(token: str) -> int | None:
    """Parse a normalized token as a 1-based position.

    Accepts the ordinal words first..tenth and any token parse_quantity
    accepts (so "select number 2" and "select the second one" both work).
    """
    if token in _ORDINAL_WORDS:
        return _ORDINAL_WORDS[token]
    return parse_quantity(token)
